#include "neulap/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "neulap/errors.hpp"
#include "neulap/mesh.hpp"

namespace neulap::spectral {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TauResult tau_impl(const geometry::ChannelProfile& profile, int nx, int ny,
                   const eigs::EigenRequest& req, double kappa, bool both_ends) {
  TauResult r;
  r.epsilon = profile.eps;
  eigs::EigenRequest rq = req;
  rq.k = 1;
  rq.block_size = 0;
  for (int level = 0; level < 2; ++level) {
    const int scale = 1 << level;
    const fem::StructuredMesh mesh = fem::build_channel_mesh(profile, nx * scale, ny * scale);
    const fem::AssembledForms forms =
        fem::assemble_mapped_channel_forms(mesh, profile, both_ends);
    const eigs::EigenResult res = eigs::lobpcg(forms, rq);
    r.mesh_levels[static_cast<size_t>(level)] = res.values[0];
    r.solver_converged = r.solver_converged && res.converged;
  }
  r.tau = r.mesh_levels[1];
  r.extrapolated = richardson2(r.mesh_levels[0], r.mesh_levels[1]);
  const geometry::TauBounds tb = geometry::tau_lower_bound(profile, kappa);
  r.lower_bound = tb.bound;
  r.crude_floor = tb.crude_applicable ? tb.crude_floor : kNaN;
  r.upper_bound_if_applicable =
      (!both_ends && geometry::profile_nondecreasing(profile))
          ? geometry::tau_upper_bound_nondecreasing(profile.length())
          : kNaN;
  return r;
}

}  // namespace

double TauResult::margin() const { return 2.0 * std::abs(mesh_levels[1] - mesh_levels[0]); }

double richardson2(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

TauResult compute_tau(const geometry::ChannelProfile& profile, int nx, int ny,
                      const eigs::EigenRequest& req, double kappa) {
  return tau_impl(profile, nx, ny, req, kappa, false);
}

TauResult compute_tau_two_dirichlet(const geometry::ChannelProfile& profile, int nx, int ny,
                                    const eigs::EigenRequest& req, double kappa) {
  return tau_impl(profile, nx, ny, req, kappa, true);
}

BracketingSplit bracketing_split(const geometry::ChannelProfile& profile) {
  if (profile.family != geometry::ProfileFamily::GammaPoly)
    throw HypothesisError("bracketing split applies to the gamma-poly family only");
  const double T = profile.base_length();
  const int n = 10000;
  double min_dd = std::numeric_limits<double>::infinity();
  int sign_changes = 0;
  int prev_sign = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = T * static_cast<double>(i) / n;
    min_dd = std::min(min_dd, profile.ddgamma(t));
    const double dg = profile.dgamma(t);
    const int s = dg > 0.0 ? 1 : (dg < 0.0 ? -1 : 0);
    if (s != 0) {
      if (prev_sign != 0 && s != prev_sign) ++sign_changes;
      prev_sign = s;
    }
  }
  if (!(min_dd > 0.0))
    throw HypothesisError("bracketing split requires strictly convex gamma");
  if (sign_changes > 1)
    throw HypothesisError("gamma' changes sign more than once");

  BracketingSplit out;
  const double d0 = profile.dgamma(0.0), dT = profile.dgamma(T);
  if (dT <= 0.0) {
    out.kind = BracketingSplit::Kind::MonotoneDecreasing;
    return out;
  }
  if (d0 >= 0.0) {
    out.kind = BracketingSplit::Kind::MonotoneIncreasingMirrored;
    return out;
  }
  double lo = 0.0, hi = T;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (profile.dgamma(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.kind = BracketingSplit::Kind::SplitAtInterior;
  out.L_star = 0.5 * (lo + hi);
  out.sub0 = profile;
  out.sub0.sub_len = out.L_star;
  out.sub1 = profile;
  out.sub1.off = profile.off + profile.sgn * T;
  out.sub1.sgn = -profile.sgn;
  out.sub1.sub_len = T - out.L_star;
  return out;
}

DumbbellSpectrum dumbbell_spectrum(const geometry::PerturbedDomain& domain, int k,
                                   double h_base, int nx, int ny,
                                   const eigs::EigenRequest& req) {
  DumbbellSpectrum out;
  out.assembly = fem::build_dumbbell_forms(domain, h_base, nx, ny);
  eigs::EigenRequest rq = req;
  rq.k = k;
  out.raw = eigs::lobpcg(out.assembly.forms, rq);
  out.values = out.raw.values;
  out.vectors = out.raw.vectors;
  return out;
}

void ensure_simple(const std::vector<double>& values, int n) {
  if (n < 1 || n > static_cast<int>(values.size()))
    throw ParameterError("eigenvalue index out of range");
  const double v = values[static_cast<size_t>(n - 1)];
  for (int m : {n - 1, n + 1}) {
    if (m < 1 || m > static_cast<int>(values.size())) continue;
    const double w = values[static_cast<size_t>(m - 1)];
    const double denom = std::max({std::abs(v), std::abs(w), 1e-300});
    const double gap = std::abs(v - w) / denom;
    if (gap < 0.05) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "eigenvalue %d clusters with %d (relative gap %.3g); use a "
                    "non-degenerate base rectangle",
                    n, m, gap);
      throw DegeneracyError(buf);
    }
  }
}

double eigenfunction_distance(const Eigen::VectorXd& vec_eps, const Eigen::VectorXd& vec_0,
                              const fem::DumbbellAssembly& meshes) {
  const int nb = meshes.base_nodes, nc = meshes.channel_nodes;
  if (vec_eps.size() != meshes.forms.K.rows())
    throw ParameterError("vec_eps must live in the combined dof basis");
  if (vec_0.size() != nb) throw ParameterError("vec_0 must live on the base mesh");
  const Eigen::VectorXd nodal = meshes.forms.expand * vec_eps;
  const Eigen::VectorXd ub = nodal.head(nb);
  const Eigen::VectorXd uc = nodal.tail(nc);
  auto h1_base = [&meshes](const Eigen::VectorXd& v) {
    return v.dot(meshes.base.K * v) + v.dot(meshes.base.M * v);
  };
  const double cross = ub.dot(meshes.base.K * vec_0) + ub.dot(meshes.base.M * vec_0);
  const double s = cross >= 0.0 ? 1.0 : -1.0;
  const Eigen::VectorXd diff = ub - s * vec_0;
  const double d_base = std::sqrt(std::max(0.0, h1_base(diff)));
  const double d_chan =
      std::sqrt(std::max(0.0, uc.dot(meshes.channel.K * uc) + uc.dot(meshes.channel.M * uc)));
  return d_base + d_chan;
}

std::vector<double> dirichlet_example_spectrum(double a, double eps, int k, int nx, int ny,
                                               const eigs::EigenRequest& req) {
  const fem::AssembledForms forms = fem::build_oscillating_forms(a, eps, nx, ny);
  eigs::EigenRequest rq = req;
  rq.k = k;
  const eigs::EigenResult res = eigs::lobpcg(forms, rq);
  return res.values;
}

std::pair<double, double> ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ParameterError("least-squares fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw ParameterError("degenerate abscissae in least-squares fit");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  return {intercept, slope};
}

SpectralReport convergence_sweep(const cli::ExperimentConfig& config, int jobs) {
  if (config.family == "oscillating")
    throw ConfigError("convergence sweep needs a channel profile family");
  SpectralReport report;
  if (config.epsilon_grid.empty()) {
    report.fit_slope = kNaN;
    report.fit_intercept = kNaN;
    return report;
  }
  std::vector<double> grid = config.epsilon_grid;
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  report.rows.resize(grid.size());

  // base-rectangle eigenpairs, shared by every row
  fem::AssembledForms base_forms = fem::build_base_forms(config.height, config.h_base);
  const eigs::EigenResult base_res =
      eigs::lobpcg(base_forms, config.make_request(config.k));
  const std::vector<double> lambda0 =
      analytic::rect_neumann_eigs(1.0, config.height, config.k);

  auto run_row = [&](size_t idx) {
    SweepRow& row = report.rows[idx];
    row.epsilon = grid[idx];
    row.m = kNaN;
    row.excess = kNaN;
    row.distance = kNaN;
    try {
      const geometry::ChannelProfile profile = config.make_profile(row.epsilon);
      row.tau = compute_tau(profile, config.nx, config.ny, config.make_request(1),
                            config.kappa);
      row.m = geometry::m_eps(profile, config.kappa);
      const geometry::PerturbedDomain chan = geometry::PerturbedDomain::channel_only(profile);
      row.excess = geometry::measure_excess(chan);
      row.distance = geometry::domain_distance(chan);
      row.lambda0 = lambda0;
      const geometry::PerturbedDomain dumb =
          geometry::PerturbedDomain::dumbbell(profile, config.height);
      const DumbbellSpectrum ds = dumbbell_spectrum(dumb, config.k, config.h_base,
                                                    config.nx, config.ny,
                                                    config.make_request(config.k));
      row.lambda = ds.values;
      row.d.assign(static_cast<size_t>(config.k), kNaN);
      for (int n = 1; n <= config.k; ++n) {
        try {
          ensure_simple(ds.values, n);
          ensure_simple(base_res.values, n);
          row.d[static_cast<size_t>(n - 1)] = eigenfunction_distance(
              ds.vectors.col(n - 1), base_res.vectors.col(n - 1), ds.assembly);
        } catch (const DegeneracyError& e) {
          if (!row.note.empty()) row.note += "; ";
          row.note += "d_" + std::to_string(n) + ": " + e.what();
        }
      }
    } catch (const std::exception& e) {
      if (!row.note.empty()) row.note += "; ";
      row.note += e.what();
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || grid.size() == 1) {
    for (size_t i = 0; i < grid.size(); ++i) run_row(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const size_t nthreads = std::min<size_t>(static_cast<size_t>(jobs), grid.size());
    for (size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= report.rows.size()) return;
          run_row(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  std::vector<double> xs, ys;
  for (const SweepRow& row : report.rows)
    if (std::isfinite(row.tau.extrapolated) && row.note.empty()) {
      xs.push_back(1.0 / row.epsilon);
      ys.push_back(row.tau.extrapolated);
    }
  if (xs.size() >= 2) {
    const auto [b, a] = ols_fit(xs, ys);
    report.fit_intercept = b;
    report.fit_slope = a;
  } else {
    report.fit_intercept = kNaN;
    report.fit_slope = kNaN;
  }
  return report;
}

}  // namespace neulap::spectral
