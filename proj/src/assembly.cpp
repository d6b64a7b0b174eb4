#include "neulap/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "neulap/errors.hpp"

namespace neulap::fem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)
constexpr double kMinWidth = 1e-12;

// Accumulates the weighted forms
//   K += Int [ (u_x - (w'/w) t u_t)^2 + (1/w^2) u_t^2 ] w dx dt
//   M += Int u^2 w dx dt
// over an axis-aligned quad mesh; w == 1 gives the plain physical Laplacian.
void accumulate_weighted(const StructuredMesh& mesh,
                         const std::function<double(double)>& w,
                         const std::function<double(double)>& dw, int offset,
                         Triplets& tk, Triplets& tm) {
  const double gp[2] = {-kGauss, kGauss};
  for (const auto& q : mesh.quads) {
    const double x0 = mesh.nodes[static_cast<size_t>(q[0])][0];
    const double y0 = mesh.nodes[static_cast<size_t>(q[0])][1];
    const double x1 = mesh.nodes[static_cast<size_t>(q[2])][0];
    const double y1 = mesh.nodes[static_cast<size_t>(q[2])][1];
    const double hx = x1 - x0, hy = y1 - y0;
    const double jac = 0.25 * hx * hy;
    double ke[4][4] = {}, me[4][4] = {};
    for (double gx : gp) {
      const double x = x0 + 0.5 * hx * (gx + 1.0);
      const double wv = w(x);
      if (wv < kMinWidth) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "width %.3e below 1e-12 at quadrature point x=%.6g; "
                      "increase epsilon",
                      wv, x);
        throw ConditioningError(buf);
      }
      const double slope = dw(x) / wv;
      for (double gy : gp) {
        const double t = y0 + 0.5 * hy * (gy + 1.0);
        const double c = slope * t;
        // shapes in (ll, lr, ur, ul) order
        const double N[4] = {0.25 * (1 - gx) * (1 - gy), 0.25 * (1 + gx) * (1 - gy),
                             0.25 * (1 + gx) * (1 + gy), 0.25 * (1 - gx) * (1 + gy)};
        const double dNx[4] = {-0.25 * (1 - gy) * 2 / hx, 0.25 * (1 - gy) * 2 / hx,
                               0.25 * (1 + gy) * 2 / hx, -0.25 * (1 + gy) * 2 / hx};
        const double dNt[4] = {-0.25 * (1 - gx) * 2 / hy, -0.25 * (1 + gx) * 2 / hy,
                               0.25 * (1 + gx) * 2 / hy, 0.25 * (1 - gx) * 2 / hy};
        double u[4], v[4];
        for (int i = 0; i < 4; ++i) {
          u[i] = dNx[i] - c * dNt[i];
          v[i] = dNt[i];
        }
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            ke[i][j] += jac * (wv * u[i] * u[j] + v[i] * v[j] / wv);
            me[i][j] += jac * wv * N[i] * N[j];
          }
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        tk.emplace_back(offset + q[i], offset + q[j], ke[i][j]);
        tm.emplace_back(offset + q[i], offset + q[j], me[i][j]);
      }
  }
}

SpMat from_triplets(int n, const Triplets& t) {
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SpMat symmetrized(const SpMat& A) {
  SpMat At = SpMat(A.transpose());
  return 0.5 * (A + At);
}

// reduce full forms through the expansion operator T: K = T^t K_f T
void reduce_through(AssembledForms& f, const SpMat& kf, const SpMat& mf, const SpMat& T) {
  const SpMat Tt = SpMat(T.transpose());
  f.K = symmetrized(SpMat(Tt * kf * T));
  f.M = symmetrized(SpMat(Tt * mf * T));
  f.expand = T;
}

std::vector<std::uint8_t> mask_from_tags(const StructuredMesh& mesh,
                                         std::initializer_list<BoundaryTag> tags) {
  std::vector<std::uint8_t> mask(mesh.nodes.size(), 0);
  for (const auto& e : mesh.boundary)
    for (BoundaryTag t : tags)
      if (e.tag == t) {
        mask[static_cast<size_t>(e.a)] = 1;
        mask[static_cast<size_t>(e.b)] = 1;
      }
  return mask;
}

AssembledForms reduce_dirichlet(const StructuredMesh& mesh, const Triplets& tk,
                                const Triplets& tm, std::vector<std::uint8_t> mask) {
  AssembledForms f;
  f.n_nodes = static_cast<int>(mesh.nodes.size());
  f.dirichlet_mask = std::move(mask);
  f.dof_map.assign(static_cast<size_t>(f.n_nodes), -1);
  int ndof = 0;
  for (int i = 0; i < f.n_nodes; ++i)
    if (!f.dirichlet_mask[static_cast<size_t>(i)]) f.dof_map[static_cast<size_t>(i)] = ndof++;
  f.dirichlet_active = ndof < f.n_nodes;
  Triplets tt;
  tt.reserve(static_cast<size_t>(ndof));
  for (int i = 0; i < f.n_nodes; ++i)
    if (f.dof_map[static_cast<size_t>(i)] >= 0)
      tt.emplace_back(i, f.dof_map[static_cast<size_t>(i)], 1.0);
  SpMat T(f.n_nodes, ndof);
  T.setFromTriplets(tt.begin(), tt.end());
  reduce_through(f, from_triplets(f.n_nodes, tk), from_triplets(f.n_nodes, tm), T);
  return f;
}

}  // namespace

AssembledForms assemble_mapped_channel_forms(const StructuredMesh& mesh,
                                             const geometry::ChannelProfile& profile,
                                             bool dirichlet_gammaL) {
  Triplets tk, tm;
  tk.reserve(mesh.quads.size() * 16);
  tm.reserve(mesh.quads.size() * 16);
  accumulate_weighted(
      mesh, [&profile](double s) { return profile.g(s); },
      [&profile](double s) { return profile.dg(s); }, 0, tk, tm);
  auto mask = dirichlet_gammaL
                  ? mask_from_tags(mesh, {BoundaryTag::Gamma0, BoundaryTag::GammaL})
                  : mask_from_tags(mesh, {BoundaryTag::Gamma0});
  return reduce_dirichlet(mesh, tk, tm, std::move(mask));
}

AssembledForms assemble_rect_forms(const StructuredMesh& mesh, bool dirichlet_all) {
  Triplets tk, tm;
  tk.reserve(mesh.quads.size() * 16);
  tm.reserve(mesh.quads.size() * 16);
  accumulate_weighted(
      mesh, [](double) { return 1.0; }, [](double) { return 0.0; }, 0, tk, tm);
  auto mask = dirichlet_all
                  ? mask_from_tags(mesh, {BoundaryTag::Gamma0, BoundaryTag::GammaL,
                                          BoundaryTag::Lateral, BoundaryTag::Outer,
                                          BoundaryTag::Interface})
                  : std::vector<std::uint8_t>(mesh.nodes.size(), 0);
  return reduce_dirichlet(mesh, tk, tm, std::move(mask));
}

AssembledForms build_oscillating_forms(double a, double eps, int nx, int ny,
                                       StructuredMesh* mesh_out) {
  if (a < 0.0) throw ParameterError("amplitude a must be >= 0");
  if (eps <= 0.0) throw ParameterError("epsilon must be positive");
  StructuredMesh mesh = build_rect_mesh(0.0, 1.0, 0.0, 1.0, nx, ny, BoundaryTag::Outer);
  Triplets tk, tm;
  tk.reserve(mesh.quads.size() * 16);
  tm.reserve(mesh.quads.size() * 16);
  accumulate_weighted(
      mesh, [a, eps](double x) { return 1.0 + a * (1.0 + std::sin(x / eps)); },
      [a, eps](double x) { return (a / eps) * std::cos(x / eps); }, 0, tk, tm);
  auto f = reduce_dirichlet(mesh, tk, tm, mask_from_tags(mesh, {BoundaryTag::Outer}));
  if (mesh_out) *mesh_out = std::move(mesh);
  return f;
}

AssembledForms build_base_forms(double height, double h_base, StructuredMesh* mesh_out) {
  if (height <= 0.0 || h_base <= 0.0) throw ParameterError("height and h_base must be positive");
  const int nbx = std::max(4, static_cast<int>(std::lround(1.0 / h_base)));
  const int nby = std::max(4, static_cast<int>(std::lround(height / h_base)));
  StructuredMesh mesh =
      build_rect_mesh(-1.0, 0.0, -0.5 * height, 0.5 * height, nbx, nby, BoundaryTag::Outer);
  auto f = assemble_rect_forms(mesh, false);
  if (mesh_out) *mesh_out = std::move(mesh);
  return f;
}

DumbbellAssembly build_dumbbell_forms(const geometry::PerturbedDomain& domain,
                                      double h_base, int nx, int ny) {
  using geometry::DomainVariant;
  if (domain.variant != DomainVariant::DumbbellNeumann)
    throw ParameterError("dumbbell forms need the dumbbell-neumann variant");
  const geometry::ChannelProfile& prof = domain.channel;
  const double h = domain.height;
  const double g0 = prof.g(0.0);
  if (!(g0 < 0.5 * h))
    throw AssemblyError("channel mouth wider than the base edge: g(0) >= h/2");

  DumbbellAssembly D;
  D.base = build_base_forms(h, h_base, &D.base_mesh);
  D.channel_mesh = build_channel_mesh(prof, nx, ny);
  for (auto& e : D.channel_mesh.boundary)
    if (e.tag == BoundaryTag::Gamma0) e.tag = BoundaryTag::Interface;
  {
    Triplets tk, tm;
    tk.reserve(D.channel_mesh.quads.size() * 16);
    tm.reserve(D.channel_mesh.quads.size() * 16);
    accumulate_weighted(
        D.channel_mesh, [&prof](double s) { return prof.g(s); },
        [&prof](double s) { return prof.dg(s); }, 0, tk, tm);
    D.channel = reduce_dirichlet(
        D.channel_mesh, tk, tm,
        std::vector<std::uint8_t>(D.channel_mesh.nodes.size(), 0));
  }

  const int nb = static_cast<int>(D.base_mesh.nodes.size());
  const int nc = static_cast<int>(D.channel_mesh.nodes.size());
  D.base_nodes = nb;
  D.channel_nodes = nc;
  const int nfull = nb + nc;

  // block-diagonal full forms over the union numbering
  Triplets tk, tm;
  tk.reserve(static_cast<size_t>(16) * (D.base_mesh.quads.size() + D.channel_mesh.quads.size()));
  tm.reserve(tk.capacity());
  accumulate_weighted(
      D.base_mesh, [](double) { return 1.0; }, [](double) { return 0.0; }, 0, tk, tm);
  accumulate_weighted(
      D.channel_mesh, [&prof](double s) { return prof.g(s); },
      [&prof](double s) { return prof.dg(s); }, nb, tk, tm);

  // tie channel mouth nodes (reference column y1=0) to the base edge x=0:
  // physical height of mouth node j is g(0) * y2_j
  const int nbx = D.base_mesh.nx, nby = D.base_mesh.ny;
  const double hy_b = h / nby;
  Triplets tt;
  std::vector<int> dof_map(static_cast<size_t>(nfull), -1);
  for (int i = 0; i < nb; ++i) {
    dof_map[static_cast<size_t>(i)] = i;
    tt.emplace_back(i, i, 1.0);
  }
  int ndof = nb;
  for (int j = 0; j <= ny; ++j) {
    const int cidx = nb + D.channel_mesh.node_index(0, j);
    const double y = g0 * D.channel_mesh.nodes[static_cast<size_t>(D.channel_mesh.node_index(0, j))][1];
    const double theta = (y + 0.5 * h) / hy_b;
    if (!std::isfinite(theta) || theta < -1e-9 || theta > nby + 1e-9)
      throw AssemblyError("interface tie falls outside the base edge");
    int j0 = std::min(nby - 1, std::max(0, static_cast<int>(std::floor(theta))));
    const double w1 = theta - j0;
    const int lo = D.base_mesh.node_index(nbx, j0);
    const int hi = D.base_mesh.node_index(nbx, j0 + 1);
    if (w1 < 1e-12) {
      tt.emplace_back(cidx, lo, 1.0);
    } else if (w1 > 1.0 - 1e-12) {
      tt.emplace_back(cidx, hi, 1.0);
    } else {
      tt.emplace_back(cidx, lo, 1.0 - w1);
      tt.emplace_back(cidx, hi, w1);
    }
  }
  for (int j = 0; j <= ny; ++j)
    for (int i = 1; i <= nx; ++i) {
      const int cidx = nb + D.channel_mesh.node_index(i, j);
      dof_map[static_cast<size_t>(cidx)] = ndof;
      tt.emplace_back(cidx, ndof, 1.0);
      ++ndof;
    }
  SpMat T(nfull, ndof);
  T.setFromTriplets(tt.begin(), tt.end());

  D.forms.n_nodes = nfull;
  D.forms.dirichlet_mask.assign(static_cast<size_t>(nfull), 0);
  D.forms.dof_map = std::move(dof_map);
  D.forms.dirichlet_active = false;
  reduce_through(D.forms, from_triplets(nfull, tk), from_triplets(nfull, tm), T);

  for (int i = 0; i < D.forms.n(); ++i)
    if (!(D.forms.M.coeff(i, i) > 0.0))
      throw AssemblyError("interface tie produced a rank-deficient mass matrix");
  return D;
}

}  // namespace neulap::fem
