#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "neulap/analytic.hpp"
#include "neulap/assembly.hpp"
#include "neulap/config.hpp"
#include "neulap/domain.hpp"
#include "neulap/eigensolve.hpp"

namespace neulap::spectral {

struct TauResult {
  double epsilon = 0.0;
  double tau = 0.0;  // fine-level eigenvalue
  double lower_bound = 0.0;
  double crude_floor = 0.0;   // NaN when not applicable
  double upper_bound_if_applicable = 0.0;  // NaN unless g nondecreasing
  std::array<double, 2> mesh_levels{0.0, 0.0};  // coarse, fine
  double extrapolated = 0.0;
  bool solver_converged = true;

  double margin() const;  // 2 |fine - coarse|, the discretization allowance
};

// smallest mapped-channel eigenvalue, Dirichlet on gamma0 (and gammaL for the
// two-Dirichlet variant); solved at (nx, ny) and (2nx, 2ny), order-2 Richardson
TauResult compute_tau(const geometry::ChannelProfile& profile, int nx, int ny,
                      const eigs::EigenRequest& req, double kappa = 0.6);
TauResult compute_tau_two_dirichlet(const geometry::ChannelProfile& profile, int nx, int ny,
                                    const eigs::EigenRequest& req, double kappa = 0.6);

struct BracketingSplit {
  enum class Kind { SplitAtInterior, MonotoneDecreasing, MonotoneIncreasingMirrored };
  Kind kind = Kind::MonotoneDecreasing;
  double L_star = 0.0;  // meaningful for SplitAtInterior (base coordinate)
  geometry::ChannelProfile sub0, sub1;  // second branch mirrored onto gamma0
};

// locate the unique zero of gamma' for strictly convex gamma (bisection to 1e-10)
// and return the two sub-channels; monotone profiles yield the no-split markers
BracketingSplit bracketing_split(const geometry::ChannelProfile& profile);

struct DumbbellSpectrum {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // reduced dof basis of assembly.forms
  fem::DumbbellAssembly assembly;
  eigs::EigenResult raw;
};

DumbbellSpectrum dumbbell_spectrum(const geometry::PerturbedDomain& domain, int k,
                                   double h_base, int nx, int ny,
                                   const eigs::EigenRequest& req);

// throws DegeneracyError when values[n-1] sits within 5% relative of a neighbor
void ensure_simple(const std::vector<double>& values, int n);

// || phi_eps - s phi_0 ||_H1(Omega_0) + || phi_eps ||_H1(channel), s in {+1,-1}
// minimizing; vec_eps lives in the reduced dof basis of meshes.forms, vec_0 on the
// base mesh nodes; both norms via the assembled K+M forms
double eigenfunction_distance(const Eigen::VectorXd& vec_eps, const Eigen::VectorXd& vec_0,
                              const fem::DumbbellAssembly& meshes);

// first k Dirichlet eigenvalues of the oscillating domain at one mesh level
std::vector<double> dirichlet_example_spectrum(double a, double eps, int k, int nx, int ny,
                                               const eigs::EigenRequest& req);

struct SweepRow {
  double epsilon = 0.0;
  TauResult tau;
  double m = 0.0;  // m_eps
  double excess = 0.0;
  double distance = 0.0;
  std::vector<double> lambda;   // dumbbell spectrum
  std::vector<double> lambda0;  // analytic base spectrum
  std::vector<double> d;        // eigenfunction distances (NaN where unavailable)
  std::string note;             // per-row error note; empty when clean
};

struct SpectralReport {
  std::vector<SweepRow> rows;  // epsilon descending
  double fit_slope = 0.0;      // tau_extrapolated against 1/epsilon
  double fit_intercept = 0.0;
};

SpectralReport convergence_sweep(const cli::ExperimentConfig& config, int jobs = 1);

std::pair<double, double> ols_fit(const std::vector<double>& x,
                                  const std::vector<double>& y);  // {intercept, slope}

double richardson2(double coarse, double fine);

}  // namespace neulap::spectral
