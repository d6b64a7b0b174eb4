#pragma once

#include <vector>

namespace neulap::analytic {

// first k values of {pi^2 (m^2/a^2 + n^2/b^2)}, m,n >= 0, sorted with multiplicity
std::vector<double> rect_neumann_eigs(double a, double b, int k);

// same with m,n >= 1
std::vector<double> rect_dirichlet_eigs(double a, double b, int k);

// (pi/(2L))^2, the quarter-wave channel mode for constant width
double const_channel_tau(double L);

struct RobinEigenvalue {
  double eta = 0.0;
  double lambda = 0.0;
  int dimension_N = 2;
};

// smallest root of sqrt(l)*tan(sqrt(l)) = eta on [0, (pi/2)^2), bisection to 1e-12;
// the cross-section interval is (-1,1)
RobinEigenvalue robin_interval_lambda(double eta);

// |S1|/|B1| = N-1
int robin_limit_ratio(int N);

}  // namespace neulap::analytic
