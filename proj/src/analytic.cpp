#include "neulap/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "neulap/errors.hpp"

namespace neulap::analytic {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> rect_eigs(double a, double b, int k, int first_index) {
  if (a <= 0.0 || b <= 0.0) throw ParameterError("rectangle sides must be positive");
  if (k < 1) throw ParameterError("k must be >= 1");
  const double ia = kPi * kPi / (a * a), ib = kPi * kPi / (b * b);
  int mm = 8;
  for (;;) {
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>((mm + 1) * (mm + 1)));
    for (int m = first_index; m <= mm; ++m)
      for (int n = first_index; n <= mm; ++n)
        vals.push_back(ia * m * m + ib * n * n);
    std::sort(vals.begin(), vals.end());
    if (static_cast<int>(vals.size()) >= k) {
      // complete iff no excluded index pair could beat the k-th value
      const double next_band = std::min(ia, ib) * (mm + 1.0) * (mm + 1.0);
      if (vals[static_cast<size_t>(k - 1)] <= next_band) {
        vals.resize(static_cast<size_t>(k));
        return vals;
      }
    }
    mm *= 2;
  }
}

}  // namespace

std::vector<double> rect_neumann_eigs(double a, double b, int k) {
  return rect_eigs(a, b, k, 0);
}

std::vector<double> rect_dirichlet_eigs(double a, double b, int k) {
  return rect_eigs(a, b, k, 1);
}

double const_channel_tau(double L) {
  if (L <= 0.0) throw ParameterError("L must be positive");
  return (kPi / (2.0 * L)) * (kPi / (2.0 * L));
}

RobinEigenvalue robin_interval_lambda(double eta) {
  if (eta < 0.0) throw ParameterError("eta must be >= 0");
  RobinEigenvalue r;
  r.eta = eta;
  if (eta == 0.0) return r;
  const double hi0 = (kPi / 2.0) * (kPi / 2.0) - 1e-9;
  auto f = [eta](double lam) {
    const double x = std::sqrt(lam);
    return x * std::tan(x) - eta;
  };
  double lo = 0.0, hi = hi0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  r.lambda = 0.5 * (lo + hi);
  return r;
}

int robin_limit_ratio(int N) {
  if (N < 2) throw ParameterError("N must be >= 2");
  return N - 1;
}

}  // namespace neulap::analytic
