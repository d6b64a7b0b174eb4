#include "neulap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace neulap::geometry {

namespace {

// value and first two derivatives of sum c_k p^k at p
struct Poly2 {
  double v, d1, d2;
};

Poly2 eval_poly(const std::vector<double>& c, double p) {
  Poly2 r{0.0, 0.0, 0.0};
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    r.d2 = r.d2 * p + 2.0 * r.d1;
    r.d1 = r.d1 * p + r.v;
    r.v = r.v * p + c[static_cast<size_t>(k)];
  }
  return r;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

}  // namespace

double ChannelProfile::gamma(double t) const {
  if (family != ProfileFamily::GammaPoly)
    throw HypothesisError("gamma is defined only for the gamma-poly family");
  const double u = off + sgn * t;
  return eval_poly(coeffs, L0 - u).v;
}

double ChannelProfile::dgamma(double t) const {
  if (family != ProfileFamily::GammaPoly)
    throw HypothesisError("gamma is defined only for the gamma-poly family");
  const double u = off + sgn * t;
  return -sgn * eval_poly(coeffs, L0 - u).d1;
}

double ChannelProfile::ddgamma(double t) const {
  if (family != ProfileFamily::GammaPoly)
    throw HypothesisError("gamma is defined only for the gamma-poly family");
  const double u = off + sgn * t;
  return eval_poly(coeffs, L0 - u).d2;
}

double ChannelProfile::g(double s) const {
  const double t = s / rho;
  const double u = off + sgn * t;
  if (family == ProfileFamily::GammaPoly) {
    const double ga = eval_poly(coeffs, L0 - u).v;
    if (!(ga > 0.0))
      throw HypothesisError("gamma(s) <= 0 at s = " + fmt(s) + "; width undefined");
    return rho * std::pow(ga, 1.0 / eps);
  }
  return rho * eval_poly(coeffs, u).v;
}

double ChannelProfile::dg(double s) const {
  const double t = s / rho;
  const double u = off + sgn * t;
  if (family == ProfileFamily::GammaPoly) {
    const Poly2 P = eval_poly(coeffs, L0 - u);
    if (!(P.v > 0.0))
      throw HypothesisError("gamma(s) <= 0 at s = " + fmt(s) + "; width undefined");
    const double gdt = -sgn * P.d1;  // d gamma / dt
    return (1.0 / eps) * std::pow(P.v, 1.0 / eps - 1.0) * gdt;
  }
  return sgn * eval_poly(coeffs, u).d1;
}

double ChannelProfile::ddg(double s) const {
  const double t = s / rho;
  const double u = off + sgn * t;
  if (family == ProfileFamily::GammaPoly) {
    const Poly2 P = eval_poly(coeffs, L0 - u);
    if (!(P.v > 0.0))
      throw HypothesisError("gamma(s) <= 0 at s = " + fmt(s) + "; width undefined");
    const double gdt = -sgn * P.d1;
    const double gddt = P.d2;
    const double ie = 1.0 / eps;
    return ie * ((ie - 1.0) * std::pow(P.v, ie - 2.0) * gdt * gdt +
                 std::pow(P.v, ie - 1.0) * gddt) / rho;
  }
  return eval_poly(coeffs, u).d2 / rho;
}

ChannelProfile gamma_poly_profile(std::vector<double> coeffs, double L, double eps, int dim) {
  if (L <= 0.0) throw ParameterError("profile length must be positive");
  if (eps <= 0.0) throw ParameterError("epsilon must be positive");
  if (dim < 2) throw ParameterError("dimension N must be >= 2");
  if (coeffs.empty()) throw ParameterError("profile needs at least one coefficient");
  ChannelProfile p;
  p.family = ProfileFamily::GammaPoly;
  p.coeffs = std::move(coeffs);
  p.L0 = L;
  p.eps = eps;
  p.dim = dim;
  return p;
}

ChannelProfile width_poly_profile(std::vector<double> coeffs, double L, int dim) {
  if (L <= 0.0) throw ParameterError("profile length must be positive");
  if (dim < 2) throw ParameterError("dimension N must be >= 2");
  if (coeffs.empty()) throw ParameterError("profile needs at least one coefficient");
  ChannelProfile p;
  p.family = ProfileFamily::WidthPoly;
  p.coeffs = std::move(coeffs);
  p.L0 = L;
  p.dim = dim;
  return p;
}

bool profile_nondecreasing(const ChannelProfile& p) {
  const int n = 4096;
  const double L = p.length();
  const double g0 = p.g(0.0);
  for (int i = 0; i <= n; ++i) {
    const double s = L * static_cast<double>(i) / n;
    if (p.g(s) < g0 - 1e-12 * (1.0 + std::abs(g0))) return false;
  }
  return true;
}

HypothesisReport check_hypotheses(const ChannelProfile& profile) {
  if (profile.family != ProfileFamily::GammaPoly)
    throw HypothesisError("hypotheses apply to the gamma-poly family only");
  const int n = 10000;
  const double T = profile.base_length();
  HypothesisReport rep;
  rep.alpha0 = std::numeric_limits<double>::infinity();
  rep.alpha1 = -std::numeric_limits<double>::infinity();
  rep.alpha2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double t = T * static_cast<double>(i) / n;
    const double ga = profile.gamma(t);
    const double gdd = profile.ddgamma(t);
    if (!std::isfinite(ga) || !std::isfinite(gdd))
      throw HypothesisError("non-finite gamma evaluation at s = " + std::to_string(t));
    rep.alpha0 = std::min(rep.alpha0, ga);
    rep.alpha1 = std::max(rep.alpha1, ga);
    rep.alpha2 = std::min(rep.alpha2, gdd);
  }
  rep.gamma_dot_at_L = profile.dgamma(T);
  if (!std::isfinite(rep.gamma_dot_at_L))
    throw HypothesisError("non-finite gamma derivative at s = " + std::to_string(T));
  rep.bounds_ok = rep.alpha0 > 0.0 && rep.alpha1 < 1.0;
  rep.end_slope_ok = rep.gamma_dot_at_L <= 0.0;
  rep.convex_ok = rep.alpha2 > 0.0;
  return rep;
}

namespace {

double m_expression(const ChannelProfile& p, double kappa, double s) {
  const double g = p.g(s);
  const double r1 = p.dg(s) / g;
  return p.ddg(s) / g - kappa * r1 * r1;
}

}  // namespace

double m_eps(const ChannelProfile& profile, double kappa) {
  if (kappa >= 1.0) throw ParameterError("kappa must be < 1");
  const int n = 10000;
  const double L = profile.length();
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double s = L * static_cast<double>(i) / n;
    const double v = m_expression(profile, kappa, s);
    if (!std::isfinite(v))
      throw HypothesisError("non-finite width evaluation at s = " + std::to_string(s));
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  // golden-section refinement in the bracket around the grid minimizer
  double a = L * static_cast<double>(std::max(0, best_i - 1)) / n;
  double b = L * static_cast<double>(std::min(n, best_i + 1)) / n;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = m_expression(profile, kappa, x1);
  double f2 = m_expression(profile, kappa, x2);
  while (b - a > 1e-12 * (1.0 + L)) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = m_expression(profile, kappa, x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = m_expression(profile, kappa, x2);
    }
  }
  return std::min(best, std::min(f1, f2));
}

TauBounds tau_lower_bound(const ChannelProfile& profile, double kappa) {
  TauBounds tb;
  const double half_nm1 = 0.5 * (profile.dim - 1);
  tb.bound = half_nm1 * m_eps(profile, kappa);
  tb.crude_applicable = false;
  tb.crude_floor = std::numeric_limits<double>::quiet_NaN();
  if (profile.family == ProfileFamily::GammaPoly && profile.eps <= 1.0 - kappa) {
    const HypothesisReport rep = check_hypotheses(profile);
    if (rep.all()) {
      tb.crude_floor =
          half_nm1 * (rep.alpha2 / rep.alpha0) / profile.eps / (profile.rho * profile.rho);
      tb.crude_applicable = true;
    }
  }
  return tb;
}

double tau_upper_bound_nondecreasing(double L) {
  if (L <= 0.0) throw ParameterError("L must be positive");
  const double pi = 3.14159265358979323846;
  return (pi / (2.0 * L)) * (pi / (2.0 * L));
}

ChannelProfile scale_channel(const ChannelProfile& profile, double rho) {
  if (rho <= 0.0) throw ParameterError("scale factor rho must be positive");
  ChannelProfile p = profile;
  p.rho = profile.rho * rho;
  return p;
}

}  // namespace neulap::geometry
