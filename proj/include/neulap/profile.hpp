#pragma once

#include <string>
#include <vector>

#include "neulap/errors.hpp"

namespace neulap::geometry {

enum class ProfileFamily { GammaPoly, WidthPoly };

// Channel half-width profile g(s) on s in [0, length()].
//
// GammaPoly: g(s) = rho * gamma(t)^(1/eps) with t = s/rho and gamma a polynomial
//            in powers of (L0 - u), u = off + sgn*t.  This is the decaying family
//            whose hypotheses (bounds, end slope, convexity) drive the tau bounds.
// WidthPoly: g(s) = rho * w(t), w a polynomial in powers of u = off + sgn*t.
//            Used for constant and linearly increasing channels.
//
// off/sgn give an affine reparametrization of the base coordinate (sub-channels
// from the bracketing split, including the mirrored branch); rho is the geometric
// scale factor (rho*R: length rho*L, width rho*g(s/rho)).
struct ChannelProfile {
  ProfileFamily family = ProfileFamily::GammaPoly;
  std::vector<double> coeffs = {0.3, 0.0, 0.2};
  double L0 = 1.0;       // base interval length of the coefficient basis
  double eps = 0.25;     // exponent parameter (GammaPoly); recorded for sweeps
  int dim = 2;           // ambient dimension N >= 2
  double off = 0.0;
  double sgn = 1.0;
  double sub_len = -1.0; // base-coordinate length; < 0 means L0
  double rho = 1.0;

  double base_length() const { return sub_len < 0 ? L0 : sub_len; }
  double length() const { return rho * base_length(); }

  // width and s-derivatives, s in [0, length()]
  double g(double s) const;
  double dg(double s) const;
  double ddg(double s) const;

  // gamma and derivatives in the pre-scaling coordinate t in [0, base_length()]
  // (GammaPoly only)
  double gamma(double t) const;
  double dgamma(double t) const;
  double ddgamma(double t) const;
};

ChannelProfile gamma_poly_profile(std::vector<double> coeffs, double L, double eps, int dim = 2);
ChannelProfile width_poly_profile(std::vector<double> coeffs, double L, int dim = 2);

// g(s) >= g(0) for all s (checked on a dense grid); gates the trial-function upper bound
bool profile_nondecreasing(const ChannelProfile& p);

struct HypothesisReport {
  double alpha0 = 0.0;         // min gamma over the grid
  double alpha1 = 0.0;         // max gamma
  double alpha2 = 0.0;         // min gamma''
  double gamma_dot_at_L = 0.0;
  bool bounds_ok = false;      // 0 < alpha0 and alpha1 < 1
  bool end_slope_ok = false;   // gamma'(L) <= 0
  bool convex_ok = false;      // alpha2 > 0
  bool all() const { return bounds_ok && end_slope_ok && convex_ok; }
};

// Grid (>= 1e4 points) + endpoint scan of gamma, gamma', gamma''. GammaPoly only.
HypothesisReport check_hypotheses(const ChannelProfile& profile);

// inf over s in [0, length()] of  ddg/g - kappa*(dg/g)^2,
// grid of >= 1e4 points refined by golden section around the grid minimizer.
double m_eps(const ChannelProfile& profile, double kappa);

struct TauBounds {
  double bound = 0.0;        // (N-1)/2 * m_eps
  double crude_floor = 0.0;  // (N-1)/2 * (alpha2/alpha0)/eps, when applicable
  bool crude_applicable = false;
};

TauBounds tau_lower_bound(const ChannelProfile& profile, double kappa);

// pi^2/(2L)^2; valid as an upper bound for tau only when g(s) >= g(0) on [0, L]
double tau_upper_bound_nondecreasing(double L);

ChannelProfile scale_channel(const ChannelProfile& profile, double rho);

}  // namespace neulap::geometry
