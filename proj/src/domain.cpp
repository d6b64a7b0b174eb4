#include "neulap/domain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace neulap::geometry {

PerturbedDomain PerturbedDomain::dumbbell(const ChannelProfile& profile, double h) {
  if (h <= 0.0) throw ParameterError("base height must be positive");
  if (!(profile.g(0.0) < 0.5 * h))
    throw ParameterError("channel mouth g(0) must be smaller than the base half-height");
  PerturbedDomain d;
  d.variant = DomainVariant::DumbbellNeumann;
  d.channel = profile;
  d.height = h;
  return d;
}

PerturbedDomain PerturbedDomain::channel_only(const ChannelProfile& profile) {
  PerturbedDomain d;
  d.variant = DomainVariant::ChannelMixed;
  d.channel = profile;
  return d;
}

PerturbedDomain PerturbedDomain::oscillating(double a, double eps) {
  if (a < 0.0) throw ParameterError("oscillation amplitude must be >= 0");
  if (eps <= 0.0) throw ParameterError("oscillation epsilon must be positive");
  PerturbedDomain d;
  d.variant = DomainVariant::DirichletOscillating;
  d.amplitude = a;
  d.osc_eps = eps;
  return d;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double rtol,
                        double scale, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * rtol * scale)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, rtol, scale, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, rtol, scale, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rtol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, b, fa, fm, fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, rtol, scale, 48);
}

}  // namespace

double measure_excess(const PerturbedDomain& domain) {
  if (domain.variant == DomainVariant::DirichletOscillating) {
    const double a = domain.amplitude, e = domain.osc_eps;
    return integrate([a, e](double x) { return a * (1.0 + std::sin(x / e)); }, 0.0, 1.0,
                     1e-10);
  }
  const ChannelProfile& p = domain.channel;
  return integrate([&p](double s) { return 2.0 * p.g(s); }, 0.0, p.length(), 1e-10);
}

double domain_distance(const PerturbedDomain& domain) {
  if (domain.variant == DomainVariant::DirichletOscillating) {
    // farthest points of Omega_eps from Omega_0 = (0,1)x(-1,0) lie on the top
    // boundary y = a(1+sin(x/eps)); their distance is max(0, y)
    const double a = domain.amplitude, e = domain.osc_eps;
    const int n = 100000;
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      best = std::max(best, a * (1.0 + std::sin(x / e)));
    }
    return best;
  }
  // channel points reach x1 = L
  return domain.channel.length();
}

}  // namespace neulap::geometry
