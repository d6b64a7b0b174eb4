#include "doctest.h"

#include <cmath>
#include <vector>

#include "neulap/domain.hpp"
#include "neulap/profile.hpp"
#include "oracles.hpp"

using namespace neulap;
using geometry::ChannelProfile;
using geometry::gamma_poly_profile;
using geometry::width_poly_profile;

namespace {

ChannelProfile reference_profile(double eps) {
  // gamma(s) = 0.3 + 0.2 (1-s)^2, strictly decaying width
  return gamma_poly_profile({0.3, 0.0, 0.2}, 1.0, eps);
}

// closed-form m(s) for the gamma-poly family, derived by hand from
// g = gamma^(1/eps):  m = (1/eps) gamma''/gamma + (gamma'/gamma)^2 (1-eps-kappa)/eps^2
double m_closed_form(double s, double eps, double kappa) {
  const double p = 1.0 - s;
  const double ga = 0.3 + 0.2 * p * p;
  const double gd = -0.4 * p;  // d gamma / ds
  const double gdd = 0.4;
  return gdd / (ga * eps) + (gd / ga) * (gd / ga) * (1.0 - eps - kappa) / (eps * eps);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("profile factories validate their arguments") {
  CHECK_THROWS_AS(gamma_poly_profile({0.3}, 0.0, 0.25), ParameterError);
  CHECK_THROWS_AS(gamma_poly_profile({0.3}, 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(gamma_poly_profile({0.3}, 1.0, 0.25, 1), ParameterError);
  CHECK_THROWS_AS(gamma_poly_profile({}, 1.0, 0.25), ParameterError);
  CHECK_THROWS_AS(width_poly_profile({}, 1.0), ParameterError);
  CHECK_THROWS_AS(width_poly_profile({0.05}, -1.0), ParameterError);
}

TEST_CASE("width and derivatives match the closed forms") {
  const ChannelProfile p = reference_profile(0.25);
  for (double s : {0.0, 0.1, 0.45, 0.9, 1.0}) {
    const double ga = 0.3 + 0.2 * (1.0 - s) * (1.0 - s);
    CHECK(p.g(s) == doctest::Approx(std::pow(ga, 4.0)).epsilon(1e-13));
  }
  // finite differences against dg, ddg
  const double h = 1e-6;
  for (double s : {0.1, 0.45, 0.9}) {
    const double fd1 = (p.g(s + h) - p.g(s - h)) / (2.0 * h);
    const double fd2 = (p.g(s + h) - 2.0 * p.g(s) + p.g(s - h)) / (h * h);
    CHECK(p.dg(s) == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(p.ddg(s) == doctest::Approx(fd2).epsilon(1e-4));
  }
  const ChannelProfile w = width_poly_profile({0.05, 0.02, 0.01}, 1.0);
  for (double s : {0.0, 0.3, 1.0})
    CHECK(w.g(s) == doctest::Approx(0.05 + 0.02 * s + 0.01 * s * s).epsilon(1e-14));
  CHECK(w.dg(0.3) == doctest::Approx(0.02 + 0.02 * 0.3).epsilon(1e-13));
  CHECK(w.ddg(0.3) == doctest::Approx(0.02).epsilon(1e-13));
  // gamma accessors are reserved for the decaying family
  CHECK_THROWS_AS(w.gamma(0.5), HypothesisError);
}

TEST_CASE("hypothesis report for the reference profile") {
  const auto rep = geometry::check_hypotheses(reference_profile(0.25));
  CHECK(rep.alpha0 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rep.alpha1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.alpha2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(rep.gamma_dot_at_L == 0.0);
  CHECK(rep.bounds_ok);
  CHECK(rep.end_slope_ok);
  CHECK(rep.convex_ok);
  CHECK(rep.all());
}

TEST_CASE("hypothesis failures are reported per condition") {
  // gamma reaches 1.1 > 1
  const auto too_wide = geometry::check_hypotheses(gamma_poly_profile({0.5, 0.0, 0.6}, 1.0, 0.25));
  CHECK_FALSE(too_wide.bounds_ok);
  CHECK(too_wide.convex_ok);
  CHECK_FALSE(too_wide.all());
  // gamma'(L) = +0.1 > 0
  const auto bad_slope =
      geometry::check_hypotheses(gamma_poly_profile({0.3, -0.1, 0.2}, 1.0, 0.25));
  CHECK_FALSE(bad_slope.end_slope_ok);
  CHECK(bad_slope.bounds_ok);
  // gamma'' = -0.1 < 0
  const auto concave =
      geometry::check_hypotheses(gamma_poly_profile({0.3, 0.0, -0.05}, 1.0, 0.25));
  CHECK_FALSE(concave.convex_ok);
  CHECK(concave.bounds_ok);
  // hypotheses only make sense for the decaying family
  CHECK_THROWS_AS(geometry::check_hypotheses(width_poly_profile({0.05}, 1.0)), HypothesisError);
  // gamma crosses zero: the width itself is undefined there
  const ChannelProfile bad = gamma_poly_profile({0.1, 0.0, -0.2}, 1.0, 0.25);
  CHECK_THROWS_AS(geometry::m_eps(bad, 0.6), HypothesisError);
  CHECK(oracle::throws_with<HypothesisError>([&] { (void)bad.g(0.1); }, "gamma"));
}

TEST_CASE("m_eps matches hand-computed minima") {
  CHECK_THROWS_AS(geometry::m_eps(reference_profile(0.25), 1.0), ParameterError);
  // frozen values: minimizer at s=0 for eps=0.5/0.25, at s=L for eps=0.125
  CHECK(geometry::m_eps(reference_profile(0.5), 0.6) == doctest::Approx(1.344).epsilon(1e-9));
  CHECK(geometry::m_eps(reference_profile(0.25), 0.6) == doctest::Approx(4.736).epsilon(1e-9));
  CHECK(geometry::m_eps(reference_profile(0.125), 0.6) ==
        doctest::Approx(32.0 / 3.0).epsilon(1e-9));
  // and against a dense scan of the closed form
  for (double eps : {0.5, 0.35, 0.25, 0.18, 0.125}) {
    double best = m_closed_form(0.0, eps, 0.6);
    for (int i = 1; i <= 20000; ++i)
      best = std::min(best, m_closed_form(i / 20000.0, eps, 0.6));
    CHECK(geometry::m_eps(reference_profile(eps), 0.6) == doctest::Approx(best).epsilon(1e-8));
  }
}

TEST_CASE("eps * m_eps approaches the curvature ratio alpha2/alpha0") {
  // for small eps the minimizer sits at s = L where m = gamma''(L)/(eps gamma(L))
  for (double eps : {0.2, 0.125, 0.0625}) {
    const double prod = eps * geometry::m_eps(reference_profile(eps), 0.6);
    CHECK(prod == doctest::Approx(4.0 / 3.0).epsilon(0.05));
  }
}

TEST_CASE("m_eps dominates the alpha2/alpha1 floor when eps <= 1 - kappa") {
  for (double eps : {0.4, 0.25, 0.125}) {
    const auto rep = geometry::check_hypotheses(reference_profile(eps));
    const double floor = (rep.alpha2 / rep.alpha1) / eps;
    CHECK(geometry::m_eps(reference_profile(eps), 0.6) >= floor * (1.0 - 1e-12));
  }
}

TEST_CASE("tau lower bound and crude floor applicability") {
  const auto tb = geometry::tau_lower_bound(reference_profile(0.25), 0.6);
  CHECK(tb.bound == doctest::Approx(0.5 * 4.736).epsilon(1e-9));
  CHECK(tb.crude_applicable);
  // (N-1)/2 * (alpha2/alpha0)/eps = 0.5 * (4/3)/0.25
  CHECK(tb.crude_floor == doctest::Approx(8.0 / 3.0).epsilon(1e-9));
  // eps = 0.5 > 1 - kappa = 0.4: floor not applicable
  const auto tb2 = geometry::tau_lower_bound(reference_profile(0.5), 0.6);
  CHECK_FALSE(tb2.crude_applicable);
  CHECK(std::isnan(tb2.crude_floor));
  // width-poly family never qualifies for the floor
  const auto tb3 = geometry::tau_lower_bound(width_poly_profile({0.05}, 1.0), 0.6);
  CHECK_FALSE(tb3.crude_applicable);
  CHECK(tb3.bound == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nondecreasing width detector") {
  CHECK(geometry::profile_nondecreasing(width_poly_profile({0.05}, 1.0)));
  CHECK(geometry::profile_nondecreasing(width_poly_profile({0.05, 0.05}, 1.0)));
  CHECK_FALSE(geometry::profile_nondecreasing(reference_profile(0.25)));
}

TEST_CASE("trial-function upper bound constant") {
  const double pi = 3.14159265358979323846;
  CHECK(geometry::tau_upper_bound_nondecreasing(1.0) ==
        doctest::Approx(pi * pi / 4.0).epsilon(1e-15));
  CHECK(geometry::tau_upper_bound_nondecreasing(0.5) == doctest::Approx(pi * pi).epsilon(1e-15));
  CHECK_THROWS_AS(geometry::tau_upper_bound_nondecreasing(0.0), ParameterError);
}

TEST_CASE("scaling a channel multiplies widths and lengths by rho") {
  const ChannelProfile p = reference_profile(0.25);
  CHECK_THROWS_AS(geometry::scale_channel(p, 0.0), ParameterError);
  const ChannelProfile same = geometry::scale_channel(p, 1.0);
  const ChannelProfile two = geometry::scale_channel(p, 2.0);
  CHECK(two.length() == doctest::Approx(2.0).epsilon(1e-15));
  for (double s : {0.0, 0.3, 0.7, 1.0}) {
    CHECK(same.g(s) == doctest::Approx(p.g(s)).epsilon(1e-15));
    CHECK(two.g(2.0 * s) == doctest::Approx(2.0 * p.g(s)).epsilon(1e-13));
    CHECK(two.dg(2.0 * s) == doctest::Approx(p.dg(s)).epsilon(1e-13));
  }
  // composition: scaling by 2 then 5 equals scaling by 10
  const ChannelProfile ten = geometry::scale_channel(geometry::scale_channel(p, 2.0), 5.0);
  CHECK(ten.length() == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(ten.g(5.0) == doctest::Approx(10.0 * p.g(0.5)).epsilon(1e-13));
}

TEST_CASE("measure excess of the channel attachment") {
  // eps = 0.5: integral of 2 gamma^2 has the exact value 0.276
  const auto d5 = geometry::PerturbedDomain::channel_only(reference_profile(0.5));
  CHECK(geometry::measure_excess(d5) == doctest::Approx(0.276).epsilon(1e-10));
  // eps = 0.125: binomial expansion of 2 int (0.3 + 0.2 p^2)^8 dp
  double series = 0.0;
  for (int k = 0; k <= 8; ++k)
    series += oracle::binom(8, k) * std::pow(0.3, 8 - k) * std::pow(0.2, k) / (2.0 * k + 1.0);
  const auto d8 = geometry::PerturbedDomain::channel_only(reference_profile(0.125));
  CHECK(geometry::measure_excess(d8) == doctest::Approx(2.0 * series).epsilon(1e-8));
  // eps = 0.35 against direct quadrature of 2 g
  const ChannelProfile p35 = reference_profile(0.35);
  const double q = oracle::integrate([&](double s) { return 2.0 * p35.g(s); }, 0.0, 1.0);
  const auto d35 = geometry::PerturbedDomain::channel_only(p35);
  CHECK(geometry::measure_excess(d35) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("measure excess of the oscillating boundary") {
  // closed form: a (1 + eps (1 - cos(1/eps)))
  for (double eps : {0.25, 1.0 / 32.0}) {
    const auto d = geometry::PerturbedDomain::oscillating(0.3, eps);
    const double expect = 0.3 * (1.0 + eps * (1.0 - std::cos(1.0 / eps)));
    CHECK(geometry::measure_excess(d) == doctest::Approx(expect).epsilon(1e-9));
  }
  const auto flat = geometry::PerturbedDomain::oscillating(0.0, 0.25);
  CHECK(geometry::measure_excess(flat) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hausdorff-type domain distance") {
  const auto ch = geometry::PerturbedDomain::channel_only(reference_profile(0.25));
  CHECK(geometry::domain_distance(ch) == doctest::Approx(1.0).epsilon(1e-15));
  const auto scaled = geometry::PerturbedDomain::channel_only(
      geometry::scale_channel(reference_profile(0.25), 2.0));
  CHECK(geometry::domain_distance(scaled) == doctest::Approx(2.0).epsilon(1e-15));
  // top boundary reaches a (1 + sin) = 2a whenever 1/eps >= pi/2
  const auto osc = geometry::PerturbedDomain::oscillating(0.3, 0.25);
  CHECK(geometry::domain_distance(osc) == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("domain factories guard their parameters") {
  // mouth must fit strictly inside the base edge
  CHECK_THROWS_AS(geometry::PerturbedDomain::dumbbell(width_poly_profile({0.5}, 1.0), 0.83),
                  ParameterError);
  CHECK_NOTHROW(geometry::PerturbedDomain::dumbbell(reference_profile(0.25), 0.83));
  CHECK_THROWS_AS(geometry::PerturbedDomain::dumbbell(reference_profile(0.25), 0.0),
                  ParameterError);
  CHECK_THROWS_AS(geometry::PerturbedDomain::oscillating(-0.1, 0.25), ParameterError);
  CHECK_THROWS_AS(geometry::PerturbedDomain::oscillating(0.3, 0.0), ParameterError);
  const auto ch = geometry::PerturbedDomain::channel_only(reference_profile(0.25));
  CHECK(ch.variant == geometry::DomainVariant::ChannelMixed);
  const auto db = geometry::PerturbedDomain::dumbbell(reference_profile(0.25), 0.83);
  CHECK(db.variant == geometry::DomainVariant::DumbbellNeumann);
  CHECK(db.height == doctest::Approx(0.83));
}

}  // TEST_SUITE
