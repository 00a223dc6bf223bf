#include <cmath>
#include <vector>

#include "doctest.h"
#include "rwde/errors.hpp"
#include "rwde/onedim.hpp"
#include "rwde/special.hpp"
#include "rwde/stats.hpp"

using namespace rwde;

namespace {

double series_2f1(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 2000 && std::abs(term) > 1e-17 * std::abs(sum); ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
  }
  return sum;
}

// E[X^s], X = Z / (1 - Z), Z ~ h1(alpha, beta; z)
double moment_closed_form(double a, double b, double z, double s) {
  const double g = std::exp(log_gamma(a + s) + log_gamma(b - s) - log_gamma(a) - log_gamma(b));
  return g * series_2f1(a, a + s, a + b, z) / series_2f1(a, a, a + b, z);
}

// Thomas algorithm for lo[i] x[i-1] + di[i] x[i] + up[i] x[i+1] = rhs[i]
std::vector<double> tridiagonal(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                                std::vector<double> rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

}  // namespace

TEST_CASE("hypergeometric function") {
  for (double z : {-0.8, -0.2, 0.1, 0.5, 0.9}) {
    CHECK(hyp2f1(1.0, 1.0, 2.0, z) == doctest::Approx(-std::log(1.0 - z) / z).epsilon(1e-10));
    CHECK(hyp2f1(0.7, 2.5, 2.5 + 1e-9, z) == doctest::Approx(std::pow(1.0 - z, -0.7)).epsilon(1e-6));
  }
  for (double z : {0.25, 0.6}) {
    CHECK(hyp2f1(3.0, 3.5, 4.0, z) == doctest::Approx(series_2f1(3.0, 3.5, 4.0, z)).epsilon(1e-10));
    CHECK(hyp2f1(1.5, 0.5, 2.5, z) == doctest::Approx(series_2f1(1.5, 0.5, 2.5, z)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(hyp2f1(1.0, 2.0, 1.5, 0.5), ParameterError);
}

TEST_CASE("h1 law") {
  const BetaEnvParams p(3.0, 1.0);
  const double z = 0.25;
  CHECK(h1_expectation(p, z, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h1_cdf(p, z, 0.0) == 0.0);
  CHECK(h1_cdf(p, z, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  double prev = 0.0;
  for (double u = 0.05; u < 1.0; u += 0.05) {
    const double c = h1_cdf(p, z, u);
    CHECK(c >= prev);
    prev = c;
  }
  // z = 0 reduces to Beta(alpha, beta)
  CHECK(h1_cdf(p, 0.0, 0.4) == doctest::Approx(beta_cdf(3.0, 1.0, 0.4)).epsilon(1e-10));
}

TEST_CASE("fractional moments of the h1 law") {
  struct Case {
    double a, b, s;
  };
  for (const Case& c : {Case{3.0, 1.0, 0.5}, Case{3.0, 2.0, 0.5}, Case{3.0, 2.0, 1.0}, Case{3.0, 2.0, 1.5}}) {
    const BetaEnvParams p(c.a, c.b);
    const double z = 0.25;
    const double s = c.s;
    const double m = h1_expectation(p, z, [s](double u) { return std::pow(u / (1.0 - u), s); });
    CHECK(m == doctest::Approx(moment_closed_form(c.a, c.b, z, s)).epsilon(1e-7));
  }
}

TEST_CASE("fixed-point iteration reaches the h1 law") {
  const BetaEnvParams p(3.0, 1.0);
  const double lambda = 0.5;
  RngHandle rng(21);
  std::vector<double> zs;
  for (int i = 0; i < 20000; ++i) zs.push_back(sample_Z_fixed_point(p, lambda, 60, rng));
  CHECK(ks_statistic(zs, [&](double u) { return h1_cdf(p, lambda * lambda, u); }) < ks_threshold(zs.size()));
}

TEST_CASE("continued fraction with a constant environment") {
  for (double w : {0.3, 0.5, 0.8}) {
    for (double lambda : {0.2, 0.6, 0.95}) {
      const std::vector<double> omegas(400, w);
      const auto r = phi_continued_fraction(omegas, lambda);
      const double root = (1.0 - std::sqrt(1.0 - 4.0 * lambda * lambda * w * (1.0 - w))) / (2.0 * lambda * (1.0 - w));
      CHECK(r.converged);
      CHECK(r.value == doctest::Approx(root).epsilon(1e-9));
    }
  }
  const std::vector<double> right(400, 0.8);
  CHECK(phi_continued_fraction(right, 1.0).value == doctest::Approx(1.0).epsilon(1e-8));
  RngHandle rng(22);
  const auto s = sample_phi(BetaEnvParams(3.0, 1.0), 0.5, rng);
  CHECK(s.converged);
  CHECK(s.value > 0.0);
  CHECK(s.value < 0.5);
}

TEST_CASE("rate function") {
  const BetaEnvParams p(3.0, 1.0);
  CHECK(rate_function(p, 1.0).rate == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(rate_function(p, 1.0).rate == doctest::Approx(digamma(4.0) - digamma(3.0)).epsilon(1e-8));
  CHECK(rate_function(p, 3.0).rate <= 1e-3);
  CHECK(rate_function(p, 10.0).rate <= 1e-9);
  const auto mid = rate_function(p, 2.0);
  CHECK(mid.rate > 0.0);
  CHECK(mid.rate < 1.0 / 3.0);
  CHECK(log_mgf(p, 1.0) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("speeds and limit constants") {
  CHECK(kesten_constant(BetaEnvParams(1.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(solomon_speed(BetaEnvParams(3.0, 1.0)) == doctest::Approx(1.0 / 3.0));
  CHECK(solomon_speed(BetaEnvParams(1.5, 1.0)) == 0.0);
  const auto g = regime_constants(BetaEnvParams(4.0, 1.0));
  CHECK(g.regime == Regime::gaussian);
  CHECK(*g.scale == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(regime_constants(BetaEnvParams(1.5, 1.0)).regime == Regime::sub_ballistic);
  CHECK(regime_constants(BetaEnvParams(1.5, 1.0)).exponent == doctest::Approx(0.5));
  CHECK(regime_constants(BetaEnvParams(2.0, 1.0)).regime == Regime::critical);
  CHECK(regime_constants(BetaEnvParams(2.5, 1.0)).regime == Regime::stable);
  CHECK(regime_constants(BetaEnvParams(2.5, 1.0)).exponent == doctest::Approx(1.0 / 1.5));
  const auto b = regime_constants(BetaEnvParams(3.0, 1.0));
  CHECK(b.regime == Regime::boundary);
  CHECK_FALSE(b.scale.has_value());
  CHECK_THROWS_AS(BetaEnvParams(0.0, 1.0), ParameterError);
}

TEST_CASE("1/R has the Beta(kappa1, beta) law") {
  const BetaEnvParams p(3.0, 1.0);
  RngHandle rng(23);
  std::vector<double> inv;
  for (int i = 0; i < 20000; ++i) inv.push_back(1.0 / sample_R(p, rng));
  // 1% critical value
  CHECK(ks_statistic(inv, [](double u) { return beta_cdf(2.0, 1.0, u); }) < 1.628 / std::sqrt(20000.0));
}

TEST_CASE("quenched identities match finite-segment solves") {
  const BetaEnvParams p(3.0, 1.0);
  RngHandle rng(24);
  const std::size_t m = 1500;
  for (int rep = 0; rep < 5; ++rep) {
    const Slab slab = sample_slab(p, m, rng);
    const auto q = quenched_identities(slab);
    CHECK_FALSE(q.truncated);
    // h(x) = P_x(hit m before 0) on [0, m]
    const std::size_t n = m - 1;  // unknowns x = 1..m-1
    std::vector<double> lo(n), di(n, 1.0), up(n), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = slab.at(static_cast<std::ptrdiff_t>(i + 1));
      lo[i] = -(1.0 - w);
      up[i] = -w;
    }
    rhs[n - 1] = slab.at(static_cast<std::ptrdiff_t>(n));
    const auto h = tridiagonal(lo, di, up, rhs);
    CHECK(q.escape == doctest::Approx(h[0]).epsilon(1e-9));
    CHECK(q.green == doctest::Approx(1.0 / (slab.at(0) * h[0])).epsilon(1e-9));
    // e(x) = E_x[H_1] on [-m, 0], reflecting at -m
    const std::size_t k = m + 1;  // x = -m..0
    std::vector<double> l2(k), d2(k, 1.0), u2(k), r2(k, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
      const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(m);
      const double w = i == 0 ? 1.0 : slab.at(x);
      l2[i] = -(1.0 - w);
      u2[i] = i + 1 < k ? -w : 0.0;
    }
    const auto e = tridiagonal(l2, d2, u2, r2);
    CHECK(q.mean_hitting == doctest::Approx(e[k - 1]).epsilon(1e-9));
  }
}
