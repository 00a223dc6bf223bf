#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rwde/errors.hpp"
#include "rwde/parallel.hpp"
#include "rwde/rng.hpp"
#include "rwde/sampling.hpp"
#include "rwde/special.hpp"
#include "rwde/stats.hpp"

using namespace rwde;

TEST_CASE("rng streams are reproducible and distinct") {
  RngHandle a(42, 3), b(42, 3), c(42, 4);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  RngHandle d(42, 3);
  CHECK(d() != c());
  CHECK(a.split(1)() == b.split(1)());
  CHECK(a.split(1)() != a.split(2)());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) < 7);
  }
}

TEST_CASE("gamma moments") {
  for (double shape : {0.3, 1.0, 2.5, 7.0}) {
    RngHandle rng(1, static_cast<std::uint64_t>(shape * 10));
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_gamma(shape, rng);
    CHECK(std::abs(mean(xs) - shape) < 4.0 * standard_error(xs));
    CHECK(variance(xs) == doctest::Approx(shape).epsilon(0.05));
  }
  RngHandle rng(2);
  CHECK_THROWS_AS(sample_gamma(0.0, rng), ParameterError);
  CHECK_THROWS_AS(sample_gamma(-1.0, rng), ParameterError);
}

TEST_CASE("log gamma draws do not underflow for tiny shapes") {
  RngHandle rng(3);
  for (int i = 0; i < 1000; ++i) CHECK(std::isfinite(sample_log_gamma(0.01, rng)));
}

TEST_CASE("beta samples KS-match the Beta CDF") {
  RngHandle rng(4);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = sample_beta(2.0, 3.0, rng);
  CHECK(ks_statistic(xs, [](double x) { return beta_cdf(2.0, 3.0, x); }) < ks_threshold(xs.size()));
}

TEST_CASE("dirichlet points are on the simplex with Beta marginals") {
  const std::vector<double> w = {0.5, 1.0, 2.0, 3.0};
  RngHandle rng(5);
  std::vector<double> first;
  for (int i = 0; i < 20000; ++i) {
    const SimplexPoint p = sample_dirichlet(w, rng);
    const auto c = p.coordinates();
    CHECK(std::accumulate(c.begin(), c.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    first.push_back(p[0]);
  }
  CHECK(ks_statistic(first, [](double x) { return beta_cdf(0.5, 6.0, x); }) < ks_threshold(first.size()));
  const std::vector<double> one = {2.0};
  CHECK(sample_dirichlet(one, rng)[0] == 1.0);
  CHECK_THROWS_AS(SimplexPoint({0.5, 0.6}), ParameterError);
}

TEST_CASE("dirichlet joint moments") {
  const std::vector<double> w = {1.0, 2.0, 3.0};
  // E[V1 V2] = Gamma(6)/Gamma(8) * Gamma(2)/Gamma(1) * Gamma(3)/Gamma(2) = 1/21
  const std::vector<double> e = {1.0, 1.0, 0.0};
  CHECK(dirichlet_joint_moment(w, e).value == doctest::Approx(1.0 / 21.0).epsilon(1e-13));
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  CHECK(dirichlet_joint_moment(w, zero).value == doctest::Approx(1.0));
  const std::vector<double> neg = {-1.0, 0.0, 0.0};
  CHECK(dirichlet_joint_moment(w, neg).infinite);
  // E[V3^-1] = (sum - 1)/(alpha_3 - 1) = 5/2
  const std::vector<double> inv = {0.0, 0.0, -1.0};
  CHECK(dirichlet_joint_moment(w, inv).value == doctest::Approx(2.5).epsilon(1e-13));
}

TEST_CASE("polya urn") {
  const std::vector<double> w = {1.0, 1.0};
  const std::vector<std::size_t> colors = {0, 0, 1};
  CHECK(polya_path_probability(w, colors) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  UrnState urn({1.0, 3.0});
  CHECK(urn.probability(1) == doctest::Approx(0.75));
  RngHandle rng(6);
  auto [c, next] = polya_draw(urn, rng);
  CHECK(next.weights()[c] == urn.weights()[c] + 1.0);
  CHECK(next.draw_count() == 1);
  CHECK(next.total() == 5.0);
}

TEST_CASE("polya urn limit fraction is Beta") {
  RngHandle rng(7);
  std::vector<double> fr;
  for (int i = 0; i < 3000; ++i) {
    UrnState u({1.0, 2.0});
    for (int k = 0; k < 400; ++k) u.draw(rng);
    fr.push_back(u.weights()[0] / u.total());
  }
  // finite-draw fraction is close to, not exactly, the Beta(1,2) limit
  CHECK(ks_statistic(fr, [](double x) { return beta_cdf(1.0, 2.0, x); }) < 0.05);
}

TEST_CASE("statistics helpers") {
  const std::vector<double> xs = {3.0, 1.0, 2.0, 5.0, 4.0};
  CHECK(mean(xs) == 3.0);
  CHECK(variance(xs) == 2.5);
  CHECK(median(xs) == 3.0);
  CHECK(quantile(xs, 0.25) == 2.0);
  const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  const LinearFit f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(correlation(x, y) == doctest::Approx(1.0));
  RunningStats a, b, all;
  for (int i = 0; i < 10; ++i) {
    (i < 4 ? a : b).add(i * 1.5);
    all.add(i * 1.5);
  }
  a.merge(b);
  CHECK(a.mean() == doctest::Approx(all.mean()));
  CHECK(a.variance() == doctest::Approx(all.variance()));
  CHECK(ks_threshold(10000) == doctest::Approx(0.01358));
  CHECK(default_hill_k(1000000) == 10000);
}

TEST_CASE("hill estimator on Pareto samples") {
  RngHandle rng(8);
  std::vector<double> xs(200000);
  for (auto& x : xs) x = std::pow(rng.uniform01(), -1.0 / 1.5);
  CHECK(hill_tail_exponent(xs) == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("two-sample KS") {
  RngHandle rng(9);
  std::vector<double> a(5000), b(5000), c(5000);
  for (auto& x : a) x = rng.uniform01();
  for (auto& x : b) x = rng.uniform01();
  for (auto& x : c) x = rng.uniform01() * 0.8;
  CHECK(ks_two_sample(a, b) < ks_two_sample_threshold(a.size(), b.size()));
  CHECK(ks_two_sample(a, c) > ks_two_sample_threshold(a.size(), c.size()));
}

TEST_CASE("parallel_for is thread-count invariant and forwards exceptions") {
  std::vector<double> one(1000), four(1000);
  const RngHandle base(10);
  parallel_for(one.size(), 1, [&](std::size_t i) { one[i] = base.split(i).uniform01(); });
  parallel_for(four.size(), 4, [&](std::size_t i) { four[i] = base.split(i).uniform01(); });
  CHECK(one == four);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw UsageError("boom"); }), UsageError);
}

TEST_CASE("special functions") {
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)));
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0));
  CHECK(beta_cdf(1.0, 1.0, 0.3) == doctest::Approx(0.3));
  CHECK(beta_cdf(2.0, 1.0, 0.5) == doctest::Approx(0.25));
}
