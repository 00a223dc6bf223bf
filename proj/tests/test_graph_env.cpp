#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "rwde/builders.hpp"
#include "rwde/errors.hpp"
#include "rwde/graph_env.hpp"
#include "rwde/special.hpp"
#include "rwde/stats.hpp"

using namespace rwde;

namespace {

std::vector<double> power_iteration(const Environment& env) {
  const auto& g = env.topology();
  std::vector<double> pi(g.vertex_count(), 1.0 / static_cast<double>(g.vertex_count()));
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> next(pi.size(), 0.0);
    // lazy chain: aperiodic, same invariant measure
    for (std::size_t x = 0; x < pi.size(); ++x) next[x] += 0.5 * pi[x];
    for (std::size_t e = 0; e < g.edge_count(); ++e) next[g.edge(e).head] += 0.5 * pi[g.edge(e).tail] * env[e];
    pi = next;
  }
  return pi;
}

WeightedDigraph four_vertex_graph() {
  std::vector<Edge> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {2, 0}, {1, 0}, {3, 1}};
  std::vector<double> w = {1.0, 0.7, 1.3, 0.9, 0.4, 2.0, 1.1, 0.6};
  return WeightedDigraph(4, std::move(edges), std::move(w));
}

}  // namespace

TEST_CASE("digraph structure") {
  const WeightedDigraph tri = build_bidirected_cycle(3);
  CHECK(tri.topology().strongly_connected());
  CHECK(tri.vertex_count() == 3);
  CHECK(tri.edge_count() == 6);
  const auto rev = tri.topology().reversed();
  for (std::size_t e = 0; e < 6; ++e) {
    CHECK(rev->edge(e).tail == tri.topology().edge(e).head);
    CHECK(rev->edge(e).head == tri.topology().edge(e).tail);
  }
  const Digraph oneway(2, {{0, 1}, {1, 1}});
  CHECK_FALSE(oneway.strongly_connected());
  CHECK_THROWS(Digraph(2, {{0, 1}}));
}

TEST_CASE("divergence") {
  const std::vector<double> a = {1.0, 2.0, 1.0, 1.0};
  const WeightedDigraph t = build_torus(2, 4, a);
  CHECK(t.vertex_count() == 16);
  CHECK(t.edge_count() == 64);
  for (double x : divergence(t.topology(), t.weights())) CHECK(std::abs(x) < 1e-12);
  const Digraph path(3, {{0, 1}, {1, 2}, {2, 0}});
  const std::vector<double> flow = {1.0, 1.0, 0.0};
  const auto d = divergence(path, flow);
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 0.0);
  CHECK(d[2] == -1.0);
  const BallGraph ball = build_ball(2, 3, 1.0);
  const auto db = divergence(ball.graph.topology(), ball.graph.weights());
  for (std::size_t v = 0; v < db.size(); ++v) {
    const double expect = v == ball.boundary ? 1.0 : (v == ball.origin ? -1.0 : 0.0);
    CHECK(db[v] == doctest::Approx(expect));
  }
}

TEST_CASE("builders") {
  const std::vector<double> a = {2.0, 1.0, 1.0, 1.0};
  const CylinderGraph cyl = build_cylinder(5, 7, a);
  CHECK(cyl.graph.vertex_count() == 5 * 7 + 2);
  for (double x : divergence(cyl.graph.topology(), cyl.graph.weights())) CHECK(std::abs(x) < 1e-12);
  CHECK(cyl.graph.topology().edge(cyl.long_edge).tail == cyl.right);
  CHECK(cyl.graph.topology().edge(cyl.long_edge).head == cyl.left);
  const std::vector<double> bad = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(build_cylinder(5, 7, bad), ParameterError);
  CHECK_THROWS_AS(build_torus(2, 0, a), UsageError);
  const WeightedDigraph seg = build_segment(6, 3.0, 1.0);
  for (double x : divergence(seg.topology(), seg.weights())) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("sample_environment") {
  RngHandle rng(1);
  const WeightedDigraph two(2, {{0, 1}, {1, 0}, {1, 1}}, {1.0, 2.0, 3.0});
  std::vector<double> first;
  for (int i = 0; i < 20000; ++i) {
    const Environment env = sample_environment(two, rng);
    CHECK(env[0] == 1.0);
    first.push_back(env[1]);
  }
  CHECK(ks_statistic(first, [](double x) { return beta_cdf(2.0, 3.0, x); }) < ks_threshold(first.size()));
}

TEST_CASE("cycle moment matches the gamma-ratio formula") {
  const WeightedDigraph g = four_vertex_graph();
  const Cycle c{{0, 1, 2, 3}};
  REQUIRE(is_cycle(g.topology(), c));
  std::vector<double> xi(g.edge_count(), 0.0);
  for (std::size_t e : c.edges) xi[e] = 1.0;
  // independent vertices: product of per-vertex Beta means alpha_e / alpha_x
  const double expect = (1.0 / 1.4) * (0.7 / 1.8) * (1.3 / 3.3) * (0.9 / 1.5);
  CHECK(environment_moment(g, xi).value == doctest::Approx(expect).epsilon(1e-12));
  RngHandle rng(2);
  RunningStats s;
  for (int i = 0; i < 200000; ++i) s.add(cycle_weight(sample_environment(g, rng), c));
  CHECK(std::abs(s.mean() - expect) < 4.0 * s.standard_error());
}

TEST_CASE("invariant measure") {
  const auto swap = Digraph::make(2, {{0, 1}, {1, 0}});
  const Environment env(swap, {1.0, 1.0});
  const auto pi = invariant_measure(env);
  CHECK(pi[0] == doctest::Approx(0.5));
  CHECK(pi[1] == doctest::Approx(0.5));

  const std::vector<double> ones = {1.0, 1.0, 1.0, 1.0};
  const WeightedDigraph t = build_torus(2, 3, ones);
  std::vector<double> quarter(t.edge_count(), 0.25);
  const auto upi = invariant_measure(Environment(t.topology_ptr(), quarter));
  for (double p : upi) CHECK(p == doctest::Approx(1.0 / 9.0));

  RngHandle rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const Environment e = sample_environment(four_vertex_graph(), rng);
    const auto a = invariant_measure(e);
    const auto b = power_iteration(e);
    CHECK(invariant_residual(e, a) < 1e-10);
    for (std::size_t x = 0; x < a.size(); ++x) CHECK(std::abs(a[x] - b[x]) < 1e-9);
  }
  const auto oneway = Digraph::make(2, {{0, 1}, {1, 1}});
  CHECK_THROWS_AS(invariant_measure(Environment(oneway, {1.0, 1.0})), StructuralError);
}

TEST_CASE("time reversal") {
  RngHandle rng(4);
  const WeightedDigraph g = four_vertex_graph();
  for (int rep = 0; rep < 20; ++rep) {
    const Environment env = sample_environment(g, rng);
    const Environment rev = reverse_environment(env);
    const Environment back = reverse_environment(rev);
    for (std::size_t e = 0; e < g.edge_count(); ++e) CHECK(std::abs(back[e] - env[e]) < 1e-12);
    for (std::size_t s = 0; s < g.vertex_count(); ++s) {
      for (const Cycle& c : enumerate_cycles(g.topology(), s, 8)) {
        const double w = cycle_weight(env, c);
        const double wr = cycle_weight(rev, reverse_cycle(c));
        CHECK(std::abs(w - wr) <= 1e-12 * std::max(w, 1e-300) + 1e-300);
      }
    }
  }
  // reversible chain: reversal equals the original on reversed edges
  const auto path = Digraph::make(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  const Environment rw(path, {1.0, 0.3, 0.7, 1.0});
  const Environment rr = reverse_environment(rw);
  CHECK(rr[0] == doctest::Approx(rw[1]));
  CHECK(rr[2] == doctest::Approx(rw[3]));
}

TEST_CASE("reversed weights") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
  const WeightedDigraph t = build_torus(2, 4, a);
  const WeightedDigraph d = reversed_weights(t);
  for (std::size_t x = 0; x < t.vertex_count(); ++x) CHECK(d.vertex_weight(x) == doctest::Approx(t.vertex_weight(x)));
  // central symmetry: the dual edge leaving x in direction -e_1 carries alpha_1
  const Site x{};
  const std::size_t v = torus_vertex(2, 4, x);
  Site left{};
  left[0] = -1;
  const std::size_t e = torus_vertex(2, 4, left) * 4 + 0;  // (x - e1) -> x with alpha_1
  CHECK(d.topology().edge(e).tail == v);
  CHECK(d.weight(e) == 1.0);
}

TEST_CASE("absorption probabilities") {
  const auto seg = Digraph::make(5, {{0, 0}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 4}});
  const Environment env(seg, {1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1.0});
  const std::size_t a[] = {4}, b[] = {0};
  CHECK(absorption_probability(env, 2, a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(absorption_probability(env, 1, a, b) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(absorption_probability(env, 4, a, b) == 1.0);
  CHECK(absorption_probability(env, 0, a, b) == 0.0);
  AbsorptionSolver solver(seg, 3, a, b);
  CHECK(solver.solve(env) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(solver.last_residual() < 1e-10);
  // expected exit time of the symmetric walk from x is x (4 - x)
  const std::size_t ends[] = {0, 4};
  const auto h = expected_hitting_time(env, ends);
  for (std::size_t x = 0; x <= 4; ++x) CHECK(h[x] == doctest::Approx(static_cast<double>(x * (4 - x))));
  const auto cut = Digraph::make(3, {{0, 1}, {1, 1}, {2, 2}});
  const std::size_t t2[] = {2}, t0[] = {0};
  CHECK_THROWS_AS(absorption_probability(Environment(cut, {1.0, 1.0, 1.0}), 1, t2, t0), StructuralError);
}

TEST_CASE("return through an entry edge") {
  const auto cycle = Digraph::make(3, {{0, 1}, {1, 2}, {2, 0}});
  const Environment env(cycle, {1.0, 1.0, 1.0});
  CHECK(return_via_edge_probability(env, 0, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(return_via_edge_probability(env, 0, 0), StructuralError);
  RngHandle rng(5);
  const WeightedDigraph tri = build_bidirected_cycle(3);
  const Environment e = sample_environment(tri, rng);
  const auto dist = return_edge_distribution(e, 0);
  CHECK(dist.size() == 2);
  CHECK(dist[0] + dist[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist[0] == doctest::Approx(return_via_edge_probability(e, 0, tri.topology().in_edges(0)[0])));
}

TEST_CASE("pair Green function closed form") {
  const auto g = Digraph::make(3, {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 2}});
  RngHandle rng(6);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01();
    const Environment env(g, {a, 1.0 - a, b, 1.0 - b, 1.0});
    const std::size_t A[] = {0, 1};
    CHECK(green_function_finite(env, A, 0) == doctest::Approx(1.0 / (1.0 - a * b)).epsilon(1e-12));
    const std::size_t single[] = {0};
    CHECK(green_function_finite(env, single, 0) == doctest::Approx(1.0));
  }
  const auto closed = Digraph::make(2, {{0, 1}, {1, 0}});
  const std::size_t all[] = {0, 1};
  CHECK_THROWS_AS(green_function_finite(Environment(closed, {1.0, 1.0}), all, 0), StructuralError);
}

TEST_CASE("matrix-tree minors") {
  const auto two = Digraph::make(2, {{0, 1}, {1, 0}});
  const std::vector<double> z2 = {0.3, 0.8};
  CHECK(matrix_tree_minor(*two, z2, 0) == doctest::Approx(0.8));
  const WeightedDigraph tri = build_bidirected_cycle(3);
  const std::vector<double> ones(6, 1.0);
  for (std::size_t x = 0; x < 3; ++x) {
    CHECK(matrix_tree_minor(tri.topology(), ones, x) == doctest::Approx(3.0));
    CHECK(matrix_tree_bruteforce(tri.topology(), ones, x) == doctest::Approx(3.0));
  }
  RngHandle rng(7);
  const WeightedDigraph g = four_vertex_graph();
  const WeightedDigraph five(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 3}, {3, 1}, {2, 0}, {4, 2}, {1, 4}},
                             std::vector<double>(10, 1.0));
  for (const WeightedDigraph* h : {&g, &five, &tri}) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> z(h->edge_count());
      for (auto& v : z) v = 0.1 + rng.uniform01();
      for (std::size_t x = 0; x < h->vertex_count(); ++x) {
        const double a = matrix_tree_minor(h->topology(), z, x);
        const double b = matrix_tree_bruteforce(h->topology(), z, x);
        CHECK(std::abs(a - b) <= 1e-10 * b);
      }
    }
  }
}

TEST_CASE("occupation density on a one-dimensional chart") {
  // e0 = (a, b), e1 = (b, a), e2 = (a, a); Z_e2 = omega_e2 / omega_e0 is BetaPrime(alpha2, alpha0)
  const double a0 = 2.0, a1 = 1.5, a2 = 3.0;
  const WeightedDigraph g(2, {{0, 1}, {1, 0}, {0, 0}}, {a0, a1, a2});
  auto oracle = [&](double t) { return std::pow(t, a2 - 1.0) * std::pow(1.0 + t, -a0 - a2) / beta_fn(a2, a0); };
  for (double t : {0.05, 0.3, 1.0, 2.5, 10.0}) {
    const std::vector<double> z = {1.0, 1.0, t};
    CHECK(occupation_density(g, z, 0, 0) == doctest::Approx(oracle(t)).epsilon(1e-10));
    CHECK(occupation_density(g, z, 0, 1) == doctest::Approx(oracle(t)).epsilon(1e-10));
  }
  // integral over t in (0, inf) via u = t / (1 + t), Simpson
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    double f = 0.0;
    if (i > 0 && i < n) {
      const double t = u / (1.0 - u);
      const std::vector<double> z = {1.0, 1.0, t};
      f = occupation_density(g, z, 0, 0) / ((1.0 - u) * (1.0 - u));
    }
    sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  CHECK(sum / (3.0 * n) == doctest::Approx(1.0).epsilon(1e-6));
  // Monte Carlo: E[Z/(1+Z)] = alpha2 / (alpha0 + alpha2)
  RngHandle rng(8);
  RunningStats s;
  for (int i = 0; i < 100000; ++i) {
    const auto z = occupation_coordinates(sample_environment(g, rng), 0);
    CHECK(z[0] == doctest::Approx(1.0));
    s.add(z[2] / (1.0 + z[2]));
  }
  CHECK(std::abs(s.mean() - a2 / (a0 + a2)) < 3.0 * s.standard_error());

  const std::vector<double> off = {1.0, 2.0, 1.0};  // div z != 0
  CHECK_THROWS_AS(occupation_density(g, off, 0, 0), ParameterError);
}

TEST_CASE("occupation density does not depend on the root of the tree sum") {
  RngHandle rng(9);
  const WeightedDigraph tri(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 0}, {0, 2}}, {1.0, 0.5, 2.0, 1.5, 0.7, 1.2});
  const WeightedDigraph g = four_vertex_graph();
  for (const WeightedDigraph* h : {&tri, &g}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto z = occupation_coordinates(sample_environment(*h, rng), 0);
      const double ref = log_occupation_density(*h, z, 0, 0);
      for (std::size_t x = 1; x < h->vertex_count(); ++x) {
        CHECK(log_occupation_density(*h, z, 0, x) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("graph and environment text round trip") {
  const WeightedDigraph g = four_vertex_graph();
  std::stringstream ss;
  write_graph(ss, g);
  CHECK(ss.str().rfind("vertices=4 edges=8", 0) == 0);
  const WeightedDigraph back = read_graph(ss);
  CHECK(back.edge_count() == 8);
  for (std::size_t e = 0; e < 8; ++e) {
    CHECK(back.topology().edge(e) == g.topology().edge(e));
    CHECK(back.weight(e) == g.weight(e));
  }
  RngHandle rng(10);
  const Environment env = sample_environment(g, rng);
  std::stringstream es;
  write_environment(es, env);
  const Environment eb = read_environment(es);
  for (std::size_t e = 0; e < 8; ++e) CHECK(eb[e] == env[e]);
  std::stringstream bad("vertices=2 edges=1\n0 5 1.0\n");
  CHECK_THROWS(read_graph(bad));
}
