#include <cmath>
#include <vector>

#include "doctest.h"
#include "rwde/errors.hpp"
#include "rwde/flows.hpp"
#include "rwde/graph_env.hpp"
#include "rwde/rng.hpp"

using namespace rwde;

namespace {

Network path_network(std::size_t n) {
  Network net{n + 1, {}};
  for (std::size_t i = 0; i < n; ++i) net.edges.emplace_back(i, i + 1);
  return net;
}

std::vector<double> net_flow(const FlowAssignment& f) {
  return divergence(*f.topology, f.theta);
}

}  // namespace

TEST_CASE("series and parallel resistance") {
  const std::size_t end[] = {3};
  CHECK(effective_resistance(path_network(3), 0, end) == doctest::Approx(3.0).epsilon(1e-12));
  Network par{2, {{0, 1}, {0, 1}, {0, 1}, {1, 0}}};
  const std::size_t one[] = {1};
  CHECK(effective_resistance(par, 0, one) == doctest::Approx(0.25).epsilon(1e-12));
  // balanced Wheatstone bridge
  Network bridge{4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 2}}};
  const std::size_t three[] = {3};
  CHECK(effective_resistance(bridge, 0, three) == doctest::Approx(1.0).epsilon(1e-12));
  // self-loops carry no current
  Network loop{2, {{0, 1}, {0, 0}, {1, 1}}};
  CHECK(effective_resistance(loop, 0, one) == doctest::Approx(1.0).epsilon(1e-12));
  Network split{3, {{0, 1}}};
  const std::size_t two[] = {2};
  CHECK_THROWS_AS(effective_resistance(split, 0, two), StructuralError);
}

TEST_CASE("Thomson unit flow") {
  const std::size_t end[] = {4};
  const auto f = thomson_unit_flow(path_network(4), 0, end);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(f.theta[2 * k] == doctest::Approx(1.0));
    CHECK(f.theta[2 * k + 1] == 0.0);
  }
  CHECK(f.l2_norm_squared() == doctest::Approx(4.0));

  const Network ball = lattice_ball_network(2, 4);
  const std::size_t out[] = {ball.vertices - 1};
  const auto g = thomson_unit_flow(ball, 0, out);
  const auto div = net_flow(g);
  for (std::size_t v = 0; v < div.size(); ++v) {
    const double expect = v == 0 ? 1.0 : (v == ball.vertices - 1 ? -1.0 : 0.0);
    CHECK(div[v] == doctest::Approx(expect).epsilon(1e-10));
  }
  for (double t : g.theta) CHECK(t >= 0.0);
  CHECK(g.l2_norm_squared() == doctest::Approx(effective_resistance(ball, 0, out)).epsilon(1e-10));
}

TEST_CASE("Thomson flow minimizes energy among unit flows") {
  // square 0-1-2-3 with a diagonal 0-2; unit flow from 0 to 2
  Network sq{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}};
  const std::size_t sink[] = {2};
  const auto f = thomson_unit_flow(sq, 0, sink);
  std::vector<double> signed_flow(5);
  for (std::size_t k = 0; k < 5; ++k) signed_flow[k] = f.theta[2 * k] - f.theta[2 * k + 1];
  auto energy = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  const double base = energy(signed_flow);
  // cycle directions: 0->1->2 then 2->0 along the diagonal, and 0->1->2->3->0
  const std::vector<std::vector<double>> cycles = {{1, 1, 0, 0, -1}, {1, 1, 1, 1, 0}, {0, 0, 1, 1, 1}};
  for (const auto& c : cycles) {
    for (double eps : {-0.3, -0.01, 0.01, 0.3}) {
      std::vector<double> g = signed_flow;
      for (std::size_t k = 0; k < 5; ++k) g[k] += eps * c[k];
      CHECK(energy(g) > base);
    }
  }
  CHECK(base == doctest::Approx(effective_resistance(sq, 0, sink)).epsilon(1e-12));
  CHECK(base == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("averaged flow on the torus") {
  const auto f = averaged_flow(2, 3, 0);
  const auto div = net_flow(f);
  for (std::size_t v = 0; v < div.size(); ++v) {
    const double expect = (v == 0 ? 1.0 : 0.0) - 1.0 / 9.0;
    CHECK(div[v] == doctest::Approx(expect).epsilon(1e-10));
  }
  for (double t : f.theta) {
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
  const auto single = averaged_flow(1, 1, 0);
  for (double t : single.theta) CHECK(t == 0.0);
}

TEST_CASE("max flow and min cut") {
  const auto g = Digraph::make(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 3}});
  const std::vector<double> cap = {3.0, 2.0, 1.0, 2.0, 3.0, 0.0};
  const auto r = max_flow_min_cut(*g, cap, 0, 3);
  CHECK(r.strength == doctest::Approx(5.0));
  CHECK(r.cut.capacity == doctest::Approx(5.0));
  CHECK(min_cut_bruteforce(*g, cap, 0, 3) == doctest::Approx(5.0));
  const auto div = divergence(*g, r.flow);
  CHECK(div[0] == doctest::Approx(5.0));
  CHECK(div[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(div[2] == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t e = 0; e < cap.size(); ++e) CHECK(r.flow[e] <= cap[e] + 1e-12);

  RngHandle rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Edge> edges;
    std::vector<double> c;
    for (int k = 0; k < 12; ++k) {
      edges.push_back({static_cast<std::size_t>(rng.below(5)), static_cast<std::size_t>(rng.below(5))});
      c.push_back(rng.uniform01());
    }
    for (std::size_t v = 0; v < 5; ++v) {
      edges.push_back({v, v});
      c.push_back(1.0);
    }
    const Digraph d(5, edges);
    const double mf = max_flow_min_cut(d, c, 0, 4).strength;
    CHECK(mf == doctest::Approx(min_cut_bruteforce(d, c, 0, 4)).epsilon(1e-10));
    auto bigger = c;
    for (auto& x : bigger) x *= 1.5;
    CHECK(max_flow_min_cut(d, bigger, 0, 4).strength >= mf - 1e-12);
  }
}

TEST_CASE("lattice ball resistance grows in two dimensions") {
  double prev = 0.0;
  for (std::size_t n : {2, 4, 8}) {
    const Network ball = lattice_ball_network(2, n);
    const std::size_t out[] = {ball.vertices - 1};
    const double r = effective_resistance(ball, 0, out);
    CHECK(r > prev);
    prev = r;
  }
  // radius 1: four edges to equipotential neighbours, each with three exits
  const Network b1 = lattice_ball_network(2, 1);
  const std::size_t o1[] = {b1.vertices - 1};
  CHECK(effective_resistance(b1, 0, o1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}
