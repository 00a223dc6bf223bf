#include "rwde/flows.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <ostream>

#include "rwde/builders.hpp"
#include "rwde/errors.hpp"

namespace rwde {

namespace {

constexpr double kAugmentCutoff = 1e-12;

using SparseMatrix = Eigen::SparseMatrix<double>;

// Laplacian with the grounded vertices eliminated. pos[v] is the unknown index
// of v, or -1 for grounded vertices.
struct GroundedLaplacian {
  std::vector<std::ptrdiff_t> pos;
  std::vector<std::size_t> free;
  Eigen::SimplicialLDLT<SparseMatrix> solver;
};

void build_grounded(const Network& net, std::span<const std::size_t> ground, GroundedLaplacian& out) {
  const std::size_t n = net.vertices;
  if (ground.empty()) throw UsageError("flows: empty grounded set");
  std::vector<char> grounded(n, 0);
  for (std::size_t v : ground) {
    if (v >= n) throw UsageError("flows: vertex out of range");
    grounded[v] = 1;
  }
  // Every vertex must be connected to the grounded set.
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : net.edges) {
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(grounded);
  std::vector<std::size_t> stack(ground.begin(), ground.end());
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) throw StructuralError("flows: network is disconnected");
  }
  out.pos.assign(n, -1);
  out.free.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (!grounded[v]) {
      out.pos[v] = static_cast<std::ptrdiff_t>(out.free.size());
      out.free.push_back(v);
    }
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * net.edges.size());
  for (const auto& [u, v] : net.edges) {
    if (u == v) continue;
    const auto pu = out.pos[u];
    const auto pv = out.pos[v];
    if (pu >= 0) t.emplace_back(pu, pu, 1.0);
    if (pv >= 0) t.emplace_back(pv, pv, 1.0);
    if (pu >= 0 && pv >= 0) {
      t.emplace_back(pu, pv, -1.0);
      t.emplace_back(pv, pu, -1.0);
    }
  }
  const auto m = static_cast<Eigen::Index>(out.free.size());
  SparseMatrix lap(m, m);
  lap.setFromTriplets(t.begin(), t.end());
  if (m > 0) {
    out.solver.compute(lap);
    if (out.solver.info() != Eigen::Success) throw StructuralError("flows: Laplacian factorization failed");
  }
}

std::vector<double> potentials(const GroundedLaplacian& gl, const Eigen::VectorXd& rhs, std::size_t n) {
  std::vector<double> phi(n, 0.0);
  if (gl.free.empty()) return phi;
  const Eigen::VectorXd sol = gl.solver.solve(rhs);
  for (std::size_t i = 0; i < gl.free.size(); ++i) phi[gl.free[i]] = sol[static_cast<Eigen::Index>(i)];
  return phi;
}

}  // namespace

double FlowAssignment::l2_norm_squared() const {
  double s = 0.0;
  for (double t : theta) s += t * t;
  return s;
}

Network undirected_skeleton(const Digraph& g) {
  Network net;
  net.vertices = g.vertex_count();
  for (const Edge& e : g.edges()) {
    if (e.tail < e.head) net.edges.emplace_back(e.tail, e.head);
  }
  return net;
}

Network lattice_ball_network(std::size_t d, std::size_t n) {
  const BallGraph ball = build_ball(d, n, 1.0);
  // Put the origin first and the merged boundary last.
  std::vector<std::size_t> relabel(ball.graph.vertex_count());
  std::size_t next = 1;
  for (std::size_t v = 0; v < ball.boundary; ++v) relabel[v] = v == ball.origin ? 0 : next++;
  relabel[ball.boundary] = ball.boundary;
  Network net;
  net.vertices = ball.graph.vertex_count();
  const Digraph& g = ball.graph.topology();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (e == ball.special_edge) continue;
    const Edge ed = g.edge(e);
    // Interior edges appear twice, exits once as (x, boundary).
    if (ed.tail < ed.head) net.edges.emplace_back(relabel[ed.tail], relabel[ed.head]);
  }
  return net;
}

Network torus_network(std::size_t d, std::size_t n) {
  const std::vector<double> ones(2 * d, 1.0);
  const WeightedDigraph torus = build_torus(d, n, ones);
  Network net;
  net.vertices = torus.vertex_count();
  const Digraph& g = torus.topology();
  // Keep the +e_i edge of every vertex: each undirected edge once.
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    for (std::size_t i = 0; i < d; ++i) {
      const Edge e = g.edge(v * 2 * d + i);
      if (e.tail != e.head) net.edges.emplace_back(e.tail, e.head);
    }
  }
  return net;
}

DigraphPtr oriented(const Network& net) {
  std::vector<Edge> edges;
  edges.reserve(2 * net.edges.size());
  for (const auto& [u, v] : net.edges) {
    edges.push_back({u, v});
    edges.push_back({v, u});
  }
  // Digraph requires an outgoing edge everywhere; isolated vertices get a loop.
  std::vector<char> has_out(net.vertices, 0);
  for (const Edge& e : edges) has_out[e.tail] = 1;
  for (std::size_t v = 0; v < net.vertices; ++v) {
    if (!has_out[v]) edges.push_back({v, v});
  }
  return Digraph::make(net.vertices, std::move(edges));
}

double effective_resistance(const Network& net, std::size_t x, std::span<const std::size_t> boundary) {
  if (x >= net.vertices) throw UsageError("effective_resistance: vertex out of range");
  if (std::find(boundary.begin(), boundary.end(), x) != boundary.end()) {
    throw UsageError("effective_resistance: x lies in the boundary");
  }
  GroundedLaplacian gl;
  build_grounded(net, boundary, gl);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gl.free.size()));
  rhs[gl.pos[x]] = 1.0;
  return potentials(gl, rhs, net.vertices)[x];
}

FlowAssignment thomson_unit_flow(const Network& net, std::size_t x, std::span<const std::size_t> sinks) {
  if (x >= net.vertices) throw UsageError("thomson_unit_flow: vertex out of range");
  if (std::find(sinks.begin(), sinks.end(), x) != sinks.end()) {
    throw UsageError("thomson_unit_flow: source lies in the sink set");
  }
  GroundedLaplacian gl;
  build_grounded(net, sinks, gl);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gl.free.size()));
  rhs[gl.pos[x]] = 1.0;
  const auto phi = potentials(gl, rhs, net.vertices);
  FlowAssignment f;
  f.topology = oriented(net);
  f.theta.assign(f.topology->edge_count(), 0.0);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto [u, v] = net.edges[k];
    const double c = phi[u] - phi[v];
    (c >= 0.0 ? f.theta[2 * k] : f.theta[2 * k + 1]) = std::abs(c);
  }
  f.sources = {x};
  f.sinks.assign(sinks.begin(), sinks.end());
  f.strength = 1.0;
  return f;
}

FlowAssignment averaged_flow(std::size_t d, std::size_t n, std::size_t x0) {
  const Network net = torus_network(d, n);
  if (x0 >= net.vertices) throw UsageError("averaged_flow: vertex out of range");
  FlowAssignment f;
  f.topology = oriented(net);
  f.theta.assign(f.topology->edge_count(), 0.0);
  f.sources = {x0};
  for (std::size_t y = 0; y < net.vertices; ++y) {
    if (y != x0) f.sinks.push_back(y);
  }
  f.strength = static_cast<double>(net.vertices - 1) / static_cast<double>(net.vertices);
  if (net.vertices == 1) return f;
  // Ground x0 once; the flow x0 -> y has potential -phi_y where L phi_y = e_y.
  GroundedLaplacian gl;
  const std::size_t ground[] = {x0};
  build_grounded(net, ground, gl);
  const double scale = 1.0 / static_cast<double>(net.vertices);
  for (std::size_t y : f.sinks) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gl.free.size()));
    rhs[gl.pos[y]] = 1.0;
    const auto phi = potentials(gl, rhs, net.vertices);
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
      const auto [u, v] = net.edges[k];
      const double c = phi[v] - phi[u];  // current u -> v of the x0 -> y flow
      (c >= 0.0 ? f.theta[2 * k] : f.theta[2 * k + 1]) += scale * std::abs(c);
    }
  }
  return f;
}

MaxFlowResult max_flow_min_cut(const Digraph& g, std::span<const double> capacities, std::size_t s, std::size_t t) {
  if (capacities.size() != g.edge_count()) throw UsageError("max_flow_min_cut: one capacity per edge");
  if (s >= g.vertex_count() || t >= g.vertex_count()) throw UsageError("max_flow_min_cut: vertex out of range");
  if (s == t) throw UsageError("max_flow_min_cut: source equals sink");
  for (double c : capacities) {
    if (!(c >= 0.0)) throw ParameterError("max_flow_min_cut: capacities must be nonnegative");
  }
  const std::size_t n = g.vertex_count();
  MaxFlowResult res;
  res.flow.assign(g.edge_count(), 0.0);
  // parent[v] = (edge, forward?) on the BFS tree.
  std::vector<std::ptrdiff_t> parent_edge(n);
  std::vector<char> parent_forward(n);
  auto residual = [&](std::size_t e, bool forward) {
    return forward ? capacities[e] - res.flow[e] : res.flow[e];
  };
  auto bfs = [&]() {
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    std::vector<char> seen(n, 0);
    seen[s] = 1;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      for (std::size_t e : g.out_edges(u)) {
        const std::size_t v = g.edge(e).head;
        if (!seen[v] && residual(e, true) > kAugmentCutoff) {
          seen[v] = 1;
          parent_edge[v] = static_cast<std::ptrdiff_t>(e);
          parent_forward[v] = 1;
          q.push_back(v);
        }
      }
      for (std::size_t e : g.in_edges(u)) {
        const std::size_t v = g.edge(e).tail;
        if (!seen[v] && residual(e, false) > kAugmentCutoff) {
          seen[v] = 1;
          parent_edge[v] = static_cast<std::ptrdiff_t>(e);
          parent_forward[v] = 0;
          q.push_back(v);
        }
      }
    }
    return seen;
  };
  for (;;) {
    const auto seen = bfs();
    if (!seen[t]) {
      res.source_side = seen;
      break;
    }
    double bottleneck = std::numeric_limits<double>::infinity();
    for (std::size_t v = t; v != s;) {
      const auto e = static_cast<std::size_t>(parent_edge[v]);
      bottleneck = std::min(bottleneck, residual(e, parent_forward[v]));
      v = parent_forward[v] ? g.edge(e).tail : g.edge(e).head;
    }
    if (bottleneck <= kAugmentCutoff) {
      res.source_side = seen;
      break;
    }
    for (std::size_t v = t; v != s;) {
      const auto e = static_cast<std::size_t>(parent_edge[v]);
      res.flow[e] += parent_forward[v] ? bottleneck : -bottleneck;
      v = parent_forward[v] ? g.edge(e).tail : g.edge(e).head;
    }
    res.strength += bottleneck;
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    if (res.source_side[ed.tail] && !res.source_side[ed.head]) {
      res.cut.edges.push_back(e);
      res.cut.capacity += capacities[e];
    }
  }
  return res;
}

double min_cut_bruteforce(const Digraph& g, std::span<const double> capacities, std::size_t s, std::size_t t) {
  const std::size_t m = g.edge_count();
  if (m > 20) throw UsageError("min_cut_bruteforce: too many edges");
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double cap = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      if (mask >> e & 1u) cap += capacities[e];
    }
    if (cap >= best) continue;
    std::vector<char> seen(g.vertex_count(), 0);
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t e : g.out_edges(u)) {
        if (mask >> e & 1u) continue;
        const std::size_t v = g.edge(e).head;
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    if (!seen[t]) best = cap;
  }
  return best;
}

void write_flow_csv(std::ostream& os, const FlowAssignment& flow) {
  os << "tail,head,theta\n";
  os.precision(17);
  for (std::size_t e = 0; e < flow.theta.size(); ++e) {
    os << flow.topology->edge(e).tail << ',' << flow.topology->edge(e).head << ',' << flow.theta[e] << '\n';
  }
}

void write_resistance_csv(std::ostream& os, std::span<const std::pair<std::size_t, double>> table) {
  os << "N,R_N\n";
  os.precision(17);
  for (const auto& [n, r] : table) os << n << ',' << r << '\n';
}

}  // namespace rwde
