#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "rwde/graph.hpp"

namespace rwde {

/// Undirected network with unit conductances; parallel edges allowed,
/// self-loops ignored.
struct Network {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// One undirected edge per directed edge with tail < head (for digraphs that
/// list each undirected edge in both orientations).
Network undirected_skeleton(const Digraph& g);
/// Ball |x| <= N of Z^d with all outside neighbours merged into one vertex
/// (returned as the last vertex); vertex 0 is the origin.
Network lattice_ball_network(std::size_t d, std::size_t n);
/// Discrete torus (Z/NZ)^d, vertex numbering as in build_torus.
Network torus_network(std::size_t d, std::size_t n);

/// Nonnegative flow on the directed edges of `topology`.
struct FlowAssignment {
  DigraphPtr topology;
  std::vector<double> theta;
  std::vector<std::size_t> sources;
  std::vector<std::size_t> sinks;
  double strength = 0.0;

  double l2_norm_squared() const;
};

/// Directed version of a network: undirected edge k becomes edges 2k (u, v)
/// and 2k + 1 (v, u).
DigraphPtr oriented(const Network& net);

/// Potential difference per unit current between x and the grounded set.
double effective_resistance(const Network& net, std::size_t x, std::span<const std::size_t> boundary);

/// Unit current flow from x to the sink set, split onto the two orientations
/// of every edge (|theta| on the edge following the current, 0 on the other).
FlowAssignment thomson_unit_flow(const Network& net, std::size_t x, std::span<const std::size_t> sinks);

/// (1/N^d) sum_y theta^{(x0, y)} on the torus, each theta^{(x0, y)} being the
/// split Thomson unit flow from x0 to y.
FlowAssignment averaged_flow(std::size_t d, std::size_t n, std::size_t x0 = 0);

struct CutSet {
  std::vector<std::size_t> edges;
  double capacity = 0.0;
};

struct MaxFlowResult {
  double strength = 0.0;
  std::vector<double> flow;  // per edge
  CutSet cut;
  std::vector<char> source_side;
};

/// Edmonds-Karp on real capacities; augmentations below 1e-12 are ignored.
MaxFlowResult max_flow_min_cut(const Digraph& g, std::span<const double> capacities, std::size_t s, std::size_t t);
/// Minimum over all edge subsets whose removal disconnects t from s (oracle, <= 20 edges).
double min_cut_bruteforce(const Digraph& g, std::span<const double> capacities, std::size_t s, std::size_t t);

/// CSV `tail,head,theta`.
void write_flow_csv(std::ostream& os, const FlowAssignment& flow);
/// CSV `N,R_N`.
void write_resistance_csv(std::ostream& os, std::span<const std::pair<std::size_t, double>> table);

}  // namespace rwde
