#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace rwde {

struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Digraph;
using DigraphPtr = std::shared_ptr<const Digraph>;

/// Finite directed multigraph (parallel edges and self-loops allowed). Every
/// vertex must have at least one outgoing edge. Immutable once built.
class Digraph {
 public:
  Digraph(std::size_t vertex_count, std::vector<Edge> edges);

  static DigraphPtr make(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// Edge indices with tail x, in increasing edge-index order.
  std::span<const std::size_t> out_edges(std::size_t x) const;
  /// Edge indices with head x, in increasing edge-index order.
  std::span<const std::size_t> in_edges(std::size_t x) const;

  bool strongly_connected() const noexcept { return strongly_connected_; }

  /// Dual graph: edge e of the result is edge e of this graph reversed.
  DigraphPtr reversed() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_, out_index_;
  std::vector<std::size_t> in_offsets_, in_index_;
  bool strongly_connected_ = false;
};

/// Digraph with a positive weight alpha_e per edge.
class WeightedDigraph {
 public:
  WeightedDigraph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> weights);
  WeightedDigraph(DigraphPtr topology, std::vector<double> weights);

  const Digraph& topology() const noexcept { return *topology_; }
  const DigraphPtr& topology_ptr() const noexcept { return topology_; }
  std::size_t vertex_count() const noexcept { return topology_->vertex_count(); }
  std::size_t edge_count() const noexcept { return topology_->edge_count(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t e) const { return weights_[e]; }
  /// alpha_x: total weight of edges leaving x.
  double vertex_weight(std::size_t x) const;

 private:
  DigraphPtr topology_;
  std::vector<double> weights_;
};

/// Transition probabilities omega_e, summing to one over the edges leaving
/// each vertex.
class Environment {
 public:
  Environment(DigraphPtr topology, std::vector<double> probabilities);

  const Digraph& topology() const noexcept { return *topology_; }
  const DigraphPtr& topology_ptr() const noexcept { return topology_; }
  std::size_t vertex_count() const noexcept { return topology_->vertex_count(); }
  std::size_t edge_count() const noexcept { return topology_->edge_count(); }
  std::span<const double> probabilities() const noexcept { return omega_; }
  double operator[](std::size_t e) const { return omega_[e]; }

  /// Set when a sampled probability was clamped at the 1e-300 floor.
  bool underflow() const noexcept { return underflow_; }
  void mark_underflow() noexcept { underflow_ = true; }

 private:
  DigraphPtr topology_;
  std::vector<double> omega_;
  bool underflow_ = false;
};

/// Nonnegative mass per vertex.
using VertexMeasure = std::vector<double>;

/// Closed directed path given by its edge sequence; consecutive edges chain
/// head to tail and the last head equals the first tail.
struct Cycle {
  std::vector<std::size_t> edges;
};

/// Validates the chaining invariant.
bool is_cycle(const Digraph& g, const Cycle& c);
/// The reversed cycle, read in the dual graph.
Cycle reverse_cycle(const Cycle& c);
/// All closed walks of length 1..max_length starting (and ending) at `start`.
std::vector<Cycle> enumerate_cycles(const Digraph& g, std::size_t start, std::size_t max_length);

/// Plain-text edge list. Header `vertices=<n> edges=<m>`, then one
/// `tail head value` line per edge.
void write_graph(std::ostream& os, const WeightedDigraph& g);
WeightedDigraph read_graph(std::istream& is);
void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);

}  // namespace rwde
