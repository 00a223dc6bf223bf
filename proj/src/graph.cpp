#include "rwde/graph.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "rwde/errors.hpp"

namespace rwde {

namespace {

void build_csr(std::size_t n, std::span<const Edge> edges, bool by_tail,
               std::vector<std::size_t>& offsets, std::vector<std::size_t>& index) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(by_tail ? e.tail : e.head) + 1];
  for (std::size_t x = 0; x < n; ++x) offsets[x + 1] += offsets[x];
  index.resize(edges.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::size_t x = by_tail ? edges[i].tail : edges[i].head;
    index[fill[x]++] = i;
  }
}

// Marks every vertex reachable from `root` following out-edges (forward) or
// in-edges (backward).
std::vector<char> reach(const Digraph& g, std::size_t root, bool forward) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<std::size_t> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    const auto adj = forward ? g.out_edges(x) : g.in_edges(x);
    for (std::size_t e : adj) {
      const std::size_t y = forward ? g.edge(e).head : g.edge(e).tail;
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

struct Header {
  std::size_t vertices = 0;
  std::size_t edges = 0;
};

Header read_header(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') break;
  }
  Header h;
  std::istringstream ss(line);
  std::string a, b;
  ss >> a >> b;
  auto value_of = [](const std::string& token, const std::string& key) -> std::size_t {
    if (token.rfind(key + "=", 0) != 0) throw UsageError("graph file: expected '" + key + "=<n>'");
    return static_cast<std::size_t>(std::stoull(token.substr(key.size() + 1)));
  };
  h.vertices = value_of(a, "vertices");
  h.edges = value_of(b, "edges");
  return h;
}

void read_body(std::istream& is, const Header& h, std::vector<Edge>& edges,
               std::vector<double>& values) {
  edges.reserve(h.edges);
  values.reserve(h.edges);
  for (std::size_t i = 0; i < h.edges; ++i) {
    Edge e;
    double v = 0.0;
    if (!(is >> e.tail >> e.head >> v)) throw UsageError("graph file: truncated edge list");
    edges.push_back(e);
    values.push_back(v);
  }
}

void write_body(std::ostream& os, const Digraph& g, std::span<const double> values) {
  os << "vertices=" << g.vertex_count() << " edges=" << g.edge_count() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    os << g.edge(i).tail << ' ' << g.edge(i).head << ' ' << values[i] << '\n';
  }
}

}  // namespace

Digraph::Digraph(std::size_t vertex_count, std::vector<Edge> edges)
    : n_(vertex_count), edges_(std::move(edges)) {
  if (n_ == 0) throw UsageError("Digraph: no vertices");
  for (const Edge& e : edges_) {
    if (e.tail >= n_ || e.head >= n_) throw UsageError("Digraph: edge endpoint out of range");
  }
  build_csr(n_, edges_, true, out_offsets_, out_index_);
  build_csr(n_, edges_, false, in_offsets_, in_index_);
  for (std::size_t x = 0; x < n_; ++x) {
    if (out_offsets_[x + 1] == out_offsets_[x]) {
      throw StructuralError("Digraph: vertex " + std::to_string(x) + " has no outgoing edge");
    }
  }
  const auto fwd = reach(*this, 0, true);
  const auto bwd = reach(*this, 0, false);
  strongly_connected_ = true;
  for (std::size_t x = 0; x < n_; ++x) {
    if (!fwd[x] || !bwd[x]) {
      strongly_connected_ = false;
      break;
    }
  }
}

DigraphPtr Digraph::make(std::size_t vertex_count, std::vector<Edge> edges) {
  return std::make_shared<const Digraph>(vertex_count, std::move(edges));
}

std::span<const std::size_t> Digraph::out_edges(std::size_t x) const {
  return {out_index_.data() + out_offsets_[x], out_offsets_[x + 1] - out_offsets_[x]};
}

std::span<const std::size_t> Digraph::in_edges(std::size_t x) const {
  return {in_index_.data() + in_offsets_[x], in_offsets_[x + 1] - in_offsets_[x]};
}

DigraphPtr Digraph::reversed() const {
  std::vector<Edge> rev;
  rev.reserve(edges_.size());
  for (const Edge& e : edges_) rev.push_back({e.head, e.tail});
  return make(n_, std::move(rev));
}

WeightedDigraph::WeightedDigraph(std::size_t vertex_count, std::vector<Edge> edges,
                                 std::vector<double> weights)
    : WeightedDigraph(Digraph::make(vertex_count, std::move(edges)), std::move(weights)) {}

WeightedDigraph::WeightedDigraph(DigraphPtr topology, std::vector<double> weights)
    : topology_(std::move(topology)), weights_(std::move(weights)) {
  if (!topology_) throw UsageError("WeightedDigraph: null topology");
  if (weights_.size() != topology_->edge_count()) {
    throw UsageError("WeightedDigraph: one weight per edge required");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError("WeightedDigraph: weights must be positive");
  }
}

double WeightedDigraph::vertex_weight(std::size_t x) const {
  double s = 0.0;
  for (std::size_t e : topology_->out_edges(x)) s += weights_[e];
  return s;
}

Environment::Environment(DigraphPtr topology, std::vector<double> probabilities)
    : topology_(std::move(topology)), omega_(std::move(probabilities)) {
  if (!topology_) throw UsageError("Environment: null topology");
  if (omega_.size() != topology_->edge_count()) {
    throw UsageError("Environment: one probability per edge required");
  }
  for (std::size_t x = 0; x < topology_->vertex_count(); ++x) {
    double s = 0.0;
    for (std::size_t e : topology_->out_edges(x)) {
      if (!(omega_[e] >= 0.0) || omega_[e] > 1.0) {
        throw ParameterError("Environment: probabilities must lie in [0,1]");
      }
      s += omega_[e];
    }
    if (std::abs(s - 1.0) > 1e-12) {
      throw ParameterError("Environment: outgoing probabilities at vertex " + std::to_string(x) +
                           " sum to " + std::to_string(s));
    }
  }
}

bool is_cycle(const Digraph& g, const Cycle& c) {
  if (c.edges.empty()) return false;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    if (c.edges[i] >= g.edge_count()) return false;
    const std::size_t next = c.edges[(i + 1) % c.edges.size()];
    if (next >= g.edge_count() || g.edge(c.edges[i]).head != g.edge(next).tail) return false;
  }
  return true;
}

Cycle reverse_cycle(const Cycle& c) { return Cycle{{c.edges.rbegin(), c.edges.rend()}}; }

std::vector<Cycle> enumerate_cycles(const Digraph& g, std::size_t start, std::size_t max_length) {
  if (start >= g.vertex_count()) throw UsageError("enumerate_cycles: start out of range");
  std::vector<Cycle> out;
  std::vector<std::size_t> path;
  // Depth-first over edge sequences; iterative to keep deep lengths cheap.
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (vertex, next out-edge slot)
  stack.emplace_back(start, 0);
  while (!stack.empty()) {
    auto& [x, slot] = stack.back();
    const auto outs = g.out_edges(x);
    if (slot == outs.size() || path.size() == max_length) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    const std::size_t e = outs[slot++];
    path.push_back(e);
    const std::size_t y = g.edge(e).head;
    if (y == start) out.push_back(Cycle{path});
    stack.emplace_back(y, 0);
  }
  return out;
}

void write_graph(std::ostream& os, const WeightedDigraph& g) {
  write_body(os, g.topology(), g.weights());
}

WeightedDigraph read_graph(std::istream& is) {
  const Header h = read_header(is);
  std::vector<Edge> edges;
  std::vector<double> weights;
  read_body(is, h, edges, weights);
  return WeightedDigraph(h.vertices, std::move(edges), std::move(weights));
}

void write_environment(std::ostream& os, const Environment& env) {
  write_body(os, env.topology(), env.probabilities());
}

Environment read_environment(std::istream& is) {
  const Header h = read_header(is);
  std::vector<Edge> edges;
  std::vector<double> probs;
  read_body(is, h, edges, probs);
  return Environment(Digraph::make(h.vertices, std::move(edges)), std::move(probs));
}

}  // namespace rwde
