#include "rwde/graph_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "linalg.hpp"
#include "rwde/errors.hpp"
#include "rwde/special.hpp"

namespace rwde {

namespace {

using detail::LinearSystem;
using detail::Triplet;

// Transient part of a hitting problem: vertices reachable from the starts
// without entering the absorbing set.
struct Transient {
  std::vector<std::size_t> vertices;
  std::vector<std::ptrdiff_t> pos;
};

Transient transient_set(const Digraph& g, const std::vector<char>& absorbing,
                        std::span<const std::size_t> starts) {
  Transient t;
  t.pos.assign(g.vertex_count(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t s : starts) {
    if (!absorbing[s] && t.pos[s] < 0) {
      t.pos[s] = static_cast<std::ptrdiff_t>(t.vertices.size());
      t.vertices.push_back(s);
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t e : g.out_edges(x)) {
      const std::size_t y = g.edge(e).head;
      if (absorbing[y] || t.pos[y] >= 0) continue;
      t.pos[y] = static_cast<std::ptrdiff_t>(t.vertices.size());
      t.vertices.push_back(y);
      stack.push_back(y);
    }
  }
  // Every transient vertex must be able to reach the absorbing set.
  std::vector<char> ok(g.vertex_count(), 0);
  for (std::size_t v : t.vertices) {
    for (std::size_t e : g.out_edges(v)) {
      if (absorbing[g.edge(e).head]) {
        ok[v] = 1;
        stack.push_back(v);
        break;
      }
    }
  }
  while (!stack.empty()) {
    const std::size_t y = stack.back();
    stack.pop_back();
    for (std::size_t e : g.in_edges(y)) {
      const std::size_t x = g.edge(e).tail;
      if (t.pos[x] >= 0 && !ok[x]) {
        ok[x] = 1;
        stack.push_back(x);
      }
    }
  }
  for (std::size_t v : t.vertices) {
    if (!ok[v]) {
      throw StructuralError("vertex " + std::to_string(v) + " cannot reach the target set");
    }
  }
  return t;
}

// Triplets of I - P restricted to the transient set.
std::vector<Triplet> transient_matrix(const Environment& env, const Transient& t) {
  const Digraph& g = env.topology();
  std::vector<Triplet> m;
  m.reserve(t.vertices.size() * 5);
  for (std::size_t i = 0; i < t.vertices.size(); ++i) {
    const auto row = static_cast<int>(i);
    m.emplace_back(row, row, 1.0);
    for (std::size_t e : g.out_edges(t.vertices[i])) {
      const std::ptrdiff_t j = t.pos[g.edge(e).head];
      if (j >= 0) m.emplace_back(row, static_cast<int>(j), -env[e]);
    }
  }
  return m;
}

std::vector<char> mask_of(std::size_t n, std::span<const std::size_t> set, const char* fn) {
  std::vector<char> mask(n, 0);
  for (std::size_t v : set) {
    if (v >= n) throw UsageError(std::string(fn) + ": vertex out of range");
    mask[v] = 1;
  }
  return mask;
}

void require_strongly_connected(const Digraph& g, const char* fn) {
  if (!g.strongly_connected()) {
    throw StructuralError(std::string(fn) + ": graph is not strongly connected");
  }
}

}  // namespace

std::vector<double> divergence(const Digraph& g, std::span<const double> values) {
  if (values.size() != g.edge_count()) throw UsageError("divergence: one value per edge required");
  std::vector<double> div(g.vertex_count(), 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    div[g.edge(e).tail] += values[e];
    div[g.edge(e).head] -= values[e];
  }
  return div;
}

Environment sample_environment(const WeightedDigraph& g, RngHandle& rng) {
  const Digraph& topo = g.topology();
  std::vector<double> omega(g.edge_count());
  std::vector<double> w, p;
  bool clamped = false;
  for (std::size_t x = 0; x < topo.vertex_count(); ++x) {
    const auto out = topo.out_edges(x);
    w.resize(out.size());
    p.resize(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) w[k] = g.weight(out[k]);
    clamped |= sample_dirichlet_into(w, rng, p);
    for (std::size_t k = 0; k < out.size(); ++k) omega[out[k]] = p[k];
  }
  Environment env(g.topology_ptr(), std::move(omega));
  if (clamped) env.mark_underflow();
  return env;
}

VertexMeasure invariant_measure(const Environment& env) {
  const Digraph& g = env.topology();
  require_strongly_connected(g, "invariant_measure");
  const std::size_t n = g.vertex_count();
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<Triplet> m;
  m.reserve(g.edge_count() + 2 * n);
  const auto last = static_cast<int>(n - 1);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto head = static_cast<int>(g.edge(e).head);
    if (head != last) m.emplace_back(head, static_cast<int>(g.edge(e).tail), env[e]);
  }
  for (std::size_t x = 0; x + 1 < n; ++x) m.emplace_back(static_cast<int>(x), static_cast<int>(x), -1.0);
  for (std::size_t x = 0; x < n; ++x) m.emplace_back(last, static_cast<int>(x), 1.0);
  LinearSystem sys(n);
  if (!sys.factorize(m)) throw StructuralError("invariant_measure: singular system");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  rhs[last] = 1.0;
  const Eigen::VectorXd sol = sys.solve(rhs);
  VertexMeasure pi(n);
  for (std::size_t x = 0; x < n; ++x) pi[x] = std::max(0.0, sol[static_cast<Eigen::Index>(x)]);
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& p : pi) p /= s;
  return pi;
}

double invariant_residual(const Environment& env, std::span<const double> pi) {
  const Digraph& g = env.topology();
  std::vector<double> next(g.vertex_count(), 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) next[g.edge(e).head] += pi[g.edge(e).tail] * env[e];
  double r = 0.0;
  for (std::size_t x = 0; x < next.size(); ++x) r = std::max(r, std::abs(next[x] - pi[x]));
  return r;
}

Environment reverse_environment(const Environment& env) {
  return reverse_environment(env, env.topology().reversed());
}

Environment reverse_environment(const Environment& env, DigraphPtr dual) {
  const Digraph& g = env.topology();
  if (!dual || dual->edge_count() != g.edge_count()) {
    throw UsageError("reverse_environment: dual topology does not match");
  }
  const VertexMeasure pi = invariant_measure(env);
  std::vector<double> rev(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    rev[e] = pi[g.edge(e).tail] * env[e] / pi[g.edge(e).head];
  }
  // Renormalize away rounding so the result passes the 1e-12 row check.
  for (std::size_t x = 0; x < dual->vertex_count(); ++x) {
    double s = 0.0;
    for (std::size_t e : dual->out_edges(x)) s += rev[e];
    for (std::size_t e : dual->out_edges(x)) rev[e] /= s;
  }
  return Environment(std::move(dual), std::move(rev));
}

WeightedDigraph reversed_weights(const WeightedDigraph& g) {
  return WeightedDigraph(g.topology().reversed(), {g.weights().begin(), g.weights().end()});
}

double cycle_weight(const Environment& env, const Cycle& sigma) {
  if (!is_cycle(env.topology(), sigma)) throw UsageError("cycle_weight: not a cycle");
  double w = 1.0;
  for (std::size_t e : sigma.edges) w *= env[e];
  return w;
}

struct AbsorptionSolver::Impl {
  DigraphPtr topology;
  std::size_t start = 0;
  int fixed = -1;  // 1 or 0 when start itself is absorbing
  std::vector<char> in_a;
  Transient t;
  LinearSystem sys{0};
  double residual = 0.0;
};

AbsorptionSolver::AbsorptionSolver(DigraphPtr topology, std::size_t start,
                                   std::span<const std::size_t> target_a,
                                   std::span<const std::size_t> target_b)
    : impl_(std::make_unique<Impl>()) {
  if (!topology) throw UsageError("AbsorptionSolver: null topology");
  const std::size_t n = topology->vertex_count();
  if (start >= n) throw UsageError("AbsorptionSolver: start out of range");
  impl_->in_a = mask_of(n, target_a, "absorption_probability");
  const auto in_b = mask_of(n, target_b, "absorption_probability");
  std::vector<char> absorbing(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (impl_->in_a[v] && in_b[v]) throw UsageError("absorption_probability: target sets overlap");
    absorbing[v] = impl_->in_a[v] || in_b[v];
  }
  impl_->topology = std::move(topology);
  impl_->start = start;
  if (absorbing[start]) {
    impl_->fixed = impl_->in_a[start] ? 1 : 0;
    return;
  }
  const std::size_t starts[] = {start};
  impl_->t = transient_set(*impl_->topology, absorbing, starts);
  impl_->sys = LinearSystem(impl_->t.vertices.size());
}

AbsorptionSolver::~AbsorptionSolver() = default;
AbsorptionSolver::AbsorptionSolver(AbsorptionSolver&&) noexcept = default;
AbsorptionSolver& AbsorptionSolver::operator=(AbsorptionSolver&&) noexcept = default;

double AbsorptionSolver::solve(const Environment& env) {
  Impl& s = *impl_;
  if (&env.topology() != s.topology.get() && env.edge_count() != s.topology->edge_count()) {
    throw UsageError("AbsorptionSolver: environment on a different graph");
  }
  if (s.fixed >= 0) return s.fixed;
  const Digraph& g = *s.topology;
  const auto& t = s.t;
  if (!s.sys.factorize(transient_matrix(env, t))) {
    throw StructuralError("absorption_probability: singular system");
  }
  const auto m = static_cast<Eigen::Index>(t.vertices.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t e : g.out_edges(t.vertices[static_cast<std::size_t>(i)])) {
      if (s.in_a[g.edge(e).head]) b[i] += env[e];
    }
  }
  const Eigen::VectorXd h = s.sys.solve(b);
  double res = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t e : g.out_edges(t.vertices[static_cast<std::size_t>(i)])) {
      const std::size_t y = g.edge(e).head;
      acc += env[e] * (t.pos[y] >= 0 ? h[t.pos[y]] : (s.in_a[y] ? 1.0 : 0.0));
    }
    res = std::max(res, std::abs(acc - h[i]));
  }
  s.residual = res;
  return std::clamp(h[t.pos[s.start]], 0.0, 1.0);
}

double AbsorptionSolver::last_residual() const noexcept { return impl_->residual; }

double absorption_probability(const Environment& env, std::size_t start,
                              std::span<const std::size_t> target_a,
                              std::span<const std::size_t> target_b) {
  AbsorptionSolver solver(env.topology_ptr(), start, target_a, target_b);
  return solver.solve(env);
}

std::vector<double> return_edge_distribution(const Environment& env, std::size_t x) {
  const Digraph& g = env.topology();
  if (x >= g.vertex_count()) throw UsageError("return_edge_distribution: vertex out of range");
  // Split x: the copy keeping the incoming edges is absorbing.
  std::vector<char> absorbing(g.vertex_count(), 0);
  absorbing[x] = 1;
  std::vector<std::size_t> starts;
  for (std::size_t e : g.out_edges(x)) starts.push_back(g.edge(e).head);
  const Transient t = transient_set(g, absorbing, starts);
  const auto in = g.in_edges(x);
  const auto m = static_cast<Eigen::Index>(t.vertices.size());
  const auto k = static_cast<Eigen::Index>(in.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, k);
  if (m > 0) {
    LinearSystem sys(t.vertices.size());
    if (!sys.factorize(transient_matrix(env, t))) {
      throw StructuralError("return_edge_distribution: singular system");
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, k);
    for (Eigen::Index c = 0; c < k; ++c) {
      const std::size_t entry = in[static_cast<std::size_t>(c)];
      const std::ptrdiff_t i = t.pos[g.edge(entry).tail];
      if (i >= 0) b(i, c) = env[entry];
    }
    h = sys.solve(b);
  }
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t c = 0; c < in.size(); ++c) {
    double acc = 0.0;
    for (std::size_t e : g.out_edges(x)) {
      const std::size_t y = g.edge(e).head;
      if (y == x) acc += env[e] * (e == in[c] ? 1.0 : 0.0);
      else acc += env[e] * h(t.pos[y], static_cast<Eigen::Index>(c));
    }
    out[c] = std::clamp(acc, 0.0, 1.0);
  }
  return out;
}

double return_via_edge_probability(const Environment& env, std::size_t x, std::size_t entry) {
  const Digraph& g = env.topology();
  if (entry >= g.edge_count() || x >= g.vertex_count() || g.edge(entry).head != x) {
    throw StructuralError("return_via_edge_probability: edge does not enter x");
  }
  const auto in = g.in_edges(x);
  const auto it = std::find(in.begin(), in.end(), entry);
  return return_edge_distribution(env, x)[static_cast<std::size_t>(it - in.begin())];
}

double green_function_finite(const Environment& env, std::span<const std::size_t> a, std::size_t x) {
  const Digraph& g = env.topology();
  const auto in_a = mask_of(g.vertex_count(), a, "green_function_finite");
  if (!in_a[x]) throw UsageError("green_function_finite: x must belong to A");
  std::vector<char> absorbing(g.vertex_count());
  for (std::size_t v = 0; v < absorbing.size(); ++v) absorbing[v] = !in_a[v];
  const std::size_t starts[] = {x};
  const Transient t = transient_set(g, absorbing, starts);
  LinearSystem sys(t.vertices.size());
  if (!sys.factorize(transient_matrix(env, t))) throw StructuralError("green_function_finite: no exit");
  // Column x of (I - P_A)^{-1}.
  const auto m = static_cast<Eigen::Index>(t.vertices.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b[t.pos[x]] = 1.0;
  const Eigen::VectorXd col = sys.solve(b);
  return col[t.pos[x]];
}

std::vector<double> expected_hitting_time(const Environment& env, std::span<const std::size_t> target) {
  const Digraph& g = env.topology();
  const auto absorbing = mask_of(g.vertex_count(), target, "expected_hitting_time");
  std::vector<std::size_t> all(g.vertex_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Transient t = transient_set(g, absorbing, all);
  std::vector<double> out(g.vertex_count(), 0.0);
  if (t.vertices.empty()) return out;
  LinearSystem sys(t.vertices.size());
  if (!sys.factorize(transient_matrix(env, t))) throw StructuralError("expected_hitting_time: singular");
  const Eigen::VectorXd h =
      sys.solve(Eigen::VectorXd(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(t.vertices.size()))));
  for (std::size_t i = 0; i < t.vertices.size(); ++i) out[t.vertices[i]] = h[static_cast<Eigen::Index>(i)];
  return out;
}

double matrix_tree_minor(const Digraph& g, std::span<const double> z, std::size_t x0) {
  if (z.size() != g.edge_count()) throw UsageError("matrix_tree_minor: one value per edge required");
  const std::size_t n = g.vertex_count();
  if (x0 >= n) throw UsageError("matrix_tree_minor: root out of range");
  if (n == 1) return 1.0;
  auto idx = [x0](std::size_t v) { return static_cast<Eigen::Index>(v < x0 ? v : v - 1); };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [x, y] = g.edge(e);
    if (x == y || x == x0) continue;
    m(idx(x), idx(x)) += z[e];
    if (y != x0) m(idx(x), idx(y)) -= z[e];
  }
  return m.partialPivLu().determinant();
}

double matrix_tree_bruteforce(const Digraph& g, std::span<const double> z, std::size_t x0) {
  const std::size_t n = g.vertex_count();
  // A tree toward x0 picks one outgoing edge at every other vertex and has
  // no cycle; enumerate the choices.
  std::vector<std::size_t> others;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != x0) others.push_back(v);
  }
  std::vector<std::size_t> choice(others.size(), 0);
  std::vector<std::size_t> next(n);
  double total = 0.0;
  for (;;) {
    bool valid = true;
    double w = 1.0;
    for (std::size_t i = 0; i < others.size(); ++i) {
      const std::size_t e = g.out_edges(others[i])[choice[i]];
      next[others[i]] = g.edge(e).head;
      w *= z[e];
    }
    for (std::size_t v : others) {
      std::size_t cur = v;
      std::size_t steps = 0;
      while (cur != x0 && steps <= n) {
        cur = next[cur];
        ++steps;
      }
      if (cur != x0) {
        valid = false;
        break;
      }
    }
    if (valid) total += w;
    std::size_t i = 0;
    while (i < others.size() && ++choice[i] == g.out_edges(others[i]).size()) choice[i++] = 0;
    if (i == others.size()) break;
  }
  return total;
}

std::vector<double> occupation_coordinates(const Environment& env, std::size_t e0) {
  if (e0 >= env.edge_count()) throw UsageError("occupation_coordinates: edge out of range");
  const Digraph& g = env.topology();
  const VertexMeasure pi = invariant_measure(env);
  const double ref = pi[g.edge(e0).tail] * env[e0];
  std::vector<double> z(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) z[e] = pi[g.edge(e).tail] * env[e] / ref;
  return z;
}

double log_occupation_density(const WeightedDigraph& g, std::span<const double> z, std::size_t e0,
                              std::size_t x0) {
  const Digraph& topo = g.topology();
  if (z.size() != topo.edge_count()) throw UsageError("occupation_density: one value per edge required");
  if (e0 >= topo.edge_count() || x0 >= topo.vertex_count()) {
    throw UsageError("occupation_density: index out of range");
  }
  for (double v : z) {
    if (!(v > 0.0)) throw ParameterError("occupation_density: z must be positive");
  }
  if (std::abs(z[e0] - 1.0) > 1e-9) throw ParameterError("occupation_density: z_e0 must equal 1");
  const auto div = divergence(topo, z);
  double scale = 0.0;
  for (double v : z) scale = std::max(scale, v);
  for (double d : div) {
    if (std::abs(d) > 1e-9 * scale) throw ParameterError("occupation_density: div z must vanish");
  }
  double acc = 0.0;
  for (std::size_t x = 0; x < topo.vertex_count(); ++x) {
    const double ax = g.vertex_weight(x);
    double zx = 0.0;
    for (std::size_t e : topo.out_edges(x)) zx += z[e];
    acc += log_gamma(ax) - ax * std::log(zx);
  }
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    acc += -log_gamma(g.weight(e)) + (g.weight(e) - 1.0) * std::log(z[e]);
  }
  return acc + std::log(matrix_tree_minor(topo, z, x0));
}

double occupation_density(const WeightedDigraph& g, std::span<const double> z, std::size_t e0,
                          std::size_t x0) {
  return std::exp(log_occupation_density(g, z, e0, x0));
}

ExtendedReal environment_moment(const WeightedDigraph& g, std::span<const double> exponents) {
  const Digraph& topo = g.topology();
  if (exponents.size() != topo.edge_count()) throw UsageError("environment_moment: one exponent per edge");
  double value = 1.0;
  std::vector<double> w, xi;
  for (std::size_t x = 0; x < topo.vertex_count(); ++x) {
    w.clear();
    xi.clear();
    for (std::size_t e : topo.out_edges(x)) {
      w.push_back(g.weight(e));
      xi.push_back(exponents[e]);
    }
    const ExtendedReal m = dirichlet_joint_moment(w, xi);
    if (m.infinite) return ExtendedReal::infinity();
    value *= m.value;
  }
  return {value, false};
}

}  // namespace rwde
