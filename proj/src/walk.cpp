#include "rwde/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "rwde/errors.hpp"
#include "rwde/graph_env.hpp"
#include "rwde/sampling.hpp"
#include "rwde/stats.hpp"

namespace rwde {

std::vector<double> d_alpha(const LatticeWeights& w) {
  std::vector<double> v(w.dim());
  for (std::size_t i = 0; i < w.dim(); ++i) v[i] = w[i] - w[i + w.dim()];
  return v;
}

double kappa(const LatticeWeights& w) {
  double pair_max = 0.0;
  for (std::size_t i = 0; i < w.dim(); ++i) pair_max = std::max(pair_max, w[i] + w[i + w.dim()]);
  return 2.0 * w.total() - pair_max;
}

double kappa_lambda_box(const LatticeWeights& w, std::size_t r) {
  const std::size_t d = w.dim();
  if (d == 1) return w[0] + w[1];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i0 = 0; i0 < d; ++i0) {
    double rest = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (i != i0) rest += w[i] + w[i + d];
    }
    best = std::min(best, w[i0] + w[i0 + d] + static_cast<double>(r + 1) * rest);
  }
  return best;
}

StopRule StopRule::at_horizon(double n) {
  StopRule s;
  s.kind = Kind::horizon;
  s.horizon = n;
  return s;
}

StopRule StopRule::hitting_vertices(std::vector<std::size_t> targets) {
  StopRule s;
  s.kind = Kind::hit;
  s.vertices = std::move(targets);
  return s;
}

StopRule StopRule::hitting_sites(std::vector<Site> targets) {
  StopRule s;
  s.kind = Kind::hit;
  s.sites = std::move(targets);
  return s;
}

StopRule StopRule::exiting_box(std::int64_t radius) {
  StopRule s;
  s.kind = Kind::exit_box;
  s.radius = radius;
  return s;
}

namespace {

std::uint64_t step_count(double horizon) {
  if (!(horizon >= 0.0)) throw UsageError("walk: horizon must be nonnegative");
  return static_cast<std::uint64_t>(std::llround(horizon));
}

std::size_t pick(std::span<const double> probs, double u) {
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return probs.size() - 1;
}

bool outside_box(const Site& x, const Site& start, std::size_t d, std::int64_t r) {
  for (std::size_t k = 0; k < d; ++k) {
    if (std::abs(static_cast<std::int64_t>(x[k]) - start[k]) > r) return true;
  }
  return false;
}

// Records checkpoints with time <= now.
template <class Push>
void flush_checkpoints(const WalkOptions& opt, std::size_t& next, double now, Push push) {
  while (next < opt.checkpoints.size() && opt.checkpoints[next] <= now) push(opt.checkpoints[next++]);
}

void check_checkpoints(const WalkOptions& opt) {
  if (!std::is_sorted(opt.checkpoints.begin(), opt.checkpoints.end())) {
    throw UsageError("walk: checkpoints must be sorted");
  }
}

}  // namespace

WalkRecord quenched_walk(const Environment& env, std::size_t start, const StopRule& stop, RngHandle& rng,
                         const WalkOptions& options) {
  const Digraph& g = env.topology();
  if (start >= g.vertex_count()) throw UsageError("quenched_walk: start out of range");
  if (stop.kind == StopRule::Kind::exit_box) throw UsageError("quenched_walk: box rule needs a lattice");
  check_checkpoints(options);
  std::vector<char> target(g.vertex_count(), 0);
  for (std::size_t v : stop.vertices) {
    if (v >= g.vertex_count()) throw UsageError("quenched_walk: target out of range");
    target[v] = 1;
  }
  const std::uint64_t horizon =
      stop.kind == StopRule::Kind::horizon ? step_count(stop.horizon) : std::numeric_limits<std::uint64_t>::max();
  WalkRecord rec;
  std::size_t x = start;
  std::uint64_t n = 0;
  std::size_t next_cp = 0;
  auto push = [&](double t) {
    rec.times.push_back(t);
    rec.vertices.push_back(x);
  };
  if (options.keep_path) rec.vertex_path.push_back(x);
  flush_checkpoints(options, next_cp, 0.0, push);
  for (;;) {
    if (stop.kind == StopRule::Kind::hit && target[x]) {
      rec.outcome = WalkOutcome::hit;
      break;
    }
    if (stop.stop_on_return && n > 0 && x == start) {
      rec.outcome = WalkOutcome::returned;
      break;
    }
    if (n >= horizon) {
      rec.outcome = WalkOutcome::horizon;
      break;
    }
    if (n >= stop.max_steps) {
      rec.outcome = WalkOutcome::timeout;
      break;
    }
    const auto out = g.out_edges(x);
    double u = rng.uniform01();
    std::size_t e = out.back();
    for (std::size_t f : out) {
      if (u < env[f]) {
        e = f;
        break;
      }
      u -= env[f];
    }
    x = g.edge(e).head;
    ++n;
    if (options.keep_path) {
      rec.vertex_path.push_back(x);
      rec.edge_path.push_back(e);
    }
    flush_checkpoints(options, next_cp, static_cast<double>(n), push);
  }
  rec.steps = n;
  rec.final_time = static_cast<double>(n);
  if (rec.times.empty() || rec.times.back() < rec.final_time) push(rec.final_time);
  return rec;
}

WalkRecord quenched_walk(LatticeEnvironment& env, const Site& start, const StopRule& stop, RngHandle& rng,
                         const WalkOptions& options) {
  const std::size_t d = env.dim();
  check_checkpoints(options);
  const std::uint64_t horizon =
      stop.kind == StopRule::Kind::horizon ? step_count(stop.horizon) : std::numeric_limits<std::uint64_t>::max();
  WalkRecord rec;
  rec.dim = d;
  Site x = start;
  std::uint64_t n = 0;
  std::size_t next_cp = 0;
  auto push = [&](double t) {
    rec.times.push_back(t);
    rec.positions.push_back(x);
  };
  flush_checkpoints(options, next_cp, 0.0, push);

  if (d == 1 && stop.kind == StopRule::Kind::horizon && !options.keep_path && !stop.stop_on_return) {
    // One-dimensional fixed-horizon fast path.
    const std::uint64_t limit = std::min(horizon, stop.max_steps);
    std::int32_t pos = x[0];
    while (n < limit) {
      std::uint64_t until = limit;
      if (next_cp < options.checkpoints.size()) {
        until = std::min<std::uint64_t>(until, step_count(std::ceil(options.checkpoints[next_cp])));
      }
      for (; n < until; ++n) pos += rng.uniform01() < env.right(pos) ? 1 : -1;
      x[0] = pos;
      flush_checkpoints(options, next_cp, static_cast<double>(n), push);
    }
    rec.outcome = n >= horizon ? WalkOutcome::horizon : WalkOutcome::timeout;
  } else {
    std::unordered_set<Site, SiteHash> targets(stop.sites.begin(), stop.sites.end());
    if (options.keep_path) rec.path.push_back(x);
    for (;;) {
      if (stop.kind == StopRule::Kind::hit && targets.count(x)) {
        rec.outcome = WalkOutcome::hit;
        break;
      }
      if (stop.kind == StopRule::Kind::exit_box && outside_box(x, start, d, stop.radius)) {
        rec.outcome = WalkOutcome::exited;
        break;
      }
      if (stop.stop_on_return && n > 0 && x == start) {
        rec.outcome = WalkOutcome::returned;
        break;
      }
      if (n >= horizon) {
        rec.outcome = WalkOutcome::horizon;
        break;
      }
      if (n >= stop.max_steps) {
        rec.outcome = WalkOutcome::timeout;
        break;
      }
      x = env.weights().step(x, pick(env.at(x), rng.uniform01()));
      ++n;
      if (options.keep_path) rec.path.push_back(x);
      flush_checkpoints(options, next_cp, static_cast<double>(n), push);
    }
  }
  rec.steps = n;
  rec.final_time = static_cast<double>(n);
  if (rec.times.empty() || rec.times.back() < rec.final_time) push(rec.final_time);
  return rec;
}

WalkRecord reinforced_walk(const WeightedDigraph& g, std::size_t start, std::uint64_t horizon, RngHandle& rng,
                           const WalkOptions& options) {
  const Digraph& topo = g.topology();
  if (start >= topo.vertex_count()) throw UsageError("reinforced_walk: start out of range");
  check_checkpoints(options);
  std::vector<double> n_e(g.weights().begin(), g.weights().end());
  std::vector<double> n_x(topo.vertex_count());
  for (std::size_t x = 0; x < topo.vertex_count(); ++x) n_x[x] = g.vertex_weight(x);
  WalkRecord rec;
  std::size_t x = start;
  std::size_t next_cp = 0;
  auto push = [&](double t) {
    rec.times.push_back(t);
    rec.vertices.push_back(x);
  };
  if (options.keep_path) rec.vertex_path.push_back(x);
  flush_checkpoints(options, next_cp, 0.0, push);
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const auto out = topo.out_edges(x);
    double u = rng.uniform01() * n_x[x];
    std::size_t e = out.back();
    for (std::size_t f : out) {
      if (u < n_e[f]) {
        e = f;
        break;
      }
      u -= n_e[f];
    }
    n_e[e] += 1.0;
    n_x[x] += 1.0;
    x = topo.edge(e).head;
    if (options.keep_path) {
      rec.vertex_path.push_back(x);
      rec.edge_path.push_back(e);
    }
    flush_checkpoints(options, next_cp, static_cast<double>(n + 1), push);
  }
  rec.steps = horizon;
  rec.final_time = static_cast<double>(horizon);
  if (rec.times.empty() || rec.times.back() < rec.final_time) push(rec.final_time);
  return rec;
}

WalkRecord reinforced_walk(const LatticeWeights& w, const Site& start, std::uint64_t horizon, RngHandle& rng,
                           const WalkOptions& options) {
  check_checkpoints(options);
  const std::size_t nd = w.directions();
  std::unordered_map<Site, std::array<double, 2 * kMaxDim>, SiteHash> counts;
  WalkRecord rec;
  rec.dim = w.dim();
  Site x = start;
  std::size_t next_cp = 0;
  auto push = [&](double t) {
    rec.times.push_back(t);
    rec.positions.push_back(x);
  };
  if (options.keep_path) rec.path.push_back(x);
  flush_checkpoints(options, next_cp, 0.0, push);
  for (std::uint64_t n = 0; n < horizon; ++n) {
    auto it = counts.find(x);
    if (it == counts.end()) {
      std::array<double, 2 * kMaxDim> init{};
      for (std::size_t i = 0; i < nd; ++i) init[i] = w[i];
      it = counts.emplace(x, init).first;
    }
    auto& c = it->second;
    double total = 0.0;
    for (std::size_t i = 0; i < nd; ++i) total += c[i];
    double u = rng.uniform01() * total;
    std::size_t dir = nd - 1;
    for (std::size_t i = 0; i < nd; ++i) {
      if (u < c[i]) {
        dir = i;
        break;
      }
      u -= c[i];
    }
    c[dir] += 1.0;
    x = w.step(x, dir);
    if (options.keep_path) rec.path.push_back(x);
    flush_checkpoints(options, next_cp, static_cast<double>(n + 1), push);
  }
  rec.steps = horizon;
  rec.final_time = static_cast<double>(horizon);
  if (rec.times.empty() || rec.times.back() < rec.final_time) push(rec.final_time);
  return rec;
}

double reinforced_path_probability(const WeightedDigraph& g, std::span<const std::size_t> edges) {
  const Digraph& topo = g.topology();
  std::vector<double> n_e(g.weights().begin(), g.weights().end());
  std::vector<double> n_x(topo.vertex_count());
  for (std::size_t x = 0; x < topo.vertex_count(); ++x) n_x[x] = g.vertex_weight(x);
  double p = 1.0;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::size_t e = edges[k];
    if (e >= topo.edge_count()) throw UsageError("reinforced_path_probability: edge out of range");
    if (k > 0 && topo.edge(edges[k - 1]).head != topo.edge(e).tail) {
      throw UsageError("reinforced_path_probability: edges do not chain");
    }
    const std::size_t x = topo.edge(e).tail;
    p *= n_e[e] / n_x[x];
    n_e[e] += 1.0;
    n_x[x] += 1.0;
  }
  return p;
}

double dirichlet_path_probability(const WeightedDigraph& g, std::span<const std::size_t> edges) {
  std::vector<double> counts(g.edge_count(), 0.0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k] >= g.edge_count()) throw UsageError("dirichlet_path_probability: edge out of range");
    if (k > 0 && g.topology().edge(edges[k - 1]).head != g.topology().edge(edges[k]).tail) {
      throw UsageError("dirichlet_path_probability: edges do not chain");
    }
    counts[edges[k]] += 1.0;
  }
  return environment_moment(g, counts).value;
}

std::vector<std::vector<std::size_t>> enumerate_paths(const Digraph& g, std::size_t start, std::size_t length) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path;
  auto rec = [&](auto&& self, std::size_t x) -> void {
    if (path.size() == length) {
      out.push_back(path);
      return;
    }
    for (std::size_t e : g.out_edges(x)) {
      path.push_back(e);
      self(self, g.edge(e).head);
      path.pop_back();
    }
  };
  rec(rec, start);
  return out;
}

Regeneration regeneration_times(std::span<const double> p) {
  Regeneration r;
  if (p.size() < 2) return r;
  std::vector<double> suffix_min(p.size());
  suffix_min.back() = p.back();
  for (std::size_t j = p.size() - 1; j-- > 0;) suffix_min[j] = std::min(p[j], suffix_min[j + 1]);
  double prefix_max = p[0];
  std::uint64_t last = 0;
  for (std::size_t n = 1; n < p.size(); ++n) {
    if (prefix_max < p[n] && p[n] <= suffix_min[n]) {
      r.taus.push_back(n);
      r.displacements.push_back(p[n] - p[last]);
      last = n;
    }
    prefix_max = std::max(prefix_max, p[n]);
  }
  // The last candidate is only confirmed up to the horizon.
  if (!r.taus.empty()) {
    r.taus.pop_back();
    r.displacements.pop_back();
    r.censored = 1;
  }
  return r;
}

Regeneration regeneration_times(const WalkRecord& record, std::span<const double> l) {
  if (record.path.empty()) throw UsageError("regeneration_times: record has no full path");
  if (l.size() != record.dim) throw UsageError("regeneration_times: direction has wrong dimension");
  std::vector<double> proj(record.path.size());
  for (std::size_t n = 0; n < proj.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < l.size(); ++k) s += l[k] * record.path[n][k];
    proj[n] = s;
  }
  return regeneration_times(proj);
}

double gamma_factor(LatticeEnvironment& env, const Site& x, std::size_t r, std::uint64_t max_paths) {
  const std::size_t d = env.dim();
  const std::size_t nd = 2 * d;
  if (r == 0) {
    env.at(x);
    return 1.0;  // every one-step path exits; the masses sum to one
  }
  const auto rr = static_cast<std::int64_t>(r);
  const std::size_t side = 2 * r + 1;
  std::size_t volume = 1;
  for (std::size_t k = 0; k < d; ++k) volume *= side;
  std::vector<char> visited(volume, 0);
  auto local = [&](const Site& y) {
    std::size_t idx = 0;
    for (std::size_t k = d; k-- > 0;) idx = idx * side + static_cast<std::size_t>(y[k] - x[k] + rr);
    return idx;
  };
  const LatticeWeights& w = env.weights();
  std::uint64_t paths = 0;
  double total = 0.0;
  auto dfs = [&](auto&& self, const Site& y, double weight) -> void {
    std::array<double, 2 * kMaxDim> p{};
    const auto probs = env.at(y);
    std::copy(probs.begin(), probs.end(), p.begin());
    visited[local(y)] = 1;
    for (std::size_t i = 0; i < nd; ++i) {
      const Site z = w.step(y, i);
      if (outside_box(z, x, d, rr)) {
        total += weight * p[i];
        if (++paths > max_paths) throw ResourceError("gamma_factor: path enumeration guard exceeded");
      } else if (!visited[local(z)]) {
        self(self, z, weight * p[i]);
      }
    }
    visited[local(y)] = 0;
  };
  dfs(dfs, x, 1.0);
  return 1.0 / total;
}

WalkRecord accelerated_walk(LatticeEnvironment& env, std::size_t r, const Site& start, double horizon,
                            RngHandle& rng, const WalkOptions& options) {
  if (!(horizon >= 0.0)) throw UsageError("accelerated_walk: horizon must be nonnegative");
  check_checkpoints(options);
  std::unordered_map<Site, double, SiteHash> gamma;
  WalkRecord rec;
  rec.dim = env.dim();
  Site x = start;
  double t = 0.0;
  std::size_t next_cp = 0;
  auto push = [&](double time) {
    rec.times.push_back(time);
    rec.positions.push_back(x);
  };
  flush_checkpoints(options, next_cp, 0.0, push);
  std::uint64_t n = 0;
  for (;;) {
    auto it = gamma.find(x);
    if (it == gamma.end()) it = gamma.emplace(x, gamma_factor(env, x, r)).first;
    const double hold = rng.exponential() / it->second;
    if (t + hold > horizon) {
      t = horizon;
      rec.outcome = WalkOutcome::horizon;
      break;
    }
    if (n >= kDefaultStepGuard) {
      rec.outcome = WalkOutcome::timeout;
      break;
    }
    if (x == start) rec.start_holding_times.push_back(hold);
    // Positions are right-continuous: checkpoints before the jump see x.
    while (next_cp < options.checkpoints.size() && options.checkpoints[next_cp] < t + hold) {
      push(options.checkpoints[next_cp++]);
    }
    t += hold;
    x = env.weights().step(x, pick(env.at(x), rng.uniform01()));
    ++n;
  }
  flush_checkpoints(options, next_cp, t, push);
  rec.steps = n;
  rec.final_time = t;
  if (rec.times.empty() || rec.times.back() < rec.final_time) push(rec.final_time);
  return rec;
}

ExponentFit displacement_exponent(std::span<const WalkRecord> records, std::span<const double> l) {
  if (records.empty()) throw UsageError("displacement_exponent: empty ensemble");
  const auto& times = records.front().times;
  for (const auto& r : records) {
    if (r.times.size() < times.size() || !std::equal(times.begin(), times.end(), r.times.begin())) {
      throw UsageError("displacement_exponent: records must share checkpoint times");
    }
    if (r.dim != l.size()) throw UsageError("displacement_exponent: direction has wrong dimension");
  }
  ExponentFit fit;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) continue;
    std::vector<double> logs;
    for (const auto& r : records) {
      double s = 0.0;
      for (std::size_t i = 0; i < l.size(); ++i) s += l[i] * r.positions[k][i];
      if (s > 0.0) logs.push_back(std::log(s));
      else ++fit.excluded;
    }
    if (logs.empty()) continue;
    fit.log_times.push_back(std::log(times[k]));
    fit.median_log_displacement.push_back(median(std::move(logs)));
  }
  if (fit.log_times.size() < 2) throw UsageError("displacement_exponent: need two usable checkpoints");
  const LinearFit lf = least_squares(fit.log_times, fit.median_log_displacement);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

void write_walk_csv(std::ostream& os, std::span<const WalkRecord> records) {
  const std::size_t d = records.empty() ? 0 : records.front().dim;
  os << "replica,time";
  if (d == 0) os << ",vertex";
  for (std::size_t k = 0; k < d; ++k) os << ",x_" << (k + 1);
  os << '\n';
  os.precision(17);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
      os << r << ',' << rec.times[i];
      if (d == 0) os << ',' << rec.vertices[i];
      for (std::size_t k = 0; k < d; ++k) os << ',' << rec.positions[i][k];
      os << '\n';
    }
  }
}

void write_regeneration_csv(std::ostream& os, std::span<const Regeneration> summaries) {
  os << "replica,k,tau_k,displacement\n";
  os.precision(17);
  for (std::size_t r = 0; r < summaries.size(); ++r) {
    for (std::size_t k = 0; k < summaries[r].taus.size(); ++k) {
      os << r << ',' << (k + 1) << ',' << summaries[r].taus[k] << ',' << summaries[r].displacements[k] << '\n';
    }
  }
}

}  // namespace rwde
