#include "rwde/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "rwde/builders.hpp"
#include "rwde/errors.hpp"
#include "rwde/flows.hpp"
#include "rwde/graph_env.hpp"
#include "rwde/onedim.hpp"
#include "rwde/parallel.hpp"
#include "rwde/sampling.hpp"
#include "rwde/special.hpp"
#include "rwde/stats.hpp"
#include "rwde/walk.hpp"

namespace rwde {

namespace {

using Json = nlohmann::ordered_json;
constexpr auto kTrivial = Provenance::trivial;
constexpr auto kPublished = Provenance::published;
constexpr auto kDerived = Provenance::derived;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParameterError("parameter " + key + ": not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ParameterError("parameter " + key + ": not a number: '" + text + "'");
  return v;
}

class Params {
 public:
  Params(const ExperimentInfo& info, const std::map<std::string, std::string>& given) : values_(info.defaults) {
    for (const auto& [k, v] : given) {
      if (!values_.count(k)) throw UsageError(info.name + ": unknown parameter '" + k + "'");
      values_[k] = trim(v);
    }
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  std::string text(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const { return parse_real(key, values_.at(key)); }

  double positive(const std::string& key) const {
    const double v = real(key);
    if (!(v > 0.0)) throw ParameterError("parameter " + key + " must be positive");
    return v;
  }

  std::size_t count(const std::string& key, std::size_t min = 1) const {
    const double v = real(key);
    if (v < static_cast<double>(min) || v != std::floor(v) || v > 1e15) {
      throw ParameterError("parameter " + key + " must be an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ParameterError("parameter " + key + " is empty");
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (double v : reals(key)) {
      if (v < 1.0 || v != std::floor(v)) throw ParameterError("parameter " + key + " must list positive integers");
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  }

  /// `lo:hi:n`, n evenly spaced points including both ends.
  std::vector<double> grid(const std::string& key) const {
    std::vector<std::string> parts;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw ParameterError("parameter " + key + " must be lo:hi:n");
    const double lo = parse_real(key, parts[0]), hi = parse_real(key, parts[1]);
    const double n = parse_real(key, parts[2]);
    if (n < 2.0 || n != std::floor(n) || !(hi > lo)) throw ParameterError("parameter " + key + " must be lo:hi:n with hi > lo, n >= 2");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1.0);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

struct Context {
  const ExperimentConfig& config;
  Params params;
  Verdict& verdict;

  std::size_t threads() const { return std::max<std::size_t>(1, config.threads); }
  RngHandle rng(std::uint64_t stream = 0) const { return RngHandle(config.seed, stream); }

  void check(std::string name, double measured, double expected, double tol, Comparison cmp, Provenance prov) {
    verdict.checks.push_back(make_check(std::move(name), measured, expected, tol, cmp, prov));
  }
  void metric(const std::string& name, double value) { verdict.metrics[name] = value; }

  void artifact(const std::string& suffix, const std::function<void(std::ostream&)>& write) {
    if (config.out_dir.empty()) return;
    std::filesystem::create_directories(config.out_dir);
    const std::string file = config.experiment + "_" + suffix + ".csv";
    std::ofstream os(std::filesystem::path(config.out_dir) / file);
    if (!os) throw UsageError("cannot write " + file);
    os.precision(17);
    write(os);
    verdict.artifacts.push_back(file);
  }
};

std::size_t block_count(std::size_t total, std::size_t block) { return (total + block - 1) / block; }

/// samples[i] = draw(rng(i)) computed in parallel; result independent of thread count.
std::vector<double> parallel_samples(const Context& c, std::uint64_t stream, std::size_t n,
                                     const std::function<double(RngHandle&)>& draw) {
  std::vector<double> out(n);
  const RngHandle base = c.rng(stream);
  constexpr std::size_t kBlock = 4096;
  parallel_for(block_count(n, kBlock), c.threads(), [&](std::size_t b) {
    for (std::size_t i = b * kBlock; i < std::min(n, (b + 1) * kBlock); ++i) {
      RngHandle r = base.split(i);
      out[i] = draw(r);
    }
  });
  return out;
}

double ks_beta(std::span<const double> xs, double a, double b) {
  return ks_statistic(xs, [a, b](double x) { return beta_cdf(a, b, std::clamp(x, 0.0, 1.0)); });
}

LatticeWeights lattice_weights(const Params& p, const std::string& dim_key, const std::string& w_key) {
  const std::size_t d = p.count(dim_key);
  if (d > kMaxDim) throw ParameterError("dimension above " + std::to_string(kMaxDim));
  auto w = p.reals(w_key);
  if (w.size() != 2 * d) throw ParameterError("parameter " + w_key + " needs 2d values");
  return LatticeWeights(d, std::move(w));
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> monomials(std::size_t k, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(k, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == k) {
      if (left < max_order) out.push_back(e);  // total order >= 1
      return;
    }
    for (int a = 0; a <= left; ++a) {
      e[i] = a;
      rec(i + 1, left - a);
    }
    e[i] = 0;
  };
  rec(0, max_order);
  return out;
}

void reversal_check(Context& c) {
  const auto& p = c.params;
  const std::size_t d = p.count("dim"), n = p.count("torus", 2);
  const auto alpha = p.reals("weights");
  if (alpha.size() != 2 * d) throw ParameterError("weights needs 2d values");
  const std::size_t samples = p.count("samples", 2);
  const int order = static_cast<int>(p.count("max-order"));
  const double sigma = p.positive("sigma");

  const WeightedDigraph g = build_torus(d, n, alpha);
  const WeightedDigraph dual = reversed_weights(g);
  const Digraph& dt = dual.topology();
  const std::size_t V = g.vertex_count(), E = g.edge_count();

  const auto div = divergence(g.topology(), g.weights());
  double max_div = 0.0;
  for (double x : div) max_div = std::max(max_div, std::abs(x));
  c.check("max |div alpha|", max_div, 0.0, 1e-12, Comparison::within, kTrivial);

  // Site moments of the reversed environment, coordinates ordered by dual out-edges.
  std::vector<std::vector<std::size_t>> site_edges(V);
  for (std::size_t v = 0; v < V; ++v) site_edges[v].assign(dt.out_edges(v).begin(), dt.out_edges(v).end());
  std::vector<std::vector<std::vector<int>>> monos(V);
  for (std::size_t v = 0; v < V; ++v) monos[v] = monomials(site_edges[v].size(), order);

  struct Acc {
    std::vector<std::vector<double>> s, s2;
    std::vector<double> lin, cross;
  };
  constexpr std::size_t kBlock = 1000;
  const std::size_t blocks = block_count(samples, kBlock);
  std::vector<Acc> acc(blocks);
  const RngHandle base = c.rng();
  parallel_for(blocks, c.threads(), [&](std::size_t b) {
    Acc& a = acc[b];
    a.s.resize(V);
    a.s2.resize(V);
    for (std::size_t v = 0; v < V; ++v) {
      a.s[v].assign(monos[v].size(), 0.0);
      a.s2[v].assign(monos[v].size(), 0.0);
    }
    a.lin.assign(E, 0.0);
    a.cross.assign(E * E, 0.0);
    for (std::size_t i = b * kBlock; i < std::min(samples, (b + 1) * kBlock); ++i) {
      RngHandle r = base.split(i);
      const Environment env = sample_environment(g, r);
      const Environment rev = reverse_environment(env, dual.topology_ptr());
      const auto w = rev.probabilities();
      for (std::size_t v = 0; v < V; ++v) {
        for (std::size_t m = 0; m < monos[v].size(); ++m) {
          double val = 1.0;
          for (std::size_t k = 0; k < site_edges[v].size(); ++k) {
            for (int t = 0; t < monos[v][m][k]; ++t) val *= w[site_edges[v][k]];
          }
          a.s[v][m] += val;
          a.s2[v][m] += val * val;
        }
      }
      for (std::size_t e = 0; e < E; ++e) {
        a.lin[e] += w[e];
        for (std::size_t f = e + 1; f < E; ++f) a.cross[e * E + f] += w[e] * w[f];
      }
    }
  });
  Acc tot = acc[0];
  for (std::size_t b = 1; b < blocks; ++b) {
    for (std::size_t v = 0; v < V; ++v) {
      for (std::size_t m = 0; m < monos[v].size(); ++m) {
        tot.s[v][m] += acc[b].s[v][m];
        tot.s2[v][m] += acc[b].s2[v][m];
      }
    }
    for (std::size_t e = 0; e < E; ++e) tot.lin[e] += acc[b].lin[e];
    for (std::size_t k = 0; k < E * E; ++k) tot.cross[k] += acc[b].cross[k];
  }
  const double N = static_cast<double>(samples);

  struct Row {
    std::size_t v;
    std::string exps;
    double emp, exact, se, z;
  };
  std::vector<Row> rows;
  double max_z = 0.0;
  for (std::size_t v = 0; v < V; ++v) {
    std::vector<double> wts;
    for (std::size_t e : site_edges[v]) wts.push_back(dual.weight(e));
    for (std::size_t m = 0; m < monos[v].size(); ++m) {
      std::vector<double> ex(monos[v][m].begin(), monos[v][m].end());
      const double exact = dirichlet_joint_moment(wts, ex).value;
      const double mean = tot.s[v][m] / N;
      const double var = std::max(0.0, (tot.s2[v][m] / N - mean * mean) * N / (N - 1.0));
      const double se = std::sqrt(var / N);
      const double z = se > 0.0 ? (mean - exact) / se : 0.0;
      max_z = std::max(max_z, std::abs(z));
      std::string tag;
      for (std::size_t k = 0; k < ex.size(); ++k) tag += (k ? "-" : "") + std::to_string(monos[v][m][k]);
      rows.push_back({v, tag, mean, exact, se, z});
    }
  }
  c.check("max |z| of site moments", max_z, 0.0, sigma, Comparison::within, kPublished);

  // Cross-site correlations (coordinates of distinct vertices of the dual graph).
  std::vector<double> sd(E);
  std::vector<double> sq(E, 0.0);
  for (std::size_t v = 0; v < V; ++v) {
    for (std::size_t k = 0; k < site_edges[v].size(); ++k) {
      // first-order monomial e_k is the k-th entry with sum 1
      for (std::size_t m = 0; m < monos[v].size(); ++m) {
        int sum = 0;
        for (int a : monos[v][m]) sum += a;
        if (sum == 1 && monos[v][m][k] == 1) sq[site_edges[v][k]] = tot.s2[v][m] / N;
      }
    }
  }
  for (std::size_t e = 0; e < E; ++e) {
    const double m = tot.lin[e] / N;
    sd[e] = std::sqrt(std::max(0.0, sq[e] - m * m));
  }
  double max_corr = 0.0;
  std::size_t pairs = 0;
  for (std::size_t e = 0; e < E; ++e) {
    for (std::size_t f = e + 1; f < E; ++f) {
      if (dt.edge(e).tail == dt.edge(f).tail) continue;
      const double cov = tot.cross[e * E + f] / N - (tot.lin[e] / N) * (tot.lin[f] / N);
      max_corr = std::max(max_corr, std::abs(cov / (sd[e] * sd[f])));
      ++pairs;
    }
  }
  c.metric("cross_site_pairs", static_cast<double>(pairs));
  c.check("max |cross-site correlation|", max_corr, 0.0, sigma / std::sqrt(N), Comparison::within, kPublished);

  c.artifact("moments", [&](std::ostream& os) {
    os << "vertex,exponents,empirical,exact,standard_error,z\n";
    for (const auto& r : rows) os << r.v << ',' << r.exps << ',' << r.emp << ',' << r.exact << ',' << r.se << ',' << r.z << '\n';
  });
}

void return_law(Context& c) {
  const auto& p = c.params;
  const std::string kind = p.text("graph");
  const std::size_t samples = p.count("samples", 2);
  std::optional<WeightedDigraph> g;
  if (kind == "triangle") {
    g.emplace(build_bidirected_cycle(3, p.positive("weight")));
  } else if (kind == "torus") {
    const std::size_t d = p.count("dim");
    const auto alpha = p.reals("weights");
    if (alpha.size() != 2 * d) throw ParameterError("weights needs 2d values");
    g.emplace(build_torus(d, p.count("torus", 2), alpha));
  } else {
    throw ParameterError("graph must be triangle or torus");
  }
  const std::size_t x = 0;
  const std::size_t entry = g->topology().in_edges(x).front();
  const double ae = g->weight(entry), ax = g->vertex_weight(x);
  const auto values = parallel_samples(c, 0, samples, [&](RngHandle& r) {
    const Environment env = sample_environment(*g, r);
    return return_via_edge_probability(env, x, entry);
  });
  const double ks = ks_beta(values, ae, ax - ae);
  c.check("KS vs Beta(alpha_e, alpha_x - alpha_e)", ks, 0.0, ks_threshold(samples), Comparison::within, kPublished);
  c.check("mean return-edge probability", mean(values), ae / ax, 4.0 * standard_error(values), Comparison::within,
          kPublished);
  c.artifact("samples", [&](std::ostream& os) {
    os << "sample,probability\n";
    for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << values[i] << '\n';
  });
}

WeightedDigraph polya_test_graph() {
  // 4 vertices, strongly connected, with a self-loop and a parallel pair.
  std::vector<Edge> edges = {{0, 1}, {0, 2}, {0, 1}, {1, 2}, {1, 0}, {2, 3}, {2, 0}, {3, 0}, {3, 3}, {3, 1}};
  std::vector<double> w = {1.0, 0.5, 0.25, 2.0, 0.7, 1.5, 0.3, 0.8, 0.4, 1.1};
  return WeightedDigraph(4, std::move(edges), std::move(w));
}

void polya_equivalence(Context& c) {
  const auto& p = c.params;
  const std::size_t max_len = p.count("max-length");
  const std::size_t samples = p.count("samples", 2);
  const WeightedDigraph g = polya_test_graph();
  double max_diff = 0.0, max_mass_err = 0.0;
  std::size_t paths = 0;
  for (std::size_t s = 0; s < g.vertex_count(); ++s) {
    for (std::size_t len = 1; len <= max_len; ++len) {
      double mass = 0.0;
      for (const auto& path : enumerate_paths(g.topology(), s, len)) {
        const double a = reinforced_path_probability(g, path);
        const double b = dirichlet_path_probability(g, path);
        max_diff = std::max(max_diff, std::abs(a - b));
        mass += a;
        ++paths;
      }
      max_mass_err = std::max(max_mass_err, std::abs(mass - 1.0));
    }
  }
  c.metric("paths_compared", static_cast<double>(paths));
  c.check("max |urn - Dirichlet| path probability", max_diff, 0.0, 1e-12, Comparison::within, kPublished);
  c.check("max |total path mass - 1|", max_mass_err, 0.0, 1e-12, Comparison::within, kTrivial);

  // Empirical law of X_2 from vertex 0 under the reinforced walk.
  std::vector<double> exact(g.vertex_count(), 0.0);
  for (const auto& path : enumerate_paths(g.topology(), 0, 2)) {
    exact[g.topology().edge(path.back()).head] += dirichlet_path_probability(g, path);
  }
  const auto ends = parallel_samples(c, 1, samples, [&](RngHandle& r) {
    return static_cast<double>(reinforced_walk(g, 0, 2, r).vertices.back());
  });
  double max_z = 0.0;
  std::vector<double> freq(g.vertex_count(), 0.0);
  for (double v : ends) freq[static_cast<std::size_t>(v)] += 1.0 / static_cast<double>(samples);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const double se = std::sqrt(std::max(exact[v] * (1.0 - exact[v]), 1e-300) / static_cast<double>(samples));
    max_z = std::max(max_z, std::abs(freq[v] - exact[v]) / se);
  }
  c.check("max |z| of X_2 law (reinforced walk vs annealed)", max_z, 0.0, 4.0, Comparison::within, kDerived);
  c.artifact("two_step", [&](std::ostream& os) {
    os << "vertex,empirical,exact\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v) os << v << ',' << freq[v] << ',' << exact[v] << '\n';
  });
}

void transience_cylinder(Context& c) {
  const auto& p = c.params;
  const std::size_t n = p.count("n");
  const std::size_t length = p.count("length");
  const auto alpha = p.reals("weights");
  if (alpha.size() != 4) throw ParameterError("weights needs 4 values");
  const std::size_t samples = p.count("samples", 2);
  const std::size_t halvings = p.count("halvings", 0);
  const double bound = 1.0 - alpha[2] / alpha[0];

  std::vector<std::size_t> lengths;
  for (std::size_t k = halvings + 1; k-- > 0;) {
    const std::size_t l = length >> k;
    if (l >= 1) lengths.push_back(l);
  }
  struct Row {
    std::size_t length;
    double mean, se;
  };
  std::vector<Row> rows;
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const CylinderGraph cyl = build_cylinder(n, lengths[li], alpha);
    const std::size_t a[] = {cyl.right};
    const std::size_t b[] = {cyl.left};
    constexpr std::size_t kBlock = 250;
    std::vector<double> values(samples);
    const RngHandle base = c.rng(li);
    parallel_for(block_count(samples, kBlock), c.threads(), [&](std::size_t blk) {
      AbsorptionSolver solver(cyl.graph.topology_ptr(), cyl.origin, a, b);
      for (std::size_t i = blk * kBlock; i < std::min(samples, (blk + 1) * kBlock); ++i) {
        RngHandle r = base.split(i);
        values[i] = solver.solve(sample_environment(cyl.graph, r));
      }
    });
    rows.push_back({lengths[li], mean(values), standard_error(values)});
  }
  const Row& last = rows.back();
  c.check("mean P(H_R < H_L) at L=" + std::to_string(last.length), last.mean, bound, 3.0 * last.se,
          Comparison::at_least, kPublished);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double tol = 3.0 * std::hypot(rows[k].se, rows[k - 1].se);
    c.check("nonincreasing from L=" + std::to_string(rows[k - 1].length) + " to " + std::to_string(rows[k].length),
            rows[k].mean, rows[k - 1].mean, tol, Comparison::at_most, kPublished);
  }
  c.artifact("means", [&](std::ostream& os) {
    os << "N,L,mean,standard_error,bound\n";
    for (const auto& r : rows) os << n << ',' << r.length << ',' << r.mean << ',' << r.se << ',' << bound << '\n';
  });
}

void kappa_table(Context& c) {
  const auto& p = c.params;
  struct Spot {
    std::size_t d;
    std::vector<double> w;
    double kappa;
  };
  const std::vector<Spot> spots = {
      {2, {1, 1, 1, 1}, 6.0},
      {3, {1, 1, 1, 1, 1, 1}, 10.0},
      {1, {3, 1}, 4.0},
      {2, {0.4, 0.1, 0.1, 0.1}, 0.9},
      {2, {0.3, 0.3, 0.3, 0.3}, 1.8},
      {2, {2, 1, 1, 1}, 7.0},
  };
  for (const auto& s : spots) {
    const LatticeWeights w(s.d, s.w);
    std::ostringstream name;
    name << "kappa d=" << s.d << " (";
    for (std::size_t i = 0; i < s.w.size(); ++i) name << (i ? "," : "") << s.w[i];
    name << ")";
    c.check(name.str(), kappa(w), s.kappa, 1e-12, Comparison::within, kTrivial);
  }
  struct BoxSpot {
    std::size_t d;
    std::vector<double> w;
    std::size_t r;
    double value;
  };
  const std::vector<BoxSpot> boxes = {
      {2, {1, 1, 1, 1}, 0, 4.0}, {2, {1, 1, 1, 1}, 1, 6.0}, {2, {1, 1, 1, 1}, 2, 8.0},
      {3, {1, 1, 1, 1, 1, 1}, 1, 10.0}, {2, {2, 1, 1, 1}, 2, 9.0}, {1, {3, 1}, 5, 4.0},
  };
  for (const auto& s : boxes) {
    const LatticeWeights w(s.d, s.w);
    std::ostringstream name;
    name << "kappa_box d=" << s.d << " (";
    for (std::size_t i = 0; i < s.w.size(); ++i) name << (i ? "," : "") << s.w[i];
    name << ") r=" << s.r;
    c.check(name.str(), kappa_lambda_box(w, s.r), s.value, 1e-12, Comparison::within, kTrivial);
  }
  const auto da = d_alpha(LatticeWeights(2, {2, 1, 1, 1}));
  c.check("|d_alpha(2,1,1,1) - (1,0)|", std::hypot(da[0] - 1.0, da[1]), 0.0, 1e-12, Comparison::within, kTrivial);

  const LatticeWeights user = lattice_weights(p, "dim", "weights");
  const std::size_t rmax = p.count("max-radius", 0);
  c.metric("kappa", kappa(user));
  c.artifact("table", [&](std::ostream& os) {
    os << "dim,weights,kappa,d_alpha";
    for (std::size_t r = 0; r <= rmax; ++r) os << ",kappa_box_r" << r;
    os << '\n';
    auto row = [&](const LatticeWeights& w) {
      os << w.dim() << ",\"";
      for (std::size_t i = 0; i < w.directions(); ++i) os << (i ? "," : "") << w[i];
      os << "\"," << kappa(w) << ",\"";
      const auto v = d_alpha(w);
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << '"';
      for (std::size_t r = 0; r <= rmax; ++r) os << ',' << kappa_lambda_box(w, r);
      os << '\n';
    };
    for (const auto& s : spots) row(LatticeWeights(s.d, s.w));
    row(user);
  });
}

void trap_tails(Context& c) {
  const auto& p = c.params;
  const LatticeWeights w = lattice_weights(p, "dim", "weights");
  const std::size_t samples = p.count("samples", 10);
  const double rel = p.positive("tolerance");
  const std::size_t oracle = p.count("oracle-checks", 0);
  const std::size_t d = w.dim(), nd = 2 * d;
  std::size_t axis = 0;
  for (std::size_t i = 1; i < d; ++i) {
    if (w[i] + w[i + d] > w[axis] + w[axis + d]) axis = i;
  }
  const double exponent = 2.0 * w.total() - (w[axis] + w[axis + d]);
  // One sample: G = 1 / (1 - omega(0, e) omega(e, 0)) with exact complements.
  auto draw = [&](RngHandle& r, double* o1, double* o2) {
    double g0[2 * kMaxDim], g1[2 * kMaxDim];
    double s0 = 0.0, s1 = 0.0, r0 = 0.0, r1 = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      g0[i] = sample_gamma(w[i], r);
      s0 += g0[i];
      if (i != axis) r0 += g0[i];
    }
    for (std::size_t i = 0; i < nd; ++i) {
      g1[i] = sample_gamma(w[i], r);
      s1 += g1[i];
      if (i != axis + d) r1 += g1[i];
    }
    const double w1 = g0[axis] / s0, c1 = r0 / s0;
    const double w2 = g1[axis + d] / s1, c2 = r1 / s1;
    if (o1) *o1 = w1;
    if (o2) *o2 = w2;
    return 1.0 / (c1 + w1 * c2);
  };
  const auto g = parallel_samples(c, 0, samples, [&](RngHandle& r) { return draw(r, nullptr, nullptr); });

  if (oracle > 0) {
    // Same samples through the fundamental-matrix solve on {0, e} plus an exit vertex.
    const auto topo = Digraph::make(3, {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 2}});
    const RngHandle base = c.rng(0);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < std::min(oracle, samples); ++i) {
      RngHandle r = base.split(i);
      double w1 = 0.0, w2 = 0.0;
      draw(r, &w1, &w2);
      const Environment env(topo, {w1, 1.0 - w1, w2, 1.0 - w2, 1.0});
      const std::size_t a[] = {0, 1};
      const double solved = green_function_finite(env, a, 0);
      const double closed = 1.0 / (1.0 - w1 * w2);
      max_rel = std::max(max_rel, std::abs(solved - closed) / closed);
      max_rel = std::max(max_rel, std::abs(g[i] - closed) / closed);
    }
    c.check("max rel |linear solve - closed form| pair Green function", max_rel, 0.0, 1e-9, Comparison::within,
            kPublished);
  }
  const std::size_t k = p.count("hill-k", 0) ? p.count("hill-k") : default_hill_k(samples);
  const double hill = hill_tail_exponent(g, k);
  c.metric("hill_k", static_cast<double>(k));
  c.check("kappa of the weights", kappa(w), exponent, 1e-12, Comparison::within, kTrivial);
  c.check("Hill tail exponent of pair-trap Green function", hill, exponent, rel * exponent, Comparison::within,
          kPublished);
  c.artifact("hill", [&](std::ostream& os) {
    os << "k,hill\n";
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto kk = static_cast<std::size_t>(std::max(10.0, std::round(f * static_cast<double>(k))));
      if (kk < samples) os << kk << ',' << hill_tail_exponent(g, kk) << '\n';
    }
  });
}

double final_x(const WalkRecord& r) { return static_cast<double>(r.positions.back()[0]); }

void speed(Context& c) {
  const auto& p = c.params;
  const BetaEnvParams bp(p.positive("alpha"), p.positive("beta"));
  const auto steps = static_cast<double>(p.count("steps"));
  const std::size_t replicas = p.count("replicas", 2);
  const double tol = p.positive("tolerance");
  const double v = (bp.alpha - bp.beta - 1.0) / (bp.alpha + bp.beta - 1.0);
  const LatticeWeights w(1, {bp.alpha, bp.beta});
  const RngHandle envs = c.rng(1);
  const auto ratios = parallel_samples(c, 0, replicas, [&](RngHandle& r) {
    LatticeEnvironment env(w, envs.split(r.stream())());
    return final_x(quenched_walk(env, Site{}, StopRule::at_horizon(steps), r)) / steps;
  });
  c.check("solomon_speed formula", solomon_speed(bp), std::max(0.0, v), 1e-12, Comparison::within, kTrivial);
  c.check("mean X_n / n", mean(ratios), std::max(0.0, v), tol, Comparison::within, kPublished);
  c.metric("standard_error", standard_error(ratios));

  // Regeneration structure along one long path.
  const std::size_t regen_steps = p.count("regen-steps", 0);
  if (regen_steps > 0 && bp.alpha > bp.beta) {
    LatticeEnvironment env(w, c.rng(2)());
    RngHandle r = c.rng(3);
    WalkOptions opt;
    opt.keep_path = true;
    const WalkRecord rec = quenched_walk(env, Site{}, StopRule::at_horizon(static_cast<double>(regen_steps)), r, opt);
    const double l[] = {1.0};
    const Regeneration reg = regeneration_times(rec, l);
    c.metric("regenerations", static_cast<double>(reg.taus.size()));
    if (reg.displacements.size() >= 20) {
      std::vector<double> disp(reg.displacements.begin() + 1, reg.displacements.end());
      const std::size_t half = disp.size() / 2;
      std::span<const double> a(disp.data(), half), b(disp.data() + half, disp.size() - half);
      c.check("KS first vs second half of regeneration displacements", ks_two_sample(a, b), 0.0,
              ks_two_sample_threshold(a.size(), b.size()), Comparison::within, kDerived);
      std::vector<double> gaps;
      for (std::size_t k = 1; k < reg.taus.size(); ++k) gaps.push_back(static_cast<double>(reg.taus[k] - reg.taus[k - 1]));
      c.metric("hill_regeneration_gaps", hill_tail_exponent(gaps));
    }
    c.artifact("regeneration", [&](std::ostream& os) { write_regeneration_csv(os, std::span<const Regeneration>(&reg, 1)); });
  }
  c.artifact("replicas", [&](std::ostream& os) {
    os << "replica,X_n_over_n\n";
    for (std::size_t i = 0; i < ratios.size(); ++i) os << i << ',' << ratios[i] << '\n';
  });
}

void direction(Context& c) {
  const auto& p = c.params;
  const LatticeWeights w = lattice_weights(p, "dim", "weights");
  const auto steps = static_cast<double>(p.count("steps"));
  const std::size_t replicas = p.count("replicas");
  const double angle = p.positive("angle");
  const std::size_t d = w.dim();
  const auto da = d_alpha(w);
  double norm = 0.0;
  for (double x : da) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw ParameterError("direction: d_alpha is zero");
  const RngHandle envs = c.rng(1);
  const auto angles = parallel_samples(c, 0, replicas, [&](RngHandle& r) {
    LatticeEnvironment env(w, envs.split(r.stream())());
    const WalkRecord rec = quenched_walk(env, Site{}, StopRule::at_horizon(steps), r);
    double dot = 0.0, len = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot += rec.positions.back()[k] * da[k];
      len += static_cast<double>(rec.positions.back()[k]) * rec.positions.back()[k];
    }
    if (len == 0.0) return std::numbers::pi;
    return std::acos(std::clamp(dot / (std::sqrt(len) * norm), -1.0, 1.0));
  });
  double frac = 0.0;
  for (double a : angles) frac += a < angle ? 1.0 : 0.0;
  frac /= static_cast<double>(replicas);
  c.check("fraction of replicas within the angle of d_alpha", frac, p.real("fraction"), 0.0, Comparison::at_least,
          kPublished);
  c.metric("median_angle", median(angles));

  const LatticeWeights trap = lattice_weights(p, "dim", "trap-weights");
  const std::size_t trap_replicas = p.count("trap-replicas", 0);
  std::vector<double> trap_speed;
  if (trap_replicas > 0) {
    c.metric("trap_kappa", kappa(trap));
    const RngHandle tenv = c.rng(3);
    trap_speed = parallel_samples(c, 2, trap_replicas, [&](RngHandle& r) {
      LatticeEnvironment env(trap, tenv.split(r.stream())());
      return final_x(quenched_walk(env, Site{}, StopRule::at_horizon(steps), r)) / steps;
    });
    c.check("mean X_n.e_1 / n with kappa <= 1", mean(trap_speed), p.real("trap-bound"), 0.0, Comparison::at_most,
            kDerived);
  }
  c.artifact("angles", [&](std::ostream& os) {
    os << "replica,angle\n";
    for (std::size_t i = 0; i < angles.size(); ++i) os << i << ',' << angles[i] << '\n';
  });
  if (!trap_speed.empty()) {
    c.artifact("trap_speed", [&](std::ostream& os) {
      os << "replica,X_n_over_n\n";
      for (std::size_t i = 0; i < trap_speed.size(); ++i) os << i << ',' << trap_speed[i] << '\n';
    });
  }
}

void write_regimes(Context& c, std::span<const BetaEnvParams> list) {
  c.artifact("regimes", [&](std::ostream& os) { write_regime_csv(os, list); });
}

void clt(Context& c) {
  const auto& p = c.params;
  const BetaEnvParams bp(p.positive("alpha"), p.positive("beta"));
  const std::size_t n = p.count("steps");
  const std::size_t replicas = p.count("replicas", 2);
  const double rel = p.positive("tolerance");
  const RegimeConstants rc = regime_constants(bp);
  if (rc.regime != Regime::gaussian) throw ParameterError("clt: needs alpha - beta > 2");
  const LatticeWeights w(1, {bp.alpha, bp.beta});
  const double nn = static_cast<double>(n);
  const RngHandle envs = c.rng(1);
  const auto z = parallel_samples(c, 0, replicas, [&](RngHandle& r) {
    LatticeEnvironment env(w, envs.split(r.stream())());
    return (final_x(quenched_walk(env, Site{}, StopRule::at_horizon(nn), r)) - rc.speed * nn) / std::sqrt(nn);
  });
  const double sd = std::sqrt(variance(z));
  c.check("sd of (X_n - v n)/sqrt(n)", sd, *rc.scale, rel * *rc.scale, Comparison::within, kPublished);
  c.metric("mean", mean(z));
  c.artifact("replicas", [&](std::ostream& os) {
    os << "replica,scaled_fluctuation\n";
    for (std::size_t i = 0; i < z.size(); ++i) os << i << ',' << z[i] << '\n';
  });
  const BetaEnvParams table[] = {{1.5, 1.0}, {3.0, 2.0}, {2.5, 1.0}, {3.0, 1.0}, {4.0, 1.0}, bp};
  write_regimes(c, table);
}

void exponent(Context& c) {
  const auto& p = c.params;
  const BetaEnvParams bp(p.positive("alpha"), p.positive("beta"));
  const double lo = p.positive("min-steps"), hi = p.positive("steps");
  const std::size_t points = p.count("points", 2);
  const std::size_t replicas = p.count("replicas", 3);
  const double tol = p.positive("tolerance");
  if (!(hi > lo)) throw ParameterError("exponent: steps must exceed min-steps");
  WalkOptions opt;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = std::round(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(points - 1)));
    opt.checkpoints.push_back(t);
  }
  const LatticeWeights w(1, {bp.alpha, bp.beta});
  std::vector<WalkRecord> records(replicas);
  const RngHandle base = c.rng(0), envs = c.rng(1);
  parallel_for(replicas, c.threads(), [&](std::size_t i) {
    RngHandle r = base.split(i);
    LatticeEnvironment env(w, envs.split(i)());
    records[i] = quenched_walk(env, Site{}, StopRule::at_horizon(opt.checkpoints.back()), r, opt);
    records[i].times.resize(points);
    records[i].positions.resize(points);
  });
  const double l[] = {1.0};
  const ExponentFit fit = displacement_exponent(records, l);
  const double expected = std::min(1.0, bp.kappa1());
  c.check("slope of median log X_n vs log n", fit.slope, expected, tol, Comparison::within, kPublished);
  c.metric("excluded", static_cast<double>(fit.excluded));
  c.metric("r_squared", fit.r_squared);
  c.artifact("fit", [&](std::ostream& os) {
    os << "log_n,median_log_X_n\n";
    for (std::size_t k = 0; k < fit.log_times.size(); ++k) os << fit.log_times[k] << ',' << fit.median_log_displacement[k] << '\n';
  });
}

void accelerated(Context& c) {
  const auto& p = c.params;
  const LatticeWeights w = lattice_weights(p, "dim", "weights");
  const std::size_t r = p.count("radius", 0);
  const std::size_t sites = p.count("sites");
  const std::size_t replicas = p.count("replicas", 2);
  const double horizon = p.positive("horizon");
  const std::uint64_t env_seed = c.rng(7)();

  LatticeEnvironment env(w, env_seed);
  double max_dev = 0.0, min_gamma = std::numeric_limits<double>::infinity();
  RngHandle pick = c.rng(8);
  for (std::size_t i = 0; i < sites; ++i) {
    Site x{};
    for (std::size_t k = 0; k < w.dim(); ++k) x[k] = static_cast<std::int32_t>(pick.below(41)) - 20;
    max_dev = std::max(max_dev, std::abs(gamma_factor(env, x, 0) - 1.0));
    min_gamma = std::min(min_gamma, gamma_factor(env, x, r));
  }
  c.check("max |gamma - 1| at r=0", max_dev, 0.0, 0.0, Comparison::within, kTrivial);
  c.check("min gamma at r=" + std::to_string(r), min_gamma, 1.0, 0.0, Comparison::at_least, kTrivial);

  const double gamma0 = gamma_factor(env, Site{}, r);
  const auto holds = parallel_samples(c, 0, replicas, [&](RngHandle& rng) {
    LatticeEnvironment local(w, env_seed);
    const WalkRecord rec = accelerated_walk(local, r, Site{}, horizon, rng);
    return rec.start_holding_times.empty() ? std::numeric_limits<double>::quiet_NaN() : rec.start_holding_times.front();
  });
  std::vector<double> first;
  for (double h : holds) {
    if (!std::isnan(h)) first.push_back(h);
  }
  c.metric("gamma_origin", gamma0);
  c.metric("censored_holds", static_cast<double>(holds.size() - first.size()));
  c.check("mean holding time at the origin", mean(first), 1.0 / gamma0, 3.0 * standard_error(first),
          Comparison::within, kTrivial);
  c.check("kappa_box d=2 ones r=0", kappa_lambda_box(LatticeWeights(2, {1, 1, 1, 1}), 0), 4.0, 0.0,
          Comparison::within, kTrivial);
  c.check("kappa_box d=2 ones r=1", kappa_lambda_box(LatticeWeights(2, {1, 1, 1, 1}), 1), 6.0, 0.0,
          Comparison::within, kTrivial);
  c.check("kappa_box d=3 (1,2,1,1,1,1) r=2", kappa_lambda_box(LatticeWeights(3, {1, 2, 1, 1, 1, 1}), 2), 15.0, 0.0,
          Comparison::within, kTrivial);
  c.metric("kappa_box", kappa_lambda_box(w, r));
  c.artifact("holding", [&](std::ostream& os) {
    os << "replica,first_holding_time\n";
    for (std::size_t i = 0; i < holds.size(); ++i) os << i << ',' << holds[i] << '\n';
  });
}

void flows_resistance(Context& c) {
  const auto& p = c.params;
  const auto sizes2 = p.counts("d2-sizes");
  const auto sizes3 = p.counts("d3-sizes");
  const auto tsizes = p.counts("torus-sizes");
  const double growth = p.positive("max-growth");
  double max_gap = 0.0;
  auto resistance_and_gap = [&](const Network& net, std::size_t x, std::span<const std::size_t> sinks) {
    const double r = effective_resistance(net, x, sinks);
    const FlowAssignment f = thomson_unit_flow(net, x, sinks);
    max_gap = std::max(max_gap, std::abs(f.l2_norm_squared() - r));
    return r;
  };
  {
    const Network edge{2, {{0, 1}}};
    const std::size_t s[] = {1};
    c.check("single edge resistance", resistance_and_gap(edge, 0, s), 1.0, 1e-12, Comparison::within, kTrivial);
    const Network square{4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}}};
    const std::size_t t[] = {3};
    c.check("two parallel 2-edge paths", resistance_and_gap(square, 0, t), 1.0, 1e-12, Comparison::within, kTrivial);
  }
  std::vector<std::pair<std::size_t, double>> r2, r3;
  for (std::size_t n : sizes2) {
    const Network net = lattice_ball_network(2, n);
    const std::size_t s[] = {net.vertices - 1};
    r2.emplace_back(n, resistance_and_gap(net, 0, s));
  }
  for (std::size_t n : sizes3) {
    const Network net = lattice_ball_network(3, n);
    const std::size_t s[] = {net.vertices - 1};
    r3.emplace_back(n, resistance_and_gap(net, 0, s));
  }
  if (r2.size() >= 3) {
    std::vector<double> x, y;
    for (const auto& [n, r] : r2) {
      x.push_back(std::log(static_cast<double>(n)));
      y.push_back(r);
    }
    const LinearFit fit = least_squares(x, y);
    c.metric("d2_log_slope", fit.slope);
    c.check("R^2 of R_N = a ln N + b in d=2", fit.r_squared, 0.99, 0.0, Comparison::at_least, kPublished);
  }
  if (r3.size() >= 2) {
    const double inc = r3.back().second / r3[r3.size() - 2].second - 1.0;
    c.check("relative increase of R_N in d=3 over the last step", inc, growth, 0.0, Comparison::at_most, kPublished);
    bool monotone = true;
    for (std::size_t k = 1; k < r3.size(); ++k) monotone = monotone && r3[k].second >= r3[k - 1].second - 1e-12;
    c.check("R_N nondecreasing in d=3", monotone ? 1.0 : 0.0, 1.0, 0.0, Comparison::within, kTrivial);
  }
  std::vector<std::pair<std::size_t, double>> tnorm;
  double max_div_err = 0.0, min_theta = 0.0, max_theta = 0.0;
  std::optional<FlowAssignment> shown;
  for (std::size_t n : tsizes) {
    const FlowAssignment f = averaged_flow(3, n);
    const auto div = divergence(*f.topology, f.theta);
    const double vol = std::pow(static_cast<double>(n), 3.0);
    for (std::size_t v = 0; v < div.size(); ++v) {
      const double expect = v == 0 ? (vol - 1.0) / vol : -1.0 / vol;
      max_div_err = std::max(max_div_err, std::abs(div[v] - expect));
    }
    for (double t : f.theta) {
      min_theta = std::min(min_theta, t);
      max_theta = std::max(max_theta, t);
    }
    tnorm.emplace_back(n, f.l2_norm_squared());
    if (!shown) shown = f;
  }
  c.check("max |Thomson norm - effective resistance|", max_gap, 0.0, 1e-8, Comparison::within, kPublished);
  if (!tnorm.empty()) {
    c.check("averaged flow divergence error", max_div_err, 0.0, 1e-9, Comparison::within, kTrivial);
    c.check("averaged flow min theta", min_theta, 0.0, 0.0, Comparison::at_least, kTrivial);
    c.check("averaged flow max theta", max_theta, 1.0, 0.0, Comparison::at_most, kPublished);
    for (const auto& [n, v] : tnorm) c.metric("torus_norm_N" + std::to_string(n), v);
  }
  c.artifact("d2", [&](std::ostream& os) { write_resistance_csv(os, r2); });
  c.artifact("d3", [&](std::ostream& os) { write_resistance_csv(os, r3); });
  c.artifact("torus_norm", [&](std::ostream& os) {
    os << "N,norm_squared\n";
    for (const auto& [n, v] : tnorm) os << n << ',' << v << '\n';
  });
  if (shown) c.artifact("torus_flow", [&](std::ostream& os) { write_flow_csv(os, *shown); });
}

void min_cut(Context& c) {
  const auto& p = c.params;
  const std::size_t radius = p.count("radius");
  const std::size_t trials = p.count("trials", 0);
  for (std::size_t d : {2u, 3u}) {
    const Network net = lattice_ball_network(d, radius);
    const DigraphPtr g = oriented(net);
    const std::vector<double> cap(g->edge_count(), 1.0);
    const MaxFlowResult res = max_flow_min_cut(*g, cap, 0, net.vertices - 1);
    c.check("lattice min-cut d=" + std::to_string(d), res.strength, 2.0 * static_cast<double>(d), 1e-9,
            Comparison::within, kPublished);
    bool at_origin = res.cut.edges.size() == 2 * d;
    for (std::size_t e : res.cut.edges) at_origin = at_origin && g->edge(e).tail == 0;
    c.check("cut = edges leaving the origin d=" + std::to_string(d), at_origin ? 1.0 : 0.0, 1.0, 0.0,
            Comparison::within, kPublished);
  }
  RngHandle r = c.rng();
  double max_diff = 0.0, max_excess = 0.0;
  std::vector<std::pair<double, double>> rows;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 6;
    std::vector<Edge> pairs;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) pairs.push_back({a, b});
    }
    for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[r.below(i)]);
    pairs.resize(10);
    // Self-loops keep every vertex with an outgoing edge; they never carry flow.
    for (std::size_t v = 0; v < n; ++v) pairs.push_back({v, v});
    std::vector<double> cap(pairs.size());
    for (auto& x : cap) x = 0.1 + 1.9 * r.uniform01();
    const Digraph g(n, pairs);
    const MaxFlowResult res = max_flow_min_cut(g, cap, 0, n - 1);
    const double brute = min_cut_bruteforce(g, cap, 0, n - 1);
    max_diff = std::max({max_diff, std::abs(res.strength - brute), std::abs(res.cut.capacity - res.strength)});
    for (std::size_t e = 0; e < cap.size(); ++e) max_excess = std::max(max_excess, res.flow[e] - cap[e]);
    rows.emplace_back(res.strength, brute);
  }
  if (trials > 0) {
    c.check("max |max-flow - brute-force min-cut|", max_diff, 0.0, 1e-9, Comparison::within, kDerived);
    c.check("max flow excess over capacity", max_excess, 0.0, 1e-12, Comparison::at_most, kTrivial);
  }
  c.artifact("random", [&](std::ostream& os) {
    os << "trial,max_flow,brute_force\n";
    for (std::size_t i = 0; i < rows.size(); ++i) os << i << ',' << rows[i].first << ',' << rows[i].second << '\n';
  });
}

void onedim_laws(Context& c) {
  const auto& p = c.params;
  const BetaEnvParams bp(p.positive("alpha"), p.positive("beta"));
  const std::size_t samples = p.count("samples", 10);
  const double tol = p.positive("tol");
  const auto inv = parallel_samples(c, 0, samples, [&](RngHandle& r) { return 1.0 / sample_R(bp, r, tol); });
  c.check("KS 1/R vs Beta(alpha-beta, beta)", ks_beta(inv, bp.alpha - bp.beta, bp.beta), 0.0, ks_threshold(samples),
          Comparison::within, kPublished);
  const auto coarse = parallel_samples(c, 0, samples, [&](RngHandle& r) { return 1.0 / sample_R(bp, r, 10.0 * tol); });
  const double shift = std::abs(ks_beta(coarse, bp.alpha - bp.beta, bp.beta) - ks_beta(inv, bp.alpha - bp.beta, bp.beta));
  c.check("KS change when tol grows tenfold", shift, 0.0, 2.0 / std::sqrt(static_cast<double>(samples)),
          Comparison::within, kDerived);

  const BetaEnvParams tp(p.positive("tail-alpha"), p.positive("tail-beta"));
  const std::size_t tail_samples = p.count("tail-samples", 0);
  if (tail_samples > 0) {
    const double t = p.positive("tail-t");
    const double rel = p.positive("tail-tolerance");
    const double k1 = tp.kappa1();
    const auto exceed = parallel_samples(c, 1, tail_samples, [&](RngHandle& r) { return sample_R(tp, r, tol) > t ? 1.0 : 0.0; });
    const double frac = mean(exceed);
    const double ck = 1.0 / (k1 * beta_fn(k1, tp.beta));
    c.check("Kesten constant formula", kesten_constant(tp), ck, 1e-12 * ck, Comparison::within, kPublished);
    c.check("P(R > t) t^kappa1", frac * std::pow(t, k1), ck, rel * ck, Comparison::within, kPublished);
    c.metric("tail_standard_error", standard_error(exceed) * std::pow(t, k1));
  }
  c.artifact("inverse_R", [&](std::ostream& os) {
    os << "sample,inverse_R\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(inv.size(), 10000); ++i) os << i << ',' << inv[i] << '\n';
  });
  const BetaEnvParams table[] = {{1.5, 1.0}, {2.0, 1.0}, {2.5, 1.0}, {3.0, 1.0}, {4.0, 1.0}, bp, tp};
  write_regimes(c, table);
}

void ldp_rate(Context& c) {
  const auto& p = c.params;
  const BetaEnvParams bp(p.positive("alpha"), p.positive("beta"));
  const double lambda = p.positive("lambda");
  if (!(lambda < 1.0)) throw ParameterError("lambda must be in (0, 1)");
  const std::size_t samples = p.count("samples", 10);
  const std::size_t iters = p.count("fixed-point-iterations");
  const auto grid = p.grid("t-grid");
  const auto mgf_lambdas = p.reals("mgf-lambdas");
  const std::size_t mgf_samples = p.count("mgf-samples", 10);
  const double z = lambda * lambda;
  auto cdf = [&](double u) { return h1_cdf(bp, z, std::clamp(u, 0.0, 1.0)); };

  const auto phi = parallel_samples(c, 0, samples, [&](RngHandle& r) { return sample_phi(bp, lambda, r).value / lambda; });
  c.check("KS phi/lambda vs h1 CDF", ks_statistic(phi, cdf), 0.0, ks_threshold(samples), Comparison::within,
          kPublished);
  const auto fixed = parallel_samples(c, 1, samples, [&](RngHandle& r) { return sample_Z_fixed_point(bp, lambda, iters, r); });
  c.check("KS fixed-point iterate vs h1 CDF", ks_statistic(fixed, cdf), 0.0, ks_threshold(samples), Comparison::within,
          kDerived);

  for (std::size_t k = 0; k < mgf_lambdas.size(); ++k) {
    const double lam = mgf_lambdas[k];
    const auto logs = parallel_samples(c, 10 + k, mgf_samples, [&](RngHandle& r) { return std::log(sample_phi(bp, lam, r).value); });
    c.check("E log phi at lambda=" + std::to_string(lam).substr(0, 4), mean(logs), log_mgf(bp, lam),
            3.0 * standard_error(logs), Comparison::within, kDerived);
  }

  const auto table = rate_function_table(bp, grid);
  const double v = solomon_speed(bp);
  if (v > 0.0) {
    c.check("I(1/v)", rate_function(bp, 1.0 / v).rate, 0.0, 1e-3, Comparison::at_most, kDerived);
  }
  c.check("I(1) = psi(alpha+beta) - psi(alpha)", rate_function(bp, 1.0).rate, digamma(bp.alpha + bp.beta) - digamma(bp.alpha),
          1e-8, Comparison::within, kDerived);
  double min_rate = 0.0, min_second = 0.0, monotone = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    min_rate = std::min(min_rate, table[i].rate);
    if (i > 0 && i + 1 < table.size()) {
      min_second = std::min(min_second, table[i - 1].rate - 2.0 * table[i].rate + table[i + 1].rate);
    }
    if (i > 0) {
      const bool before = v > 0.0 && table[i - 1].t < 1.0 / v;
      const double step = table[i].rate - table[i - 1].rate;
      monotone = std::max(monotone, before ? step : -step);
    }
  }
  c.check("min I on grid", min_rate, 0.0, 0.0, Comparison::at_least, kTrivial);
  c.check("min second difference of I", min_second, 0.0, 1e-8, Comparison::at_least, kDerived);
  c.check("monotonicity violation of I around 1/v", monotone, 0.0, 1e-9, Comparison::at_most, kDerived);
  c.artifact("rate", [&](std::ostream& os) { write_rate_csv(os, table); });
}

// ---------------------------------------------------------------------------

using Runner = void (*)(Context&);

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"reversal-check", "per-site moments and cross-site correlations of the time-reversed environment on a torus",
        "time-reversal lemma; cycle-weight identity", {kTrivial, kPublished},
        {{"dim", "2"}, {"torus", "4"}, {"weights", "1,2,1,1"}, {"samples", "1e5"}, {"max-order", "3"}, {"sigma", "4"}}},
       reversal_check},
      {{"return-law", "law of the probability of returning through a given entry edge",
        "return-edge Beta law for zero-divergence weights", {kPublished},
        {{"graph", "triangle"}, {"weight", "1"}, {"dim", "2"}, {"torus", "4"}, {"weights", "1,1,1,1"}, {"samples", "1e4"}}},
       return_law},
      {{"polya-equivalence", "reinforced walk vs annealed Dirichlet path probabilities",
        "equivalence of the directed-edge reinforced walk and the annealed walk", {kPublished, kTrivial, kDerived},
        {{"max-length", "6"}, {"samples", "1e5"}}},
       polya_equivalence},
      {{"transience-cylinder", "exact P(H_R < H_L) on the cylinder graph averaged over environments",
        "directional transience inequality on the cylinder", {kPublished},
        {{"n", "16"}, {"length", "64"}, {"weights", "2,1,1,1"}, {"samples", "1e4"}, {"halvings", "2"}}},
       transience_cylinder},
      {{"kappa-table", "kappa, box kappa and d_alpha for reference weights", "definition of kappa; box formula for kappa",
        {kTrivial}, {{"dim", "2"}, {"weights", "1,1,1,1"}, {"max-radius", "3"}}},
       kappa_table},
      {{"trap-tails", "tail exponent of the Green function of the strongest pair trap",
        "finite traps and integrability of the Green function", {kTrivial, kPublished},
        {{"dim", "2"}, {"weights", "0.3,0.3,0.3,0.3"}, {"samples", "1e6"}, {"hill-k", "0"}, {"tolerance", "0.15"},
         {"oracle-checks", "100"}}},
       trap_tails},
      {{"speed", "asymptotic speed of the one-dimensional walk, regeneration structure",
        "ballisticity in dimension one; renewal structure", {kTrivial, kPublished, kDerived},
        {{"alpha", "3"}, {"beta", "1"}, {"steps", "1e6"}, {"replicas", "100"}, {"tolerance", "0.02"}, {"regen-steps", "1e6"}}},
       speed},
      {{"direction", "asymptotic direction and non-ballisticity with strong traps", "asymptotic direction d_alpha; kappa <= 1",
        {kPublished, kDerived},
        {{"dim", "2"}, {"weights", "2,1,1,1"}, {"steps", "1e6"}, {"replicas", "20"}, {"angle", "0.1"}, {"fraction", "0.9"},
         {"trap-weights", "0.4,0.1,0.1,0.1"}, {"trap-replicas", "10"}, {"trap-bound", "0.05"}}},
       direction},
      {{"clt", "Gaussian fluctuations of the one-dimensional walk", "scaling limits in dimension one, kappa1 > 2",
        {kPublished}, {{"alpha", "4"}, {"beta", "1"}, {"steps", "1e5"}, {"replicas", "1e4"}, {"tolerance", "0.1"}}},
       clt},
      {{"exponent", "displacement exponent in the sub-ballistic regime", "scaling limits in dimension one, kappa1 < 1",
        {kPublished},
        {{"alpha", "1.5"}, {"beta", "1"}, {"min-steps", "1e4"}, {"steps", "1e6"}, {"points", "5"}, {"replicas", "200"},
         {"tolerance", "0.15"}}},
       exponent},
      {{"accelerated", "accelerating factor and holding times of the continuous-time chain",
        "accelerated process; box formula for kappa", {kTrivial},
        {{"dim", "2"}, {"weights", "1,1,1,1"}, {"radius", "1"}, {"sites", "200"}, {"replicas", "1e4"}, {"horizon", "50"}}},
       accelerated},
      {{"flows-resistance", "effective resistances, Thomson flows and averaged torus flows",
        "transience through flows; Thomson principle", {kTrivial, kPublished},
        {{"d2-sizes", "8,16,32,64,128"}, {"d3-sizes", "4,8,12"}, {"torus-sizes", "2,4,6"}, {"max-growth", "0.05"}}},
       flows_resistance},
      {{"min-cut", "max-flow / min-cut on lattice balls and random graphs", "max-flow min-cut with real capacities",
        {kPublished, kDerived, kTrivial}, {{"radius", "6"}, {"trials", "50"}}},
       min_cut},
      {{"onedim-laws", "law of 1/R and the Kesten tail constant", "renewal series law and Kesten constant",
        {kPublished, kDerived},
        {{"alpha", "3"}, {"beta", "1"}, {"samples", "1e5"}, {"tol", "1e-12"}, {"tail-alpha", "1.5"}, {"tail-beta", "1"},
         {"tail-samples", "1e7"}, {"tail-t", "1e3"}, {"tail-tolerance", "0.25"}}},
       onedim_laws},
      {{"ldp-rate", "hitting-time generating function and rate function", "large deviations of hitting times",
        {kPublished, kDerived, kTrivial},
        {{"alpha", "3"}, {"beta", "1"}, {"lambda", "0.5"}, {"samples", "1e5"}, {"fixed-point-iterations", "60"},
         {"t-grid", "1:20:100"}, {"mgf-lambdas", "0.3,0.6,0.9"}, {"mgf-samples", "2e4"}}},
       ldp_rate},
  };
  return list;
}

}  // namespace

std::string provenance_tag(Provenance p) {
  switch (p) {
    case Provenance::trivial: return "TRIVIAL";
    case Provenance::published: return "PUBLISHED";
    case Provenance::derived: return "DERIVED";
  }
  return "?";
}

Check make_check(std::string name, double measured, double expected, double tolerance, Comparison cmp,
                 Provenance provenance) {
  Check c{std::move(name), measured, expected, tolerance, cmp, provenance, false};
  switch (cmp) {
    case Comparison::within: c.pass = std::abs(measured - expected) <= tolerance; break;
    case Comparison::at_most: c.pass = measured <= expected + tolerance; break;
    case Comparison::at_least: c.pass = measured >= expected - tolerance; break;
  }
  if (std::isnan(measured)) c.pass = false;
  return c;
}

bool Verdict::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.info.name == name) return e.info;
  }
  throw UsageError("unknown experiment '" + name + "'");
}

Verdict run_experiment(const ExperimentConfig& config) {
  const Entry* entry = nullptr;
  for (const auto& e : entries()) {
    if (e.info.name == config.experiment) entry = &e;
  }
  if (!entry) throw UsageError("unknown experiment '" + config.experiment + "'");
  if (config.format != "csv" && config.format != "json") throw UsageError("format must be csv or json");
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  v.experiment = config.experiment;
  v.seed = config.seed;
  Context ctx{config, Params(entry->info, config.parameters), v};
  v.parameters = ctx.params.values();
  entry->run(ctx);
  v.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    const std::string file = config.experiment + ".verdict.json";
    std::ofstream os(std::filesystem::path(config.out_dir) / file);
    v.artifacts.push_back(file);
    write_verdict_json(os, v);
  }
  return v;
}

namespace {

std::string comparison_name(Comparison c) {
  switch (c) {
    case Comparison::within: return "within";
    case Comparison::at_most: return "at_most";
    case Comparison::at_least: return "at_least";
  }
  return "?";
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

void write_verdict_json(std::ostream& os, const Verdict& v) {
  Json j;
  j["experiment"] = v.experiment;
  j["seed"] = v.seed;
  j["parameters"] = v.parameters;
  j["checks"] = Json::array();
  for (const auto& c : v.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"measured", number(c.measured)},
                           {"expected", number(c.expected)},
                           {"provenance", provenance_tag(c.provenance)},
                           {"comparison", comparison_name(c.comparison)},
                           {"tolerance", number(c.tolerance)},
                           {"pass", c.pass}});
  }
  j["metrics"] = Json::object();
  for (const auto& [k, x] : v.metrics) j["metrics"][k] = number(x);
  j["artifacts"] = v.artifacts;
  j["pass"] = v.pass();
  j["wall_seconds"] = v.wall_seconds;
  os << j.dump(2) << '\n';
}

void write_verdict_csv(std::ostream& os, const Verdict& v) {
  os.precision(17);
  os << "experiment,check,measured,expected,provenance,comparison,tolerance,pass\n";
  for (const auto& c : v.checks) {
    os << v.experiment << ",\"" << c.name << "\"," << c.measured << ',' << c.expected << ','
       << provenance_tag(c.provenance) << ',' << comparison_name(c.comparison) << ',' << c.tolerance << ','
       << (c.pass ? "true" : "false") << '\n';
  }
}

void write_registry(std::ostream& os, const std::string& format) {
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& e : experiment_registry()) {
      Json tags = Json::array();
      for (auto t : e.provenance) tags.push_back(provenance_tag(t));
      arr.push_back({{"name", e.name}, {"description", e.description}, {"reference", e.reference},
                     {"provenance", tags}, {"defaults", e.defaults}});
    }
    os << arr.dump(2) << '\n';
  } else if (format == "csv") {
    os << "name,description,reference,provenance\n";
    for (const auto& e : experiment_registry()) {
      os << e.name << ",\"" << e.description << "\",\"" << e.reference << "\",";
      for (std::size_t i = 0; i < e.provenance.size(); ++i) os << (i ? ";" : "") << provenance_tag(e.provenance[i]);
      os << '\n';
    }
  } else {
    throw UsageError("format must be csv or json");
  }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace rwde
