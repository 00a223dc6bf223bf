#include "rwde/builders.hpp"

#include <cmath>
#include <map>

#include "rwde/errors.hpp"

namespace rwde {

namespace {

void check_alpha(std::span<const double> alpha, std::size_t expected, const char* fn) {
  if (alpha.size() != expected) {
    throw UsageError(std::string(fn) + ": expected " + std::to_string(expected) + " weights");
  }
  for (double a : alpha) {
    if (!(a > 0.0)) throw ParameterError(std::string(fn) + ": weights must be positive");
  }
}

}  // namespace

std::size_t torus_vertex(std::size_t d, std::size_t n, const Site& x) {
  std::size_t v = 0;
  std::size_t scale = 1;
  const auto nn = static_cast<std::int64_t>(n);
  for (std::size_t k = 0; k < d; ++k) {
    const std::int64_t c = ((x[k] % nn) + nn) % nn;
    v += static_cast<std::size_t>(c) * scale;
    scale *= n;
  }
  return v;
}

Site torus_site(std::size_t d, std::size_t n, std::size_t v) {
  Site x{};
  for (std::size_t k = 0; k < d; ++k) {
    x[k] = static_cast<std::int32_t>(v % n);
    v /= n;
  }
  return x;
}

WeightedDigraph build_torus(std::size_t d, std::size_t n, std::span<const double> alpha) {
  if (d < 1 || d > kMaxDim) throw UsageError("build_torus: dimension must be in 1..4");
  if (n < 1) throw UsageError("build_torus: side must be >= 1");
  check_alpha(alpha, 2 * d, "build_torus");
  const LatticeWeights w(d, {alpha.begin(), alpha.end()});
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) count *= n;
  std::vector<Edge> edges;
  std::vector<double> weights;
  edges.reserve(count * 2 * d);
  weights.reserve(count * 2 * d);
  for (std::size_t v = 0; v < count; ++v) {
    const Site x = torus_site(d, n, v);
    for (std::size_t i = 0; i < 2 * d; ++i) {
      edges.push_back({v, torus_vertex(d, n, w.step(x, i))});
      weights.push_back(alpha[i]);
    }
  }
  return WeightedDigraph(count, std::move(edges), std::move(weights));
}

BallGraph build_ball(std::size_t d, std::size_t n, double gamma, std::span<const double> alpha) {
  if (d < 1 || d > kMaxDim) throw UsageError("build_ball: dimension must be in 1..4");
  if (n < 1) throw UsageError("build_ball: radius must be >= 1");
  if (!(gamma > 0.0)) throw ParameterError("build_ball: special edge weight must be positive");
  std::vector<double> a(alpha.begin(), alpha.end());
  if (a.empty()) a.assign(2 * d, 1.0);
  check_alpha(a, 2 * d, "build_ball");
  const LatticeWeights w(d, a);

  BallGraph out{WeightedDigraph(1, {{0, 0}}, {1.0}), {}, 0, 0, 0};
  std::map<Site, std::size_t> index;
  const auto r = static_cast<std::int32_t>(n);
  const auto r2 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n);
  // Enumerate the cube [-N, N]^d in lexicographic order.
  Site x{};
  for (std::size_t k = 0; k < d; ++k) x[k] = -r;
  for (;;) {
    std::int64_t norm = 0;
    for (std::size_t k = 0; k < d; ++k) norm += static_cast<std::int64_t>(x[k]) * x[k];
    if (norm <= r2) {
      index.emplace(x, out.sites.size());
      out.sites.push_back(x);
    }
    std::size_t k = 0;
    while (k < d && x[k] == r) x[k++] = -r;
    if (k == d) break;
    ++x[k];
  }
  const std::size_t boundary = out.sites.size();
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (std::size_t v = 0; v < boundary; ++v) {
    for (std::size_t i = 0; i < 2 * d; ++i) {
      auto it = index.find(w.step(out.sites[v], i));
      edges.push_back({v, it == index.end() ? boundary : it->second});
      weights.push_back(a[i]);
    }
  }
  for (std::size_t v = 0; v < boundary; ++v) {
    for (std::size_t i = 0; i < 2 * d; ++i) {
      if (index.count(w.step(out.sites[v], i)) == 0) {
        edges.push_back({boundary, v});
        weights.push_back(a[w.opposite(i)]);
      }
    }
  }
  out.origin = index.at(Site{});
  out.boundary = boundary;
  out.special_edge = edges.size();
  edges.push_back({boundary, out.origin});
  weights.push_back(gamma);
  out.graph = WeightedDigraph(boundary + 1, std::move(edges), std::move(weights));
  return out;
}

CylinderGraph build_cylinder(std::size_t n, std::size_t length, std::span<const double> alpha) {
  if (n < 1 || length < 1) throw UsageError("build_cylinder: sizes must be >= 1");
  check_alpha(alpha, 4, "build_cylinder");
  if (!(alpha[0] > alpha[2])) throw ParameterError("build_cylinder: need alpha_1 > alpha_3");
  CylinderGraph out{WeightedDigraph(1, {{0, 0}}, {1.0}), n, length, n * length, n * length + 1, 0, 0};
  auto id = [n](std::size_t c, std::size_t r) { return c * n + r; };
  std::vector<Edge> edges;
  std::vector<double> weights;
  auto add = [&](std::size_t t, std::size_t h, double a) {
    edges.push_back({t, h});
    weights.push_back(a);
  };
  for (std::size_t c = 0; c < length; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t v = id(c, r);
      add(v, c + 1 < length ? id(c + 1, r) : out.right, alpha[0]);
      add(v, id(c, (r + 1) % n), alpha[1]);
      add(v, c > 0 ? id(c - 1, r) : out.left, alpha[2]);
      add(v, id(c, (r + n - 1) % n), alpha[3]);
    }
  }
  for (std::size_t r = 0; r < n; ++r) add(out.left, id(0, r), alpha[0]);
  for (std::size_t r = 0; r < n; ++r) add(out.right, id(length - 1, r), alpha[2]);
  out.long_edge = edges.size();
  add(out.right, out.left, static_cast<double>(n) * (alpha[0] - alpha[2]));
  out.graph = WeightedDigraph(n * length + 2, std::move(edges), std::move(weights));
  return out;
}

WeightedDigraph build_segment(std::size_t length, double alpha, double beta) {
  if (length < 1) throw UsageError("build_segment: length must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ParameterError("build_segment: weights must be positive");
  std::vector<Edge> edges;
  std::vector<double> weights;
  for (std::size_t x = 0; x <= length; ++x) {
    if (x < length) {
      edges.push_back({x, x + 1});
      weights.push_back(alpha);
    }
    if (x > 0) {
      edges.push_back({x, x - 1});
      weights.push_back(beta);
    }
  }
  if (alpha > beta) {
    edges.push_back({length, 0});
    weights.push_back(alpha - beta);
  } else if (beta > alpha) {
    edges.push_back({0, length});
    weights.push_back(beta - alpha);
  }
  return WeightedDigraph(length + 1, std::move(edges), std::move(weights));
}

WeightedDigraph build_bidirected_cycle(std::size_t n, double weight) {
  if (n < 2) throw UsageError("build_bidirected_cycle: need at least 2 vertices");
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < n; ++x) {
    edges.push_back({x, (x + 1) % n});
    edges.push_back({x, (x + n - 1) % n});
  }
  std::vector<double> weights(edges.size(), weight);
  return WeightedDigraph(n, std::move(edges), std::move(weights));
}

}  // namespace rwde
