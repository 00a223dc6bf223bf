#include "rwde/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rwde/errors.hpp"

namespace rwde {

namespace {

constexpr double kUnderflowFloor = 1e-300;

void check_weights(std::span<const double> weights, const char* fn) {
  if (weights.empty()) throw ParameterError(std::string(fn) + ": empty weight vector");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ParameterError(std::string(fn) + ": weights must be positive and finite");
    }
  }
}

// Marsaglia & Tsang (2000), valid for shape >= 1.
double gamma_mt(double shape, RngHandle& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

SimplexPoint::SimplexPoint(std::vector<double> coordinates) : coords_(std::move(coordinates)) {
  if (coords_.empty()) throw UsageError("SimplexPoint: no coordinates");
  double sum = 0.0;
  for (double c : coords_) {
    if (!(c > 0.0)) throw ParameterError("SimplexPoint: coordinates must be positive");
    sum += c;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("SimplexPoint: coordinates must sum to 1");
}

UrnState::UrnState(std::vector<double> initial_weights)
    : initial_(std::move(initial_weights)), weights_(initial_) {
  check_weights(initial_, "UrnState");
  total_ = std::accumulate(initial_.begin(), initial_.end(), 0.0);
}

double UrnState::probability(std::size_t color) const {
  if (color >= weights_.size()) throw UsageError("UrnState: color index out of range");
  return weights_[color] / total_;
}

std::size_t UrnState::draw(RngHandle& rng) {
  double target = rng.uniform01() * total_;
  std::size_t color = weights_.size() - 1;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (target < weights_[i]) {
      color = i;
      break;
    }
    target -= weights_[i];
  }
  weights_[color] += 1.0;
  total_ += 1.0;
  ++draws_;
  return color;
}

double sample_gamma(double shape, RngHandle& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterError("sample_gamma: shape must be positive, got " + std::to_string(shape));
  }
  if (shape >= 1.0) return gamma_mt(shape, rng);
  return std::exp(sample_log_gamma(shape, rng));
}

double sample_log_gamma(double shape, RngHandle& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterError("sample_log_gamma: shape must be positive");
  }
  if (shape >= 1.0) return std::log(gamma_mt(shape, rng));
  // G(a) = G(a + 1) * U^{1/a}
  const double g = gamma_mt(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform01()) / shape;
}

double sample_beta(double a, double b, RngHandle& rng) {
  if (a >= 1.0 && b >= 1.0) {
    const double x = gamma_mt(a, rng);
    const double y = gamma_mt(b, rng);
    return x / (x + y);
  }
  const double lx = sample_log_gamma(a, rng);
  const double ly = sample_log_gamma(b, rng);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  return 1.0 / (1.0 + std::exp(ly - lx));
}

bool sample_dirichlet_into(std::span<const double> weights, RngHandle& rng, std::span<double> out) {
  check_weights(weights, "sample_dirichlet");
  if (out.size() != weights.size()) throw UsageError("sample_dirichlet: output size mismatch");
  const std::size_t n = weights.size();
  if (n == 1) {
    out[0] = 1.0;
    return false;
  }
  const bool small = std::any_of(weights.begin(), weights.end(), [](double w) { return w < 1.0; });
  if (!small) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = gamma_mt(weights[i], rng);
      sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return false;
  }
  // Normalize in log space so that tiny shapes do not underflow to zero.
  double top = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = sample_log_gamma(weights[i], rng);
    top = std::max(top, out[i]);
  }
  double sum = 0.0;
  for (auto& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  bool clamped = false;
  for (auto& v : out) {
    v /= sum;
    if (v < kUnderflowFloor) {
      v = kUnderflowFloor;
      clamped = true;
    }
  }
  return clamped;
}

SimplexPoint sample_dirichlet(std::span<const double> weights, RngHandle& rng) {
  std::vector<double> out(weights.size());
  sample_dirichlet_into(weights, rng, out);
  // Renormalize the last ulp so the SimplexPoint invariant holds exactly.
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (auto& v : out) v /= sum;
  return SimplexPoint(std::move(out));
}

std::pair<std::size_t, UrnState> polya_draw(UrnState state, RngHandle& rng) {
  const std::size_t color = state.draw(rng);
  return {color, std::move(state)};
}

double polya_path_probability(std::span<const double> initial_weights,
                              std::span<const std::size_t> colors) {
  check_weights(initial_weights, "polya_path_probability");
  std::vector<double> w(initial_weights.begin(), initial_weights.end());
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  double p = 1.0;
  for (std::size_t c : colors) {
    if (c >= w.size()) throw UsageError("polya_path_probability: color index out of range");
    p *= w[c] / total;
    w[c] += 1.0;
    total += 1.0;
  }
  return p;
}

ExtendedReal dirichlet_joint_moment(std::span<const double> weights,
                                    std::span<const double> exponents) {
  check_weights(weights, "dirichlet_joint_moment");
  if (weights.size() != exponents.size()) {
    throw UsageError("dirichlet_joint_moment: weights and exponents differ in length");
  }
  double log_value = 0.0;
  double a = 0.0;
  double a_plus = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double shifted = weights[i] + exponents[i];
    if (shifted <= 0.0) return ExtendedReal::infinity();
    if (exponents[i] != 0.0) log_value += std::lgamma(shifted) - std::lgamma(weights[i]);
    a += weights[i];
    a_plus += shifted;
  }
  log_value += std::lgamma(a) - std::lgamma(a_plus);
  return {std::exp(log_value), false};
}

}  // namespace rwde
