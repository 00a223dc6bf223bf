#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rwde/rng.hpp"

namespace rwde {

/// Point of the open simplex: positive coordinates summing to one.
class SimplexPoint {
 public:
  SimplexPoint() = default;
  /// Validates positivity and normalization (1e-12).
  explicit SimplexPoint(std::vector<double> coordinates);

  std::span<const double> coordinates() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::size_t size() const noexcept { return coords_.size(); }

 private:
  std::vector<double> coords_;
};

/// Pólya urn: one ball of the drawn color is added after every draw.
class UrnState {
 public:
  explicit UrnState(std::vector<double> initial_weights);

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> initial_weights() const noexcept { return initial_; }
  std::size_t draw_count() const noexcept { return draws_; }
  double total() const noexcept { return total_; }

  /// Probability that the next draw is `color`.
  double probability(std::size_t color) const;
  /// Draws in place and returns the color index.
  std::size_t draw(RngHandle& rng);

 private:
  std::vector<double> initial_;
  std::vector<double> weights_;
  double total_ = 0.0;
  std::size_t draws_ = 0;
};

/// Joint moment value that may be +infinity.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal infinity() { return {0.0, true}; }
};

/// Gamma(shape, 1). Marsaglia-Tsang squeeze for shape >= 1, boosted by
/// U^{1/shape} below 1. Exact (rejection, no discretization).
double sample_gamma(double shape, RngHandle& rng);
/// log of a Gamma(shape, 1) draw; never underflows for small shapes.
double sample_log_gamma(double shape, RngHandle& rng);
/// Beta(a, b) as G_a / (G_a + G_b).
double sample_beta(double a, double b, RngHandle& rng);

SimplexPoint sample_dirichlet(std::span<const double> weights, RngHandle& rng);
/// Allocation-free variant; `out.size()` must equal `weights.size()`.
/// Returns true if some coordinate fell below 1e-300 and was clamped.
bool sample_dirichlet_into(std::span<const double> weights, RngHandle& rng, std::span<double> out);

/// One draw: (color, updated state).
std::pair<std::size_t, UrnState> polya_draw(UrnState state, RngHandle& rng);

/// Probability of observing exactly the color sequence `colors` from an urn
/// started at `initial_weights`.
double polya_path_probability(std::span<const double> initial_weights,
                              std::span<const std::size_t> colors);

/// E[prod V_i^{xi_i}] for V ~ Dirichlet(weights); infinite when some
/// weights[i] + exponents[i] <= 0.
ExtendedReal dirichlet_joint_moment(std::span<const double> weights,
                                    std::span<const double> exponents);

}  // namespace rwde
