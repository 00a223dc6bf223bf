#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace rwde {

inline constexpr std::size_t kMaxDim = 4;

/// Lattice point; only the first d coordinates are meaningful, the rest stay 0.
using Site = std::array<std::int32_t, kMaxDim>;

/// Translation-invariant weights alpha_1..alpha_{2d}, direction i < d is +e_i
/// and direction i + d is -e_i.
class LatticeWeights {
 public:
  LatticeWeights(std::size_t dim, std::vector<double> alpha);

  std::size_t dim() const noexcept { return d_; }
  std::size_t directions() const noexcept { return 2 * d_; }
  std::span<const double> alpha() const noexcept { return alpha_; }
  double operator[](std::size_t i) const { return alpha_[i]; }
  double total() const noexcept;

  /// Index of the opposite direction.
  std::size_t opposite(std::size_t i) const noexcept { return i < d_ ? i + d_ : i - d_; }
  Site step(Site x, std::size_t i) const noexcept {
    if (i < d_) ++x[i];
    else --x[i - d_];
    return x;
  }

 private:
  std::size_t d_;
  std::vector<double> alpha_;
};

std::uint64_t site_hash(const Site& x) noexcept;

struct SiteHash {
  std::size_t operator()(const Site& x) const noexcept { return site_hash(x); }
};

/// Lazily sampled i.i.d. Dirichlet environment on Z^d. The transition vector
/// at x is drawn from an RNG stream keyed by (seed, x), so the environment
/// does not depend on the order in which sites are visited.
class LatticeEnvironment {
 public:
  LatticeEnvironment(LatticeWeights weights, std::uint64_t seed);

  const LatticeWeights& weights() const noexcept { return w_; }
  std::size_t dim() const noexcept { return w_.dim(); }
  std::uint64_t seed() const noexcept { return seed_; }

  /// 2d transition probabilities at x. The span stays valid until the next
  /// call that samples a new site.
  std::span<const double> at(const Site& x);
  /// d = 1 shortcut: probability of stepping to x + 1.
  double right(std::int32_t x);

  std::size_t cached_sites() const noexcept;
  bool underflow() const noexcept { return underflow_; }

 private:
  void sample_site(const Site& x, std::span<double> out);

  LatticeWeights w_;
  std::uint64_t seed_;
  bool underflow_ = false;
  // d = 1: dense storage of p_right, NaN when not sampled yet.
  std::vector<double> pos_, neg_;
  std::array<double, 2> scratch1_{};
  std::unordered_map<Site, std::array<double, 2 * kMaxDim>, SiteHash> cache_;
};

}  // namespace rwde
