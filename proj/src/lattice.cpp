#include "rwde/lattice.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "rwde/errors.hpp"
#include "rwde/rng.hpp"
#include "rwde/sampling.hpp"

namespace rwde {

LatticeWeights::LatticeWeights(std::size_t dim, std::vector<double> alpha)
    : d_(dim), alpha_(std::move(alpha)) {
  if (d_ < 1 || d_ > kMaxDim) throw UsageError("LatticeWeights: dimension must be in 1..4");
  if (alpha_.size() != 2 * d_) throw UsageError("LatticeWeights: need 2d weights");
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("LatticeWeights: weights must be positive");
  }
}

double LatticeWeights::total() const noexcept {
  return std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

std::uint64_t site_hash(const Site& x) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::int32_t c : x) h = mix64(h ^ static_cast<std::uint32_t>(c));
  return h;
}

LatticeEnvironment::LatticeEnvironment(LatticeWeights weights, std::uint64_t seed)
    : w_(std::move(weights)), seed_(seed) {}

void LatticeEnvironment::sample_site(const Site& x, std::span<double> out) {
  RngHandle rng(seed_, site_hash(x));
  if (sample_dirichlet_into(w_.alpha(), rng, out)) underflow_ = true;
}

std::span<const double> LatticeEnvironment::at(const Site& x) {
  if (w_.dim() == 1) {
    const double p = right(x[0]);
    scratch1_ = {p, 1.0 - p};
    return scratch1_;
  }
  auto it = cache_.find(x);
  if (it == cache_.end()) {
    std::array<double, 2 * kMaxDim> v{};
    sample_site(x, std::span<double>(v.data(), w_.directions()));
    it = cache_.emplace(x, v).first;
  }
  return {it->second.data(), w_.directions()};
}

double LatticeEnvironment::right(std::int32_t x) {
  auto& store = x >= 0 ? pos_ : neg_;
  const auto i = static_cast<std::size_t>(x >= 0 ? x : -(static_cast<std::int64_t>(x) + 1));
  if (i >= store.size()) {
    store.resize(std::max<std::size_t>(i + 1, 2 * store.size()),
                 std::numeric_limits<double>::quiet_NaN());
  }
  double& p = store[i];
  if (std::isnan(p)) {
    std::array<double, 2> v{};
    sample_site(Site{x, 0, 0, 0}, v);
    p = v[0];
  }
  return p;
}

std::size_t LatticeEnvironment::cached_sites() const noexcept {
  if (w_.dim() > 1) return cache_.size();
  std::size_t n = 0;
  for (double p : pos_) n += !std::isnan(p);
  for (double p : neg_) n += !std::isnan(p);
  return n;
}

}  // namespace rwde
