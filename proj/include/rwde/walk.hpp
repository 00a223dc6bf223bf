#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rwde/graph.hpp"
#include "rwde/lattice.hpp"
#include "rwde/rng.hpp"

namespace rwde {

/// d_alpha = sum_i alpha_i e_i (as a d-vector).
std::vector<double> d_alpha(const LatticeWeights& w);
/// kappa = 2 sum alpha - max_i (alpha_i + alpha_{i+d}).
double kappa(const LatticeWeights& w);
/// kappa^Lambda for the box of radius r:
/// min_{i0} (alpha_i0 + alpha_{i0+d} + (r + 1) sum_{i != i0} (alpha_i + alpha_{i+d})).
double kappa_lambda_box(const LatticeWeights& w, std::size_t r);

inline constexpr std::uint64_t kDefaultStepGuard = 1'000'000'000ULL;

struct StopRule {
  enum class Kind { horizon, hit, exit_box };

  Kind kind = Kind::horizon;
  /// Number of steps (discrete) or time (continuous) for Kind::horizon.
  double horizon = 0.0;
  std::vector<std::size_t> vertices;  // Kind::hit on finite graphs
  std::vector<Site> sites;  // Kind::hit on the lattice
  /// Kind::exit_box: stop at the first time |X - start|_inf > radius.
  std::int64_t radius = 0;
  /// Also stop when the walk comes back to its start (time > 0).
  bool stop_on_return = false;
  std::uint64_t max_steps = kDefaultStepGuard;

  static StopRule at_horizon(double n);
  static StopRule hitting_vertices(std::vector<std::size_t> targets);
  static StopRule hitting_sites(std::vector<Site> targets);
  static StopRule exiting_box(std::int64_t radius);
};

struct WalkOptions {
  /// Times at which the position is recorded (sorted). The final position is
  /// always recorded as well.
  std::vector<double> checkpoints;
  /// Store every visited position (discrete engines only).
  bool keep_path = false;
};

enum class WalkOutcome { horizon, hit, exited, returned, timeout };

struct WalkRecord {
  std::size_t dim = 0;  // 0 for walks on finite graphs
  std::vector<double> times;  // checkpoint times, increasing
  std::vector<Site> positions;  // lattice checkpoints
  std::vector<std::size_t> vertices;  // finite-graph checkpoints
  std::vector<Site> path;  // full lattice path when requested
  std::vector<std::size_t> vertex_path;  // full vertex path when requested
  std::vector<std::size_t> edge_path;  // edges taken, finite graphs with keep_path
  double final_time = 0.0;
  std::uint64_t steps = 0;
  WalkOutcome outcome = WalkOutcome::horizon;
  /// Holding times spent at the start site (continuous engine only).
  std::vector<double> start_holding_times;
};

/// Quenched walk on a finite graph.
WalkRecord quenched_walk(const Environment& env, std::size_t start, const StopRule& stop, RngHandle& rng,
                         const WalkOptions& options = {});
/// Quenched walk on a lazy lattice environment (sites are sampled on first visit).
WalkRecord quenched_walk(LatticeEnvironment& env, const Site& start, const StopRule& stop, RngHandle& rng,
                         const WalkOptions& options = {});

/// Directed-edge linearly reinforced walk: edge e is taken with probability
/// proportional to alpha_e + (number of previous traversals of e).
WalkRecord reinforced_walk(const WeightedDigraph& g, std::size_t start, std::uint64_t horizon, RngHandle& rng,
                           const WalkOptions& options = {});
WalkRecord reinforced_walk(const LatticeWeights& w, const Site& start, std::uint64_t horizon, RngHandle& rng,
                           const WalkOptions& options = {});

/// Annealed probability of an edge path: sequential urn product of the
/// reinforced walk.
double reinforced_path_probability(const WeightedDigraph& g, std::span<const std::size_t> edges);
/// Same path probability as the Dirichlet moment E[prod_e omega_e^{n_e}].
double dirichlet_path_probability(const WeightedDigraph& g, std::span<const std::size_t> edges);
/// All edge paths of the given length from start.
std::vector<std::vector<std::size_t>> enumerate_paths(const Digraph& g, std::size_t start, std::size_t length);

struct Regeneration {
  std::vector<std::uint64_t> taus;
  /// (X_{tau_k} - X_{tau_{k-1}}) . l for k >= 1 (tau_0 = 0).
  std::vector<double> displacements;
  /// Record candidates dropped because the observed horizon could not confirm them.
  std::size_t censored = 0;
};

/// Renewal times in direction l from a full path (record.path). tau_{k+1} is
/// the first n > tau_k with X_i.l < X_n.l <= X_j.l for all i < n <= j within
/// the observed horizon; the trailing unconfirmed candidate is discarded.
Regeneration regeneration_times(const WalkRecord& record, std::span<const double> l);
Regeneration regeneration_times(std::span<const double> projections);

/// Accelerating factor 1 / sum_sigma omega_sigma over simple paths from x that
/// stop right after leaving the box x + [-r, r]^d. Throws ResourceError past
/// `max_paths` paths.
double gamma_factor(LatticeEnvironment& env, const Site& x, std::size_t r,
                    std::uint64_t max_paths = 1'000'000);

/// Continuous-time chain with jump rate gamma(x) omega(x, y). Checkpoints are
/// times; stop.horizon is the time horizon.
WalkRecord accelerated_walk(LatticeEnvironment& env, std::size_t r, const Site& start, double horizon,
                            RngHandle& rng, const WalkOptions& options = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t excluded = 0;  // nonpositive displacements dropped
  std::vector<double> log_times;
  std::vector<double> median_log_displacement;
};

/// Least-squares slope of median log(X_n . l) against log n over the shared
/// checkpoint times of an ensemble.
ExponentFit displacement_exponent(std::span<const WalkRecord> records, std::span<const double> l);

/// CSV `replica,time,x_1..x_d` (lattice) or `replica,time,vertex` (graph).
void write_walk_csv(std::ostream& os, std::span<const WalkRecord> records);
/// CSV `replica,k,tau_k,displacement`.
void write_regeneration_csv(std::ostream& os, std::span<const Regeneration> summaries);

}  // namespace rwde
