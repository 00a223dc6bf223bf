#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rwde/graph.hpp"
#include "rwde/rng.hpp"
#include "rwde/sampling.hpp"

namespace rwde {

/// div(theta)(x) = sum of theta over edges leaving x minus sum over edges
/// entering x.
std::vector<double> divergence(const Digraph& g, std::span<const double> values);

/// Independent Dirichlet((alpha_e)_{tail e = x}) at every vertex.
Environment sample_environment(const WeightedDigraph& g, RngHandle& rng);

/// Unique invariant probability of the quenched chain. Throws StructuralError
/// when the graph is not strongly connected.
VertexMeasure invariant_measure(const Environment& env);
/// sup_x |(pi P)(x) - pi(x)|.
double invariant_residual(const Environment& env, std::span<const double> pi);

/// Time-reversed environment on the dual graph: edge e of the result is edge
/// e reversed and carries pi(tail) omega_e / pi(head).
Environment reverse_environment(const Environment& env);
/// Same, reusing a dual topology obtained from env.topology().reversed().
Environment reverse_environment(const Environment& env, DigraphPtr dual);

/// Dual graph with the weight of edge e moved to its reversal.
WeightedDigraph reversed_weights(const WeightedDigraph& g);

/// prod_{e in sigma} omega_e.
double cycle_weight(const Environment& env, const Cycle& sigma);

/// P_start(H_A < H_B).
double absorption_probability(const Environment& env, std::size_t start,
                              std::span<const std::size_t> target_a,
                              std::span<const std::size_t> target_b);

/// P_start(H_A < H_B) for many environments on one topology. The reachable
/// set and the sparse symbolic factorization are computed once.
class AbsorptionSolver {
 public:
  AbsorptionSolver(DigraphPtr topology, std::size_t start, std::span<const std::size_t> target_a,
                   std::span<const std::size_t> target_b);
  ~AbsorptionSolver();
  AbsorptionSolver(AbsorptionSolver&&) noexcept;
  AbsorptionSolver& operator=(AbsorptionSolver&&) noexcept;

  double solve(const Environment& env);
  /// Residual of the last solve (sup norm of the harmonic equations).
  double last_residual() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Probability that the walk started at x first comes back to x through the
/// edge `entry` (whose head must be x).
double return_via_edge_probability(const Environment& env, std::size_t x, std::size_t entry);
/// Same for all edges entering x at once: result[k] belongs to in_edges(x)[k].
std::vector<double> return_edge_distribution(const Environment& env, std::size_t x);

/// Expected number of visits to x before leaving A (x in A), counting time 0.
double green_function_finite(const Environment& env, std::span<const std::size_t> a, std::size_t x);

/// E_v[H_B] for every vertex v (0 on B).
std::vector<double> expected_hitting_time(const Environment& env, std::span<const std::size_t> target);

/// sum over spanning trees directed toward x0 of prod z_e, as the principal
/// minor of M (M_xx = z_x, M_xy = -z_(x,y)) with row and column x0 removed.
double matrix_tree_minor(const Digraph& g, std::span<const double> z, std::size_t x0);
/// Same by explicit enumeration of edge subsets (test oracle, small graphs).
double matrix_tree_bruteforce(const Digraph& g, std::span<const double> z, std::size_t x0);

/// Z_e = pi(tail e) omega_e / (pi(tail e0) omega_e0).
std::vector<double> occupation_coordinates(const Environment& env, std::size_t e0);

/// Density of (Z_e) at z with respect to the chart measure prod_{e not in B} dz_e.
/// Requires z > 0, z_e0 = 1 and div z = 0 (1e-9).
double occupation_density(const WeightedDigraph& g, std::span<const double> z, std::size_t e0,
                          std::size_t x0);
double log_occupation_density(const WeightedDigraph& g, std::span<const double> z, std::size_t e0,
                              std::size_t x0);

/// E[prod_e omega_e^{xi_e}] under the Dirichlet environment law of g.
ExtendedReal environment_moment(const WeightedDigraph& g, std::span<const double> exponents);

}  // namespace rwde
