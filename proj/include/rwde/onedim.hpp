#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwde/rng.hpp"

namespace rwde {

/// Beta(alpha, beta) environment on Z: omega_x = omega_(x, x+1).
struct BetaEnvParams {
  double alpha = 1.0;
  double beta = 1.0;

  BetaEnvParams() = default;
  BetaEnvParams(double a, double b);

  double kappa1() const noexcept { return alpha - beta; }
};

/// R = 1 + rho_1 + rho_1 rho_2 + ..., rho = (1 - omega) / omega, truncated once
/// the running product drops below tol times the partial sum.
double sample_R(const BetaEnvParams& p, RngHandle& rng, double tol = 1e-12);

/// C_K = 1 / ((alpha - beta) B(alpha - beta, beta)).
double kesten_constant(const BetaEnvParams& p);

/// (alpha - beta - 1) / (alpha + beta - 1) when alpha > beta + 1, else 0.
double solomon_speed(const BetaEnvParams& p);

/// omega_x for x in [-m, m]; omega[m + x].
struct Slab {
  std::vector<double> omega;
  std::size_t m = 0;

  double at(std::ptrdiff_t x) const { return omega[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(m) + x)]; }
};

Slab sample_slab(const BetaEnvParams& p, std::size_t m, RngHandle& rng);

struct QuenchedIdentities {
  double escape = 0.0;  // P_{1,omega}(H_0 = infinity) = 1 / R
  double green = 0.0;  // G_omega(0, 0) = R / omega_0
  double mean_hitting = 0.0;  // E_{0,omega}[H_1] = 2 R_- - 1
  double r_plus = 0.0;
  double r_minus = 0.0;
  bool truncated = false;  // last series term above tol times the sum
};

QuenchedIdentities quenched_identities(const Slab& slab, double tol = 1e-12);

enum class Regime { sub_ballistic, critical, stable, boundary, gaussian };

std::string regime_name(Regime r);

struct RegimeConstants {
  double kappa1 = 0.0;
  Regime regime = Regime::gaussian;
  double speed = 0.0;
  /// Exponent of the normalization: n^kappa1 (sub-ballistic), 1 for n/log n
  /// (critical), 1/kappa1 (stable), 1/2 (boundary with log, gaussian).
  double exponent = 0.0;
  /// Scale constant of the limit law; empty for kappa1 = 2.
  std::optional<double> scale;
  std::string note;
};

RegimeConstants regime_constants(const BetaEnvParams& p);

/// Gauss hypergeometric 2F1(a, b; c; z) from its Euler integral (c > b > 0, z < 1).
double hyp2f1(double a, double b, double c, double z);

/// Density of h1(alpha, beta; z) at u in (0, 1).
double h1_density(const BetaEnvParams& p, double z, double u);
double h1_cdf(const BetaEnvParams& p, double z, double u);
/// E[g(U)] for U ~ h1(alpha, beta; z) by endpoint-transformed quadrature.
double h1_expectation(const BetaEnvParams& p, double z, const std::function<double(double)>& g);

struct PhiResult {
  double value = 0.0;  // phi(omega, lambda)
  double spread = 0.0;  // |phi(seed 0) - phi(seed lambda)|
  std::size_t depth = 0;
  bool converged = false;
};

/// phi_k = lambda omega_k / (1 - lambda (1 - omega_k) phi_{k-1}) run from
/// k = -M up to 0 over omegas = (omega_0, omega_{-1}, ..., omega_{-M}),
/// from the two seeds 0 and lambda.
PhiResult phi_continued_fraction(std::span<const double> omegas, double lambda, double tol = 1e-10);
/// Same, drawing the environment and doubling the depth until the seeds agree.
PhiResult sample_phi(const BetaEnvParams& p, double lambda, RngHandle& rng, double tol = 1e-10,
                     std::size_t max_depth = 100'000);

/// Z <- Y / (1 + Y - lambda^2 Z), Y = U / (1 - U), U ~ Beta(alpha, beta).
double sample_Z_fixed_point(const BetaEnvParams& p, double lambda, std::size_t iterations, RngHandle& rng);

/// E[log phi(omega, lambda)] = log lambda + E[log Z], Z ~ h1(alpha, beta; lambda^2).
double log_mgf(const BetaEnvParams& p, double lambda);

struct RatePoint {
  double t = 0.0;
  double rate = 0.0;
  double lambda_star = 1.0;
};

/// I(t) = sup_{lambda in (0, 1]} (t log lambda - E[log phi(omega, lambda)]).
RatePoint rate_function(const BetaEnvParams& p, double t);
std::vector<RatePoint> rate_function_table(const BetaEnvParams& p, std::span<const double> ts);

/// CSV `t,I,lambda_star`.
void write_rate_csv(std::ostream& os, std::span<const RatePoint> table);
/// CSV `alpha,beta,kappa1,regime,v,exponent,scale_constant_or_NA`.
void write_regime_csv(std::ostream& os, std::span<const BetaEnvParams> params);

}  // namespace rwde
