#include "rwde/onedim.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <ostream>

#include "rwde/errors.hpp"
#include "rwde/sampling.hpp"
#include "rwde/special.hpp"

namespace rwde {

namespace {

constexpr double kQuadTol = 1e-12;

double gk(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  double err = 0.0;
  // u rounds onto an endpoint for abscissae within an ulp of it; drop those samples
  auto h = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : 0.0;
  };
  return rule.integrate(h, a, b, kQuadTol, &err);
}

// int_lo^hi g(u) u^{a-1} (1-u)^{b-1} du with u = s^{1/a} on (0, 1/2] and
// 1 - u = s^{1/b} on [1/2, 1), which removes both endpoint singularities.
double beta_integral(double a, double b, const std::function<double(double)>& g, double lo = 0.0,
                     double hi = 1.0) {
  double total = 0.0;
  const double mid = 0.5;
  if (lo < mid) {
    const double top = std::min(hi, mid);
    auto f = [&](double s) {
      const double u = std::pow(s, 1.0 / a);
      return g(u) * std::pow(1.0 - u, b - 1.0);
    };
    total += gk(f, std::pow(lo, a), std::pow(top, a)) / a;
  }
  if (hi > mid) {
    const double bottom = std::max(lo, mid);
    auto f = [&](double s) {
      const double w = std::pow(s, 1.0 / b);
      return g(1.0 - w) * std::pow(1.0 - w, a - 1.0);
    };
    total += gk(f, std::pow(1.0 - hi, b), std::pow(1.0 - bottom, b)) / b;
  }
  return total;
}

void require_transient(const BetaEnvParams& p, const char* fn) {
  if (!(p.alpha > p.beta)) throw ParameterError(std::string(fn) + ": requires alpha > beta");
}

void require_z(double z, const char* fn) {
  if (!(z < 1.0) || std::isnan(z)) throw ParameterError(std::string(fn) + ": requires z < 1");
}

// B(alpha, beta) F(alpha, alpha; alpha + beta; z): normalization of h1.
double h1_norm(const BetaEnvParams& p, double z) {
  return beta_integral(p.alpha, p.beta, [&](double u) { return std::pow(1.0 - u * z, -p.alpha); });
}

double draw_omega(const BetaEnvParams& p, RngHandle& rng) { return sample_beta(p.alpha, p.beta, rng); }

}  // namespace

BetaEnvParams::BetaEnvParams(double a, double b) : alpha(a), beta(b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("BetaEnvParams: alpha and beta must be positive");
  }
}

double sample_R(const BetaEnvParams& p, RngHandle& rng, double tol) {
  require_transient(p, "sample_R");
  if (!(tol > 0.0)) throw ParameterError("sample_R: tol must be positive");
  double sum = 1.0;
  double prod = 1.0;
  while (prod >= tol * sum) {
    // rho = (1 - omega) / omega = G_beta / G_alpha
    prod *= std::exp(sample_log_gamma(p.beta, rng) - sample_log_gamma(p.alpha, rng));
    sum += prod;
  }
  return sum;
}

double kesten_constant(const BetaEnvParams& p) {
  require_transient(p, "kesten_constant");
  const double k = p.alpha - p.beta;
  return 1.0 / (k * beta_fn(k, p.beta));
}

double solomon_speed(const BetaEnvParams& p) {
  if (p.alpha <= p.beta + 1.0) return 0.0;
  return (p.alpha - p.beta - 1.0) / (p.alpha + p.beta - 1.0);
}

Slab sample_slab(const BetaEnvParams& p, std::size_t m, RngHandle& rng) {
  Slab s;
  s.m = m;
  s.omega.resize(2 * m + 1);
  for (double& w : s.omega) w = draw_omega(p, rng);
  return s;
}

QuenchedIdentities quenched_identities(const Slab& slab, double tol) {
  const auto m = static_cast<std::ptrdiff_t>(slab.m);
  if (m < 1) throw UsageError("quenched_identities: slab too short");
  QuenchedIdentities q;
  auto rho = [&](std::ptrdiff_t x) { return (1.0 - slab.at(x)) / slab.at(x); };
  double sum = 1.0, prod = 1.0;
  for (std::ptrdiff_t x = 1; x <= m; ++x) {
    prod *= rho(x);
    sum += prod;
  }
  q.r_plus = sum;
  q.truncated = prod > tol * sum;
  sum = 1.0;
  prod = 1.0;
  for (std::ptrdiff_t x = 0; x >= -m; --x) {
    prod *= rho(x);
    sum += prod;
  }
  q.r_minus = sum;
  q.truncated = q.truncated || prod > tol * sum;
  q.escape = 1.0 / q.r_plus;
  q.green = q.r_plus / slab.at(0);
  q.mean_hitting = 2.0 * q.r_minus - 1.0;
  return q;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::sub_ballistic: return "sub-ballistic";
    case Regime::critical: return "critical";
    case Regime::stable: return "stable";
    case Regime::boundary: return "boundary";
    case Regime::gaussian: return "gaussian";
  }
  return "unknown";
}

RegimeConstants regime_constants(const BetaEnvParams& p) {
  require_transient(p, "regime_constants");
  RegimeConstants rc;
  const double k = p.kappa1();
  rc.kappa1 = k;
  rc.speed = solomon_speed(p);
  const double psi = digamma(p.alpha) - digamma(p.beta);
  const double b = beta_fn(k, p.beta);
  constexpr double pi = std::numbers::pi;
  if (k < 1.0) {
    rc.regime = Regime::sub_ballistic;
    rc.exponent = k;
    rc.scale = std::sin(pi * k) / (std::pow(2.0, k) * pi) * b * b / psi;
    rc.note = "X_n / n^kappa1 -> scale * (1/S)^kappa1";
  } else if (k == 1.0) {
    rc.regime = Regime::critical;
    rc.exponent = 1.0;
    rc.scale = 1.0 / (2.0 * p.beta);
    rc.note = "X_n log n / n -> scale in probability";
  } else if (k < 2.0) {
    rc.regime = Regime::stable;
    rc.exponent = 1.0 / k;
    rc.scale = -2.0 * std::pow(-pi / std::sin(pi * k) * psi / (b * b), 1.0 / k) * std::pow(rc.speed, 1.0 + 1.0 / k);
    rc.note = "(X_n - v n) / n^(1/kappa1) -> scale * S";
  } else if (k == 2.0) {
    rc.regime = Regime::boundary;
    rc.exponent = 0.5;
    rc.note = "sqrt(n log n) scaling; constant not available";
  } else {
    rc.regime = Regime::gaussian;
    rc.exponent = 0.5;
    const double num = p.beta * (p.alpha - 1.0) * (p.alpha - p.beta);
    const double den = (p.alpha - p.beta - 2.0) * (p.alpha + p.beta - 1.0) * (p.alpha + p.beta - 1.0);
    rc.scale = 2.0 * std::sqrt(num / den);
    rc.note = "(X_n - v n) / sqrt(n) -> N(0, scale^2)";
  }
  return rc;
}

double hyp2f1(double a, double b, double c, double z) {
  if (!(b > 0.0) || !(c > b)) throw ParameterError("hyp2f1: requires c > b > 0");
  require_z(z, "hyp2f1");
  if (z == 0.0) return 1.0;
  const double integral = beta_integral(b, c - b, [&](double u) { return std::pow(1.0 - u * z, -a); });
  return integral / beta_fn(b, c - b);
}

double h1_density(const BetaEnvParams& p, double z, double u) {
  require_z(z, "h1_density");
  if (!(u > 0.0) || !(u < 1.0)) return 0.0;
  const double log_kernel =
      (p.alpha - 1.0) * std::log(u) + (p.beta - 1.0) * std::log1p(-u) - p.alpha * std::log1p(-u * z);
  return std::exp(log_kernel) / h1_norm(p, z);
}

double h1_cdf(const BetaEnvParams& p, double z, double u) {
  require_z(z, "h1_cdf");
  if (!(u > 0.0)) return 0.0;
  if (!(u < 1.0)) return 1.0;
  auto kernel = [&](double v) { return std::pow(1.0 - v * z, -p.alpha); };
  const double norm = h1_norm(p, z);
  // Integrate over the shorter side for accuracy in both tails.
  if (u <= 0.5) return std::clamp(beta_integral(p.alpha, p.beta, kernel, 0.0, u) / norm, 0.0, 1.0);
  return std::clamp(1.0 - beta_integral(p.alpha, p.beta, kernel, u, 1.0) / norm, 0.0, 1.0);
}

double h1_expectation(const BetaEnvParams& p, double z, const std::function<double(double)>& g) {
  require_z(z, "h1_expectation");
  auto kernel = [&](double v) { return g(v) * std::pow(1.0 - v * z, -p.alpha); };
  return beta_integral(p.alpha, p.beta, kernel) / h1_norm(p, z);
}

PhiResult phi_continued_fraction(std::span<const double> omegas, double lambda, double tol) {
  if (!(lambda > 0.0) || lambda > 1.0) throw ParameterError("phi_continued_fraction: lambda must be in (0, 1]");
  if (omegas.empty()) throw UsageError("phi_continued_fraction: empty slab");
  double lo = 0.0, hi = lambda;
  for (std::size_t k = omegas.size(); k-- > 0;) {
    const double w = omegas[k];
    lo = lambda * w / (1.0 - lambda * (1.0 - w) * lo);
    hi = lambda * w / (1.0 - lambda * (1.0 - w) * hi);
  }
  PhiResult r;
  r.value = hi;
  r.spread = std::abs(hi - lo);
  r.depth = omegas.size() - 1;
  r.converged = r.spread < tol;
  return r;
}

PhiResult sample_phi(const BetaEnvParams& p, double lambda, RngHandle& rng, double tol, std::size_t max_depth) {
  std::vector<double> omegas;
  std::size_t depth = 16;
  PhiResult r;
  for (;;) {
    while (omegas.size() < depth + 1) omegas.push_back(draw_omega(p, rng));
    r = phi_continued_fraction(omegas, lambda, tol);
    if (r.converged || depth >= max_depth) return r;
    depth = std::min(2 * depth, max_depth);
  }
}

double sample_Z_fixed_point(const BetaEnvParams& p, double lambda, std::size_t iterations, RngHandle& rng) {
  if (!(lambda >= 0.0) || lambda > 1.0) throw ParameterError("sample_Z_fixed_point: lambda must be in [0, 1]");
  const double l2 = lambda * lambda;
  double z = 0.5;
  for (std::size_t i = 0; i < iterations; ++i) {
    const double u = draw_omega(p, rng);
    // Y / (1 + Y - l2 Z) with Y = U / (1 - U), written without the division by 1 - U.
    z = u / (1.0 - l2 * z * (1.0 - u));
  }
  return z;
}

double log_mgf(const BetaEnvParams& p, double lambda) {
  require_transient(p, "log_mgf");
  if (!(lambda > 0.0) || lambda > 1.0) throw ParameterError("log_mgf: lambda must be in (0, 1]");
  if (lambda == 1.0) return 0.0;
  return std::log(lambda) + h1_expectation(p, lambda * lambda, [](double u) { return std::log(u); });
}

RatePoint rate_function(const BetaEnvParams& p, double t) {
  require_transient(p, "rate_function");
  if (!(t >= 1.0)) throw ParameterError("rate_function: t must be >= 1");
  // Concave objective in eta = log lambda on [-20, 0].
  auto objective = [&](double eta) { return eta == 0.0 ? 0.0 : t * eta - log_mgf(p, std::exp(eta)); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -20.0, b = 0.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
    }
  }
  RatePoint rp;
  rp.t = t;
  double eta = 0.5 * (a + b);
  double best = objective(eta);
  for (double edge : {-20.0, 0.0}) {
    const double v = objective(edge);
    if (v > best) {
      best = v;
      eta = edge;
    }
  }
  rp.rate = std::max(0.0, best);
  rp.lambda_star = std::exp(eta);
  return rp;
}

std::vector<RatePoint> rate_function_table(const BetaEnvParams& p, std::span<const double> ts) {
  std::vector<RatePoint> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(rate_function(p, t));
  return out;
}

void write_rate_csv(std::ostream& os, std::span<const RatePoint> table) {
  os << "t,I,lambda_star\n";
  os.precision(17);
  for (const auto& r : table) os << r.t << ',' << r.rate << ',' << r.lambda_star << '\n';
}

void write_regime_csv(std::ostream& os, std::span<const BetaEnvParams> params) {
  os << "alpha,beta,kappa1,regime,v,exponent,scale_constant_or_NA\n";
  os.precision(17);
  for (const auto& p : params) {
    const RegimeConstants rc = regime_constants(p);
    os << p.alpha << ',' << p.beta << ',' << rc.kappa1 << ',' << regime_name(rc.regime) << ',' << rc.speed << ','
       << rc.exponent << ',';
    if (rc.scale) os << *rc.scale;
    else os << "NA";
    os << '\n';
  }
}

}  // namespace rwde
