#pragma once

namespace rwde {

double log_gamma(double x);
double digamma(double x);
double beta_fn(double a, double b);
double log_beta_fn(double a, double b);
/// Regularized incomplete beta I_x(a, b), the Beta(a, b) CDF.
double beta_cdf(double a, double b, double x);

}  // namespace rwde
