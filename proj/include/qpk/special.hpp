#pragma once

namespace qpk::special {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, n = 9).
double log_gamma(double x);

/// Regularized lower incomplete gamma P(k, x) for k > 0, x >= 0.
/// Series expansion for x < k + 1, Lentz continued fraction for Q otherwise.
double gamma_p(double k, double x);

/// Regularized upper incomplete gamma Q(k, x) = 1 - P(k, x).
double gamma_q(double k, double x);

}  // namespace qpk::special
