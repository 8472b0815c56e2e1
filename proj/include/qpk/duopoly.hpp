#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qpk/monopoly.hpp"
#include "qpk/wardrop.hpp"

namespace qpk {

struct BestResponse {
  ServerId server = ServerId::One;
  double given_price = 0.0;
  double gamma_star = 0.0;
  double price_star = 0.0;
  double revenue_star = 0.0;
  double rate_cap = 0.0;
  /// Refined local maxima of R_j found on the scan grid, increasing.
  std::vector<double> stationary_points;
};

/// Server j's revenue-maximizing reply to the rival price, computed in rate
/// space: maximize (g_j(gamma) + other_price) * gamma over
/// [lambda * kProbFloor, rate_cap_j(other_price) * (1 - kProbFloor)].
/// Every local maximum is refined and the global one wins; exact revenue
/// ties go to the smaller rate.
BestResponse best_response(const Market& market, ServerId server, double other_price,
                           std::size_t grid_size = kDefaultGrid);

struct SymmetricAlpha {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// The only candidate symmetric Nash price: alpha_1 = -gamma+ * g1'(gamma+),
/// using the derivative of the branch valid on [0, gamma+]. alpha_2 is the
/// mirror for server 2 at its balanced rate lambda - gamma+. The two agree
/// whenever the servers are identical.
SymmetricAlpha symmetric_alpha(const Market& market);

/// The same constants from a central finite difference of g_j with step
/// 1e-6 * lambda. Only meaningful where g_j is differentiable at the
/// balance point (always the case for identical servers).
SymmetricAlpha symmetric_alpha_numeric(const Market& market);

enum class NashVerdict { Confirmed, NecessaryOnlyFailed };

std::string_view to_string(NashVerdict v);

struct SymmetricCheck {
  NashVerdict verdict = NashVerdict::NecessaryOnlyFailed;
  double alpha = 0.0;
  BestResponse reply;  // server 1's best response to c2 = alpha
};

/// Tests whether (alpha1, alpha1) is a fixed point of the best responses.
/// Confirmed iff server 1's reply to alpha1 has |gamma* - gamma+| < tol * lambda
/// and |price* - alpha1| < tol. Throws PreconditionError unless the two
/// servers have identical delay models.
SymmetricCheck check_symmetric_nash(const Market& market, double tol,
                                    std::size_t grid_size = kDefaultGrid);

struct NashOutcome {
  PriceVector prices;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max_j |B_j(c_-j) - c_j| at the returned prices
  std::optional<double> symmetric_alpha;
};

/// Alternating (Gauss-Seidel) best-response iteration
///   c1 <- (1 - w) c1 + w B1(c2),  c2 <- (1 - w) c2 + w B2(c1)
/// with damping w in (0, 1]. Stops once both best-response residuals fall
/// below tol; non-convergence is reported, not thrown.
NashOutcome nash_iterate(const Market& market, PriceVector init, double tol, int max_iter,
                         double damping = 1.0, std::size_t grid_size = kDefaultGrid);

}  // namespace qpk
