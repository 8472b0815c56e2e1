#include "qpk/duopoly.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qpk/numeric.hpp"

namespace qpk {

BestResponse best_response(const Market& market, ServerId server, double other_price,
                           std::size_t grid_size) {
  if (!(other_price >= 0.0) || !std::isfinite(other_price)) {
    throw DomainError(fmt::format("best_response: rival price {} must be non-negative",
                                  other_price));
  }
  if (grid_size < 64) throw DomainError("best_response: grid_size must be at least 64");

  const double lambda = market.lambda();
  const double cap = market.rate_cap(server, other_price);
  const double lo = lambda * kProbFloor;
  const double hi = cap * (1.0 - kProbFloor);
  auto revenue = [&](double g) { return (market.price_gap(server, g) + other_price) * g; };

  const auto best = numeric::scan_max(revenue, lo, hi, grid_size);

  BestResponse out;
  out.server = server;
  out.given_price = other_price;
  out.rate_cap = cap;
  out.gamma_star = best.x;
  out.price_star = market.price_gap(server, best.x) + other_price;
  out.revenue_star = out.price_star * best.x;
  out.stationary_points = best.local_maxima;
  return out;
}

SymmetricAlpha symmetric_alpha(const Market& market) {
  const auto& cfg = market.config();
  const double lambda = market.lambda();
  const double gp = market.balanced_load();
  // At gamma+ the delay difference vanishes, so only the beta * (delta D)'
  // term of the product rule survives.
  const double beta = market.threshold_of_rate(gp);
  const double slope = cfg.slope1(gp) + cfg.slope2(lambda - gp);
  return {gp * beta * slope, (lambda - gp) * beta * slope};
}

SymmetricAlpha symmetric_alpha_numeric(const Market& market) {
  const double lambda = market.lambda();
  const double gp = market.balanced_load();
  const double h = 1e-6 * lambda;
  auto central = [&](ServerId s, double x) {
    return (market.price_gap(s, x + h) - market.price_gap(s, x - h)) / (2.0 * h);
  };
  return {-gp * central(ServerId::One, gp),
          -(lambda - gp) * central(ServerId::Two, lambda - gp)};
}

std::string_view to_string(NashVerdict v) {
  return v == NashVerdict::Confirmed ? "confirmed" : "necessary_only_failed";
}

SymmetricCheck check_symmetric_nash(const Market& market, double tol, std::size_t grid_size) {
  if (!market.config().identical_servers()) {
    throw PreconditionError("check_symmetric_nash: servers must have identical delay models");
  }
  if (!(tol > 0.0)) throw DomainError("check_symmetric_nash: tol must be positive");
  SymmetricCheck out;
  out.alpha = symmetric_alpha(market).alpha1;
  out.reply = best_response(market, ServerId::One, out.alpha, grid_size);
  const bool rate_ok =
      std::abs(out.reply.gamma_star - market.balanced_load()) < tol * market.lambda();
  const bool price_ok = std::abs(out.reply.price_star - out.alpha) < tol;
  out.verdict = rate_ok && price_ok ? NashVerdict::Confirmed : NashVerdict::NecessaryOnlyFailed;
  return out;
}

NashOutcome nash_iterate(const Market& market, PriceVector init, double tol, int max_iter,
                         double damping, std::size_t grid_size) {
  if (!std::isfinite(init.c1) || !std::isfinite(init.c2)) {
    throw DomainError("nash_iterate: initial prices must be finite");
  }
  if (!(tol > 0.0)) throw DomainError("nash_iterate: tol must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw DomainError("nash_iterate: damping must lie in (0, 1]");
  }

  NashOutcome out;
  out.prices = init;
  if (market.config().identical_servers()) out.symmetric_alpha = symmetric_alpha(market).alpha1;
  if (max_iter <= 0) {
    out.residual = kInf;
    return out;
  }

  auto reply = [&](ServerId s, double other) {
    return best_response(market, s, std::max(0.0, other), grid_size).price_star;
  };

  PriceVector c = init;
  double b1 = reply(ServerId::One, c.c2);
  for (int it = 1; it <= max_iter; ++it) {
    c.c1 += damping * (b1 - c.c1);
    const double b2 = reply(ServerId::Two, c.c1);
    c.c2 += damping * (b2 - c.c2);

    b1 = reply(ServerId::One, c.c2);
    const double r1 = std::abs(b1 - c.c1);
    const double r2 = std::abs(b2 - c.c2);
    out.prices = c;
    out.iterations = it;
    out.residual = std::max(r1, r2);
    if (r1 < tol && r2 < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace qpk
