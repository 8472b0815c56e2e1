#include "qpk/monopoly.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qpk/numeric.hpp"

namespace qpk {

namespace {

void check_price(double c2) {
  if (!(c2 >= 0.0) || !std::isfinite(c2)) {
    throw DomainError(fmt::format("monopoly: fixed price c2 = {} must be non-negative", c2));
  }
}

}  // namespace

MonopolyResult optimize_monopoly(const Market& market, double c2, std::size_t grid_size,
                                 std::size_t curve_points) {
  check_price(c2);
  if (grid_size < 64) throw DomainError("optimize_monopoly: grid_size must be at least 64");

  const double lambda = market.lambda();
  const double lo = lambda * kProbFloor;
  const double hi = market.balanced_load();
  auto gain = [&](double g) { return market.price_gap_1(g) * g; };

  const auto best = numeric::scan_max(gain, lo, hi, grid_size);

  MonopolyResult out;
  out.gamma1_star = best.x;
  const double gap = market.price_gap_1(best.x);
  out.c1_star = c2 + gap;
  out.rt_star = c2 * lambda + gap * best.x;
  if (curve_points >= 2) out.curve = revenue_curve(market, c2, curve_points);
  return out;
}

MonopolyResult optimize_monopoly(const SystemConfig& cfg, double c2, std::size_t grid_size) {
  return optimize_monopoly(Market(cfg), c2, grid_size);
}

std::vector<CurvePoint> revenue_curve(const Market& market, double c2, std::size_t n) {
  check_price(c2);
  if (n < 2) throw DomainError("revenue_curve: need at least 2 samples");
  const double lambda = market.lambda();
  const auto xs = numeric::linspace(lambda * kProbFloor, market.balanced_load(), n);
  const auto ys = numeric::evaluate(
      [&](double g) { return c2 * lambda + market.price_gap_1(g) * g; }, xs);
  std::vector<CurvePoint> curve(n);
  for (std::size_t i = 0; i < n; ++i) curve[i] = {xs[i], ys[i]};
  return curve;
}

std::vector<CurvePoint> revenue_curve(const SystemConfig& cfg, double c2, std::size_t n) {
  return revenue_curve(Market(cfg), c2, n);
}

}  // namespace qpk
