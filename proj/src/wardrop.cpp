#include "qpk/wardrop.hpp"

#include <cmath>

#include <fmt/format.h>

#include "qpk/numeric.hpp"

namespace qpk {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::HighBetaToServer1:
      return "high_beta_to_server1";
    case Regime::HighBetaToServer2:
      return "high_beta_to_server2";
    case Regime::Balanced:
      return "balanced";
  }
  return "balanced";
}

Market::Market(SystemConfig cfg) : cfg_(std::move(cfg)) {
  validate_config(cfg_);
  const double lambda = cfg_.lambda;
  // D1(g) - D2(lambda - g) increases strictly from < 0 to > 0.
  auto diff = [&](double g) { return cfg_.delay1(g) - cfg_.delay2(lambda - g); };
  Tolerances tight = cfg_.tol;
  tight.max_iter = std::max(tight.max_iter, 200);
  gamma_plus_ = numeric::bisect(diff, 0.0, lambda, tight);
}

void Market::check_rate(double rate, const char* what) const {
  if (!(rate >= 0.0 && rate <= cfg_.lambda)) {
    throw DomainError(fmt::format("{}: rate {} outside [0, {}]", what, rate, cfg_.lambda));
  }
}

double Market::gap_bracket_lo() const {
  return std::isfinite(price_gap_1(0.0)) ? 0.0 : cfg_.lambda * kProbFloor;
}

double Market::gap_bracket_hi() const {
  return std::isfinite(price_gap_1(cfg_.lambda)) ? cfg_.lambda
                                                 : cfg_.lambda * (1.0 - kProbFloor);
}

double Market::threshold_of_rate(double gamma1) const {
  check_rate(gamma1, "threshold_of_rate");
  const double lambda = cfg_.lambda;
  const double p = gamma1 <= gamma_plus_ ? (lambda - gamma1) / lambda : gamma1 / lambda;
  if (p >= 1.0) return cfg_.beta.upper();
  return cfg_.beta.quantile(p);
}

double Market::price_gap_1(double gamma1) const {
  check_rate(gamma1, "price_gap_1");
  const double delta_d = cfg_.delay2(cfg_.lambda - gamma1) - cfg_.delay1(gamma1);
  if (delta_d == 0.0) return 0.0;
  return threshold_of_rate(gamma1) * delta_d;
}

double Market::price_gap_2(double gamma2) const {
  check_rate(gamma2, "price_gap_2");
  const double gamma1 = cfg_.lambda - gamma2;
  const double delta_d = cfg_.delay1(gamma1) - cfg_.delay2(gamma2);
  if (delta_d == 0.0) return 0.0;
  return threshold_of_rate(gamma1) * delta_d;
}

double Market::price_gap(ServerId s, double rate) const {
  return s == ServerId::One ? price_gap_1(rate) : price_gap_2(rate);
}

double Market::rate_cap_1(double c2) const {
  if (!(c2 >= 0.0)) throw DomainError(fmt::format("rate_cap_1: price {} is negative", c2));
  const double g_end = price_gap_1(cfg_.lambda);
  if (c2 >= -g_end) return cfg_.lambda;
  if (c2 == 0.0) return gamma_plus_;
  const double hi = gap_bracket_hi();
  auto f = [&](double g) { return price_gap_1(g) + c2; };
  if (f(hi) > 0.0) return hi;
  return numeric::bisect(f, gamma_plus_, hi, cfg_.tol, std::max(1.0, c2));
}

double Market::rate_cap_2(double c1) const {
  if (!(c1 >= 0.0)) throw DomainError(fmt::format("rate_cap_2: price {} is negative", c1));
  const double lambda = cfg_.lambda;
  const double g_end = price_gap_2(lambda);
  if (c1 >= -g_end) return lambda;
  const double balance = lambda - gamma_plus_;
  if (c1 == 0.0) return balance;
  const double hi = std::isfinite(g_end) ? lambda : lambda * (1.0 - kProbFloor);
  auto f = [&](double g) { return price_gap_2(g) + c1; };
  if (f(hi) > 0.0) return hi;
  return numeric::bisect(f, balance, hi, cfg_.tol, std::max(1.0, c1));
}

double Market::rate_cap(ServerId s, double other_price) const {
  return s == ServerId::One ? rate_cap_1(other_price) : rate_cap_2(other_price);
}

double Market::price_of_rate(ServerId s, double other_price, double rate) const {
  check_rate(rate, "price_of_rate");
  const double cap = rate_cap(s, other_price);
  if (rate > cap + cfg_.tol.argument) {
    throw DomainError(fmt::format(
        "price_of_rate: rate {} exceeds the cap {} (the price would be negative)", rate, cap));
  }
  const double gap = price_gap(s, rate);
  if (!std::isfinite(gap)) {
    throw DomainError(fmt::format("price_of_rate: price is infinite at rate {}", rate));
  }
  return other_price + gap;
}

double Market::price_of_rate_1(double c2, double gamma1) const {
  return price_of_rate(ServerId::One, c2, gamma1);
}

double Market::price_of_rate_2(double c1, double gamma2) const {
  return price_of_rate(ServerId::Two, c1, gamma2);
}

std::optional<double> Market::exclusion_price_1(double c2) const {
  const double g0 = price_gap_1(0.0);
  if (!cfg_.beta.bounded() || !std::isfinite(g0)) return std::nullopt;
  return c2 + g0;
}

EquilibriumSplit Market::solve(const PriceVector& prices) const {
  const double delta = prices.gap();
  if (!std::isfinite(prices.c1) || !std::isfinite(prices.c2)) {
    throw DomainError("solve_equilibrium: prices must be finite");
  }
  const double lambda = cfg_.lambda;
  auto make = [&](double g1, double beta, Regime regime) {
    return EquilibriumSplit{g1, lambda - g1, beta, regime};
  };

  if (delta == 0.0) return make(gamma_plus_, threshold_of_rate(gamma_plus_), Regime::Balanced);

  if (delta > 0.0) {
    if (delta >= price_gap_1(0.0)) return make(0.0, cfg_.beta.upper(), Regime::HighBetaToServer1);
    const double lo = gap_bracket_lo();
    auto f = [&](double g) { return price_gap_1(g) - delta; };
    const double g1 =
        f(lo) <= 0.0 ? lo : numeric::bisect(f, lo, gamma_plus_, cfg_.tol, std::max(1.0, delta));
    return make(g1, threshold_of_rate(g1), Regime::HighBetaToServer1);
  }

  if (delta <= price_gap_1(lambda)) return make(lambda, cfg_.beta.upper(), Regime::HighBetaToServer2);
  const double hi = gap_bracket_hi();
  auto f = [&](double g) { return price_gap_1(g) - delta; };
  const double g1 =
      f(hi) >= 0.0 ? hi : numeric::bisect(f, gamma_plus_, hi, cfg_.tol, std::max(1.0, -delta));
  return make(g1, threshold_of_rate(g1), Regime::HighBetaToServer2);
}

ServerId Market::kernel_choice(const EquilibriumSplit& split, double beta) const {
  const auto& F = cfg_.beta;
  if (!(beta >= F.lower() && beta <= F.upper())) {
    throw DomainError(fmt::format("kernel_choice: beta {} outside the support", beta));
  }
  const bool above = beta > split.beta1;
  const bool tail_to_one = split.regime != Regime::HighBetaToServer2;
  return above == tail_to_one ? ServerId::One : ServerId::Two;
}

double balanced_load(const SystemConfig& cfg) { return Market(cfg).balanced_load(); }

double threshold_of_rate(const SystemConfig& cfg, double gamma1) {
  return Market(cfg).threshold_of_rate(gamma1);
}

double price_gap_1(const SystemConfig& cfg, double gamma1) {
  return Market(cfg).price_gap_1(gamma1);
}

double price_gap_2(const SystemConfig& cfg, double gamma2) {
  return Market(cfg).price_gap_2(gamma2);
}

double rate_cap_1(const SystemConfig& cfg, double c2) { return Market(cfg).rate_cap_1(c2); }

double rate_cap_2(const SystemConfig& cfg, double c1) { return Market(cfg).rate_cap_2(c1); }

double price_of_rate_1(const SystemConfig& cfg, double c2, double gamma1) {
  return Market(cfg).price_of_rate_1(c2, gamma1);
}

double price_of_rate_2(const SystemConfig& cfg, double c1, double gamma2) {
  return Market(cfg).price_of_rate_2(c1, gamma2);
}

EquilibriumSplit solve_equilibrium(const SystemConfig& cfg, const PriceVector& prices) {
  return Market(cfg).solve(prices);
}

ServerId kernel_choice(const SystemConfig& cfg, const EquilibriumSplit& split, double beta) {
  return Market(cfg).kernel_choice(split, beta);
}

RevenueRates revenue_rates(const EquilibriumSplit& split, const PriceVector& prices) {
  const double r1 = prices.c1 * split.gamma1;
  const double r2 = prices.c2 * split.gamma2;
  return {r1, r2, r1 + r2};
}

}  // namespace qpk
