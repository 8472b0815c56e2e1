#pragma once

#include <optional>

#include "qpk/models.hpp"

namespace qpk {

enum class ServerId { One = 1, Two = 2 };

constexpr ServerId other(ServerId s) noexcept {
  return s == ServerId::One ? ServerId::Two : ServerId::One;
}

/// Which server the high-sensitivity tail (beta above the threshold) uses.
/// Balanced marks equal prices; the single-threshold convention then sends
/// the tail to server 1, exactly as HighBetaToServer1.
enum class Regime { HighBetaToServer1, HighBetaToServer2, Balanced };

std::string_view to_string(Regime r);

struct PriceVector {
  double c1 = 0.0;
  double c2 = 0.0;

  double gap() const noexcept { return c1 - c2; }
  double of(ServerId s) const noexcept { return s == ServerId::One ? c1 : c2; }
};

/// Equilibrium arrival rates with the threshold that splits customers.
/// gamma2 is always stored as lambda - gamma1.
struct EquilibriumSplit {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double beta1 = 0.0;  // may be +inf when every customer uses one server
  Regime regime = Regime::Balanced;

  double rate(ServerId s) const noexcept { return s == ServerId::One ? gamma1 : gamma2; }
};

struct RevenueRates {
  double r1 = 0.0;
  double r2 = 0.0;
  double total = 0.0;
};

/// The Wardrop equilibrium map of a validated two-server system.
///
/// Construction validates the configuration and locates the balanced load
/// gamma+ once; every other query is a pure function of the stored state.
///
/// Server 1 functions are parameterized by gamma1 and the rival price c2;
/// server 2 mirrors them with gamma2 and c1.
class Market {
 public:
  explicit Market(SystemConfig cfg);

  const SystemConfig& config() const noexcept { return cfg_; }
  double lambda() const noexcept { return cfg_.lambda; }

  /// gamma+, the server-1 rate at which D1(gamma1) = D2(lambda - gamma1).
  double balanced_load() const noexcept { return gamma_plus_; }

  /// beta1(gamma1): F^-1((lambda-gamma1)/lambda) up to and including
  /// gamma+, F^-1(gamma1/lambda) above it. +inf at gamma1 in {0, lambda}
  /// for unbounded laws.
  double threshold_of_rate(double gamma1) const;

  /// g1(gamma1) = beta1(gamma1) * (D2(lambda - gamma1) - D1(gamma1)): the
  /// price gap c1 - c2 that produces gamma1. Strictly decreasing, zero at
  /// gamma+, possibly infinite at the ends of [0, lambda].
  double price_gap_1(double gamma1) const;
  /// g2(gamma2) = beta1(lambda - gamma2) * (D1(lambda - gamma2) - D2(gamma2)).
  double price_gap_2(double gamma2) const;
  double price_gap(ServerId s, double rate) const;

  /// gamma^1(c2): the largest server-1 rate reachable with c1 >= 0.
  double rate_cap_1(double c2) const;
  /// gamma^2(c1), the mirror of rate_cap_1.
  double rate_cap_2(double c1) const;
  double rate_cap(ServerId s, double other_price) const;

  /// c1(gamma1) = c2 + g1(gamma1) on [0, gamma^1(c2)].
  double price_of_rate_1(double c2, double gamma1) const;
  double price_of_rate_2(double c1, double gamma2) const;
  double price_of_rate(ServerId s, double other_price, double rate) const;

  /// Price at and above which server 1 gets no customers. Only exists for
  /// bounded laws with finite g1(0).
  std::optional<double> exclusion_price_1(double c2) const;

  EquilibriumSplit solve(const PriceVector& prices) const;

  /// Server chosen by a customer of sensitivity beta at `split`. A customer
  /// exactly at the threshold goes with the bulk below it.
  ServerId kernel_choice(const EquilibriumSplit& split, double beta) const;

 private:
  void check_rate(double rate, const char* what) const;
  double gap_bracket_lo() const;
  double gap_bracket_hi() const;

  SystemConfig cfg_;
  double gamma_plus_ = 0.0;
};

// Free-function forms; each builds a Market from `cfg`.
double balanced_load(const SystemConfig& cfg);
double threshold_of_rate(const SystemConfig& cfg, double gamma1);
double price_gap_1(const SystemConfig& cfg, double gamma1);
double price_gap_2(const SystemConfig& cfg, double gamma2);
double rate_cap_1(const SystemConfig& cfg, double c2);
double rate_cap_2(const SystemConfig& cfg, double c1);
double price_of_rate_1(const SystemConfig& cfg, double c2, double gamma1);
double price_of_rate_2(const SystemConfig& cfg, double c1, double gamma2);
EquilibriumSplit solve_equilibrium(const SystemConfig& cfg, const PriceVector& prices);
ServerId kernel_choice(const SystemConfig& cfg, const EquilibriumSplit& split, double beta);

RevenueRates revenue_rates(const EquilibriumSplit& split, const PriceVector& prices);

}  // namespace qpk
