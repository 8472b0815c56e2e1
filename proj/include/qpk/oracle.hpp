#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "qpk/rng.hpp"
#include "qpk/wardrop.hpp"

namespace qpk {

/// One observation of the system after announcing prices (c1, c2): the
/// equilibrium rates and the mean delays each server measures.
struct Measurement {
  double c1 = 0.0;
  double c2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  double total_rate() const noexcept { return gamma1 + gamma2; }
};

/// Anything that maps a price pair to a Measurement. Estimators only see
/// this interface. Implementations are deterministic given their seed but
/// may keep state between calls, so one instance must not be shared
/// across threads.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Measurement measure(double c1, double c2) = 0;
};

/// Analytic equilibrium of a continuous-sensitivity system.
class ExactOracle final : public Oracle {
 public:
  explicit ExactOracle(SystemConfig cfg) : market_(std::move(cfg)) {}
  explicit ExactOracle(Market market) : market_(std::move(market)) {}

  Measurement measure(double c1, double c2) override;
  const Market& market() const noexcept { return market_; }

 private:
  Market market_;
};

/// Wraps another oracle and perturbs its readings: gamma1, d1 and d2 are
/// each multiplied by an independent mean-one lognormal factor
/// exp(sigma * Z - sigma^2 / 2), then gamma2 is reset to lambda - gamma1.
class NoisyOracle final : public Oracle {
 public:
  NoisyOracle(std::unique_ptr<Oracle> inner, double sigma_rel, std::uint64_t seed);

  Measurement measure(double c1, double c2) override;

 private:
  std::unique_ptr<Oracle> inner_;
  double sigma_;
  CounterRng rng_;
};

/// Discrete-event simulation of two FCFS single-server queues with
/// exponential service at rates mu1, mu2. Poisson(lambda) arrivals carry a
/// sensitivity drawn from F and are routed by the analytic threshold
/// kernel at the queried prices. Rates and mean sojourn times are averaged
/// over [0.1 * horizon, horizon].
///
/// Each measure() call runs an independent replication whose random stream
/// is keyed by (seed, c1, c2), so results do not depend on call order.
class SimulationOracle final : public Oracle {
 public:
  SimulationOracle(SystemConfig cfg, double horizon, std::uint64_t seed);

  Measurement measure(double c1, double c2) override;

  const Market& market() const noexcept { return market_; }
  double horizon() const noexcept { return horizon_; }
  double warmup() const noexcept { return 0.1 * horizon_; }
  /// Length of the averaging window, horizon - warmup.
  double window() const noexcept { return horizon_ - warmup(); }

 private:
  Market market_;
  double horizon_;
  std::uint64_t seed_;
};

/// A customer class with a common delay sensitivity.
struct CustomerClass {
  double beta = 0.0;
  double rate = 0.0;
};

/// Exact Wardrop equilibrium when sensitivities take finitely many values.
/// Total arrival rate is the sum of the class rates.
class DiscreteClassOracle final : public Oracle {
 public:
  DiscreteClassOracle(DelayModel server1, DelayModel server2, std::vector<CustomerClass> classes,
                      bool saturation_ok = false);

  Measurement measure(double c1, double c2) override;

  double lambda() const noexcept { return lambda_; }
  double balanced_load() const noexcept { return gamma_plus_; }
  /// Classes sorted by decreasing beta.
  const std::vector<CustomerClass>& classes() const noexcept { return classes_; }

 private:
  double delay(int server, double rate) const;
  /// Rate on the premium (pricier) server when its price exceeds the
  /// other's by `gap` > 0.
  double premium_rate(int premium, double gap) const;

  DelayModel server1_;
  DelayModel server2_;
  std::vector<CustomerClass> classes_;
  bool saturation_;
  double lambda_ = 0.0;
  double gamma_plus_ = 0.0;
};

}  // namespace qpk
