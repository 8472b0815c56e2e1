#include "qpk/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "qpk/numeric.hpp"

namespace qpk {

// ---------------------------------------------------------------------------
// ExactOracle
// ---------------------------------------------------------------------------

Measurement ExactOracle::measure(double c1, double c2) {
  const auto split = market_.solve({c1, c2});
  const auto& cfg = market_.config();
  return {c1, c2, split.gamma1, split.gamma2, cfg.delay1(split.gamma1), cfg.delay2(split.gamma2)};
}

// ---------------------------------------------------------------------------
// NoisyOracle
// ---------------------------------------------------------------------------

NoisyOracle::NoisyOracle(std::unique_ptr<Oracle> inner, double sigma_rel, std::uint64_t seed)
    : inner_(std::move(inner)), sigma_(sigma_rel), rng_(seed) {
  if (!inner_) throw DomainError("NoisyOracle: inner oracle is null");
  if (!(sigma_rel >= 0.0) || !std::isfinite(sigma_rel)) {
    throw DomainError("NoisyOracle: relative noise must be non-negative");
  }
}

Measurement NoisyOracle::measure(double c1, double c2) {
  Measurement m = inner_->measure(c1, c2);
  const double lambda = m.total_rate();
  auto factor = [&] { return std::exp(sigma_ * rng_.normal() - 0.5 * sigma_ * sigma_); };
  const double f_rate = factor();
  const double f_d1 = factor();
  const double f_d2 = factor();
  m.gamma1 = std::clamp(m.gamma1 * f_rate, 0.0, lambda);
  m.gamma2 = lambda - m.gamma1;
  m.d1 *= f_d1;
  m.d2 *= f_d2;
  return m;
}

// ---------------------------------------------------------------------------
// SimulationOracle
// ---------------------------------------------------------------------------

SimulationOracle::SimulationOracle(SystemConfig cfg, double horizon, std::uint64_t seed)
    : market_(std::move(cfg)), horizon_(horizon), seed_(seed) {
  const auto& c = market_.config();
  if (c.server1.family() != DelayFamily::MM1 || c.server2.family() != DelayFamily::MM1) {
    throw PreconditionError("SimulationOracle: both servers must use M/M/1 delay models");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("SimulationOracle: horizon must be positive");
  }
}

Measurement SimulationOracle::measure(double c1, double c2) {
  const auto& cfg = market_.config();
  const auto split = market_.solve({c1, c2});
  const double mu[2] = {cfg.server1.mu(), cfg.server2.mu()};
  if (!(split.gamma1 < mu[0]) || !(split.gamma2 < mu[1])) {
    throw StabilityError(fmt::format(
        "SimulationOracle: split ({}, {}) is unstable for service rates ({}, {})", split.gamma1,
        split.gamma2, mu[0], mu[1]));
  }

  // A customer of sensitivity beta = F^-1(u) lies above the threshold iff
  // u > F(beta1), so routing compares the uniform draw directly.
  const double above_mass = std::isinf(split.beta1) ? 1.0 : cfg.beta.cdf(split.beta1);
  const bool tail_to_one = split.regime != Regime::HighBetaToServer2;

  CounterRng rng(seed_ ^ mix64(std::bit_cast<std::uint64_t>(c1)) ^
                 mix64(mix64(std::bit_cast<std::uint64_t>(c2))));
  const double warm = warmup();
  double t = 0.0;
  double last_departure[2] = {0.0, 0.0};
  long count[2] = {0, 0};
  double sojourn[2] = {0.0, 0.0};

  while (true) {
    t += rng.exponential(cfg.lambda);
    if (t > horizon_) break;
    const bool above = rng.uniform() > above_mass;
    const int q = (above == tail_to_one) ? 0 : 1;
    const double start = std::max(t, last_departure[q]);
    const double departure = start + rng.exponential(mu[q]);
    last_departure[q] = departure;
    if (t >= warm) {
      ++count[q];
      sojourn[q] += departure - t;
    }
  }

  if (count[0] + count[1] == 0) {
    throw InsufficientDataError("SimulationOracle: no arrivals in the averaging window");
  }
  const double window_len = window();
  Measurement m{c1, c2, count[0] / window_len, count[1] / window_len, 0.0, 0.0};
  // An idle queue reports the sojourn an arrival would see at zero load.
  m.d1 = count[0] > 0 ? sojourn[0] / count[0] : 1.0 / mu[0];
  m.d2 = count[1] > 0 ? sojourn[1] / count[1] : 1.0 / mu[1];
  return m;
}

// ---------------------------------------------------------------------------
// DiscreteClassOracle
// ---------------------------------------------------------------------------

DiscreteClassOracle::DiscreteClassOracle(DelayModel server1, DelayModel server2,
                                         std::vector<CustomerClass> classes, bool saturation_ok)
    : server1_(server1), server2_(server2), classes_(std::move(classes)),
      saturation_(saturation_ok) {
  if (classes_.empty()) throw DomainError("DiscreteClassOracle: need at least one class");
  for (const auto& c : classes_) {
    if (!(c.beta > 0.0) || !(c.rate > 0.0) || !std::isfinite(c.beta) || !std::isfinite(c.rate)) {
      throw DomainError("DiscreteClassOracle: class beta and rate must be positive");
    }
    lambda_ += c.rate;
  }
  std::sort(classes_.begin(), classes_.end(),
            [](const CustomerClass& a, const CustomerClass& b) { return a.beta > b.beta; });
  for (std::size_t i = 1; i < classes_.size(); ++i) {
    if (classes_[i].beta == classes_[i - 1].beta) {
      throw DomainError("DiscreteClassOracle: class sensitivities must be distinct");
    }
  }

  // Reuse the continuous-model validation for stability and gap conditions.
  SystemConfig probe;
  probe.lambda = lambda_;
  probe.server1 = server1_;
  probe.server2 = server2_;
  probe.saturation_ok = saturation_;
  validate_config(probe);

  auto diff = [&](double g) { return delay(0, g) - delay(1, lambda_ - g); };
  gamma_plus_ = numeric::bisect(diff, 0.0, lambda_, Tolerances{1e-14, 1e-15, 300});
}

double DiscreteClassOracle::delay(int server, double rate) const {
  return delay_eval(server == 0 ? server1_ : server2_, rate, saturation_);
}

double DiscreteClassOracle::premium_rate(int premium, double gap) const {
  const int budget = 1 - premium;
  auto delta_d = [&](double g) { return delay(budget, lambda_ - g) - delay(premium, g); };
  // Sensitivity of the marginal customer when the premium server carries
  // rate g: the class holding position g in decreasing-beta order.
  auto marginal_beta = [&](double g) {
    double cum = 0.0;
    for (const auto& c : classes_) {
      cum += c.rate;
      if (g <= cum) return c.beta;
    }
    return classes_.back().beta;
  };
  // The marginal customer still strictly prefers the premium server.
  auto wants_more = [&](double g) { return marginal_beta(g) * delta_d(g) > gap; };

  const double balance = premium == 0 ? gamma_plus_ : lambda_ - gamma_plus_;
  double lo = 0.0;
  double hi = balance;
  if (!wants_more(std::nextafter(0.0, 1.0))) return 0.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (wants_more(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Measurement DiscreteClassOracle::measure(double c1, double c2) {
  if (!std::isfinite(c1) || !std::isfinite(c2)) {
    throw DomainError("DiscreteClassOracle: prices must be finite");
  }
  const double gap = c1 - c2;
  double g1 = gamma_plus_;
  if (gap > 0.0) {
    g1 = premium_rate(0, gap);
  } else if (gap < 0.0) {
    g1 = lambda_ - premium_rate(1, -gap);
  }
  const double g2 = lambda_ - g1;
  return {c1, c2, g1, g2, delay(0, g1), delay(1, g2)};
}

}  // namespace qpk
