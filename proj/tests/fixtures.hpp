#pragma once

#include "qpk/models.hpp"

namespace fixtures {

// lambda = 3 against servers of rate 3.3 and 4.
inline qpk::SystemConfig asymmetric(qpk::DelayFamily family, qpk::SensitivityDistribution beta) {
  qpk::SystemConfig cfg;
  cfg.lambda = 3.0;
  const bool linear = family == qpk::DelayFamily::Linear;
  cfg.server1 = linear ? qpk::DelayModel::linear(3.3) : qpk::DelayModel::mm1(3.3);
  cfg.server2 = linear ? qpk::DelayModel::linear(4.0) : qpk::DelayModel::mm1(4.0);
  cfg.beta = beta;
  return cfg;
}

inline qpk::SystemConfig asymmetric_linear(qpk::SensitivityDistribution beta) {
  return asymmetric(qpk::DelayFamily::Linear, beta);
}

inline qpk::SystemConfig asymmetric_mm1(qpk::SensitivityDistribution beta) {
  return asymmetric(qpk::DelayFamily::MM1, beta);
}

// Two Linear(4) servers sharing lambda = 3.
inline qpk::SystemConfig identical_linear(qpk::SensitivityDistribution beta) {
  qpk::SystemConfig cfg;
  cfg.lambda = 3.0;
  cfg.server1 = qpk::DelayModel::linear(4.0);
  cfg.server2 = qpk::DelayModel::linear(4.0);
  cfg.beta = beta;
  return cfg;
}

// Power(2, 4) sensitivities, two M/M/1 servers of rate 5 fed at lambda = 5.
inline qpk::SystemConfig saturated_power() {
  qpk::SystemConfig cfg;
  cfg.lambda = 5.0;
  cfg.server1 = qpk::DelayModel::mm1(5.0);
  cfg.server2 = qpk::DelayModel::mm1(5.0);
  cfg.beta = qpk::SensitivityDistribution::power(2.0, 4.0);
  cfg.saturation_ok = true;
  return cfg;
}

inline qpk::SensitivityDistribution uniform26() { return qpk::SensitivityDistribution::uniform(2, 6); }
inline qpk::SensitivityDistribution exp4() { return qpk::SensitivityDistribution::exponential(4); }
inline qpk::SensitivityDistribution gamma22() { return qpk::SensitivityDistribution::gamma(2, 2); }

}  // namespace fixtures
