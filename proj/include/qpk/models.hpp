#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qpk/errors.hpp"

namespace qpk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] whenever a
/// quantile of an unbounded-support law is requested, and rate brackets of
/// the form [lambda * kProbFloor, lambda * (1 - kProbFloor)] are used where
/// a function diverges at the ends of [0, lambda].
inline constexpr double kProbFloor = 1e-12;

// ---------------------------------------------------------------------------
// Delay models
// ---------------------------------------------------------------------------

enum class DelayFamily { Linear, MM1 };

std::string_view to_string(DelayFamily f);

/// Mean delay D(gamma) of one server as a function of its arrival rate.
///
/// Linear:  D(gamma) = gamma / mu
/// MM1:     D(gamma) = 1 / (mu - gamma), defined for gamma < mu
///
/// With `saturation` set, an MM1 model may be evaluated at gamma == mu and
/// returns +inf there.
class DelayModel {
 public:
  static DelayModel linear(double mu);
  static DelayModel mm1(double mu);

  DelayFamily family() const noexcept { return family_; }
  double mu() const noexcept { return mu_; }

  /// Largest rate at which the model is finite (+inf for Linear).
  double capacity() const noexcept;

  friend bool operator==(const DelayModel&, const DelayModel&) = default;

 private:
  DelayModel(DelayFamily family, double mu);

  DelayFamily family_;
  double mu_;
};

double delay_eval(const DelayModel& model, double rate, bool saturation = false);
double delay_deriv(const DelayModel& model, double rate, bool saturation = false);

// ---------------------------------------------------------------------------
// Sensitivity distributions
// ---------------------------------------------------------------------------

enum class DistFamily { Uniform, Exponential, Gamma, Power };

std::string_view to_string(DistFamily f);

struct UniformLaw {
  double a;
  double b;
};
struct ExponentialLaw {
  double tau;  // mean
};
struct GammaLaw {
  double k;      // shape
  double theta;  // scale
};
/// F(x) = (x / bound)^n on [0, bound].
struct PowerLaw {
  double n;
  double bound;
};

/// Law F of the per-customer delay sensitivity beta.
class SensitivityDistribution {
 public:
  using Params = std::variant<UniformLaw, ExponentialLaw, GammaLaw, PowerLaw>;

  static SensitivityDistribution uniform(double a, double b);
  static SensitivityDistribution exponential(double tau);
  static SensitivityDistribution gamma(double k, double theta);
  static SensitivityDistribution power(double n, double bound);

  /// Builds a law from its family and the parameter vector returned by
  /// parameters(). Throws DomainError on invalid values.
  static SensitivityDistribution from_parameters(DistFamily family,
                                                 const std::vector<double>& p);

  DistFamily family() const noexcept;
  const Params& params() const noexcept { return params_; }
  std::vector<double> parameters() const;

  double lower() const noexcept;
  /// Upper end of the support; +inf for exponential and gamma laws.
  double upper() const noexcept;
  bool bounded() const noexcept { return upper() < kInf; }
  double mean() const noexcept;

  double cdf(double x) const;
  double density(double x) const;
  double quantile(double p) const;

 private:
  explicit SensitivityDistribution(Params p) : params_(p) {}

  Params params_;
};

// ---------------------------------------------------------------------------
// System configuration
// ---------------------------------------------------------------------------

/// Root-finding controls shared by every solver.
struct Tolerances {
  double residual = 1e-10;
  double argument = 1e-12;
  int max_iter = 200;
};

struct SystemConfig {
  double lambda = 0.0;
  DelayModel server1 = DelayModel::linear(1.0);
  DelayModel server2 = DelayModel::linear(1.0);
  SensitivityDistribution beta = SensitivityDistribution::uniform(0.0, 1.0);
  bool saturation_ok = false;
  Tolerances tol{};

  double delay1(double rate) const { return delay_eval(server1, rate, saturation_ok); }
  double delay2(double rate) const { return delay_eval(server2, rate, saturation_ok); }
  double slope1(double rate) const { return delay_deriv(server1, rate, saturation_ok); }
  double slope2(double rate) const { return delay_deriv(server2, rate, saturation_ok); }

  bool identical_servers() const noexcept { return server1 == server2; }
};

/// Every violated regularity condition, in a stable order. Empty if valid.
std::vector<std::string> config_violations(const SystemConfig& cfg);

/// Returns `cfg` unchanged when it is valid, else throws ValidationError
/// listing every violated condition.
const SystemConfig& validate_config(const SystemConfig& cfg);

}  // namespace qpk
