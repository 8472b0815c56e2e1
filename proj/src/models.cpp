#include "qpk/models.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qpk/special.hpp"

namespace qpk {

ValidationError::ValidationError(std::vector<std::string> failures)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& f : failures) msg += "\n  - " + f;
        return msg;
      }()),
      failures_(std::move(failures)) {}

// ---------------------------------------------------------------------------
// Delay models
// ---------------------------------------------------------------------------

namespace {

// Per-family evaluation table. Adding a delay family means adding one row
// here plus a constructor.
struct DelayKernel {
  double (*value)(double mu, double rate);
  double (*slope)(double mu, double rate);
  bool bounded_capacity;
};

constexpr DelayKernel kLinearKernel{
    [](double mu, double rate) { return rate / mu; },
    [](double mu, double) { return 1.0 / mu; },
    false,
};

constexpr DelayKernel kMM1Kernel{
    [](double mu, double rate) { return rate >= mu ? kInf : 1.0 / (mu - rate); },
    [](double mu, double rate) {
      return rate >= mu ? kInf : 1.0 / ((mu - rate) * (mu - rate));
    },
    true,
};

const DelayKernel& kernel_of(DelayFamily f) {
  switch (f) {
    case DelayFamily::Linear:
      return kLinearKernel;
    case DelayFamily::MM1:
      return kMM1Kernel;
  }
  return kLinearKernel;
}

void check_rate(const DelayModel& m, double rate, bool saturation, const char* what) {
  if (!(rate >= 0.0)) {
    throw DomainError(fmt::format("{}: rate {} is negative", what, rate));
  }
  if (kernel_of(m.family()).bounded_capacity) {
    const bool ok = saturation ? rate <= m.mu() : rate < m.mu();
    if (!ok) {
      throw DomainError(
          fmt::format("{}: rate {} exceeds M/M/1 capacity mu = {}", what, rate, m.mu()));
    }
  }
}

}  // namespace

std::string_view to_string(DelayFamily f) {
  return f == DelayFamily::Linear ? "linear" : "mm1";
}

DelayModel::DelayModel(DelayFamily family, double mu) : family_(family), mu_(mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError(fmt::format("service rate mu must be positive and finite, got {}", mu));
  }
}

DelayModel DelayModel::linear(double mu) { return {DelayFamily::Linear, mu}; }
DelayModel DelayModel::mm1(double mu) { return {DelayFamily::MM1, mu}; }

double DelayModel::capacity() const noexcept {
  return kernel_of(family_).bounded_capacity ? mu_ : kInf;
}

double delay_eval(const DelayModel& model, double rate, bool saturation) {
  check_rate(model, rate, saturation, "delay_eval");
  return kernel_of(model.family()).value(model.mu(), rate);
}

double delay_deriv(const DelayModel& model, double rate, bool saturation) {
  check_rate(model, rate, saturation, "delay_deriv");
  return kernel_of(model.family()).slope(model.mu(), rate);
}

// ---------------------------------------------------------------------------
// Sensitivity distributions
// ---------------------------------------------------------------------------

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(fmt::format("distribution parameter {} must be positive, got {}", name, v));
  }
}

double gamma_quantile(const GammaLaw& g, double p) {
  // Bracket in units of the scale, then bisect on the CDF. Monotone, so
  // bisection to machine resolution gives well under 1e-10 in probability.
  double lo = 0.0;
  double hi = std::max(1.0, g.k);
  while (special::gamma_p(g.k, hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (special::gamma_p(g.k, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * g.theta;
}

}  // namespace

std::string_view to_string(DistFamily f) {
  switch (f) {
    case DistFamily::Uniform:
      return "uniform";
    case DistFamily::Exponential:
      return "exponential";
    case DistFamily::Gamma:
      return "gamma";
    case DistFamily::Power:
      return "power";
  }
  return "uniform";
}

SensitivityDistribution SensitivityDistribution::uniform(double a, double b) {
  if (!(a >= 0.0) || !std::isfinite(b) || !(b > a)) {
    throw DomainError(fmt::format("uniform law needs 0 <= a < b, got [{}, {}]", a, b));
  }
  return SensitivityDistribution(UniformLaw{a, b});
}

SensitivityDistribution SensitivityDistribution::exponential(double tau) {
  require_positive(tau, "tau");
  return SensitivityDistribution(ExponentialLaw{tau});
}

SensitivityDistribution SensitivityDistribution::gamma(double k, double theta) {
  require_positive(k, "k");
  require_positive(theta, "theta");
  return SensitivityDistribution(GammaLaw{k, theta});
}

SensitivityDistribution SensitivityDistribution::power(double n, double bound) {
  require_positive(n, "n");
  require_positive(bound, "B");
  return SensitivityDistribution(PowerLaw{n, bound});
}

SensitivityDistribution SensitivityDistribution::from_parameters(
    DistFamily family, const std::vector<double>& p) {
  const std::size_t want = family == DistFamily::Exponential ? 1 : 2;
  if (p.size() != want) {
    throw DomainError(fmt::format("{} law takes {} parameter(s), got {}", to_string(family),
                                  want, p.size()));
  }
  switch (family) {
    case DistFamily::Uniform:
      return uniform(p[0], p[1]);
    case DistFamily::Exponential:
      return exponential(p[0]);
    case DistFamily::Gamma:
      return gamma(p[0], p[1]);
    case DistFamily::Power:
      return power(p[0], p[1]);
  }
  throw DomainError("unknown distribution family");
}

DistFamily SensitivityDistribution::family() const noexcept {
  return static_cast<DistFamily>(params_.index());
}

std::vector<double> SensitivityDistribution::parameters() const {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return std::vector<double>{u.a, u.b}; },
                        [](const ExponentialLaw& e) { return std::vector<double>{e.tau}; },
                        [](const GammaLaw& g) { return std::vector<double>{g.k, g.theta}; },
                        [](const PowerLaw& w) { return std::vector<double>{w.n, w.bound}; },
                    },
                    params_);
}

double SensitivityDistribution::lower() const noexcept {
  if (const auto* u = std::get_if<UniformLaw>(&params_)) return u->a;
  return 0.0;
}

double SensitivityDistribution::upper() const noexcept {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return u.b; },
                        [](const ExponentialLaw&) { return kInf; },
                        [](const GammaLaw&) { return kInf; },
                        [](const PowerLaw& w) { return w.bound; },
                    },
                    params_);
}

double SensitivityDistribution::mean() const noexcept {
  return std::visit(overloaded{
                        [](const UniformLaw& u) { return 0.5 * (u.a + u.b); },
                        [](const ExponentialLaw& e) { return e.tau; },
                        [](const GammaLaw& g) { return g.k * g.theta; },
                        [](const PowerLaw& w) { return w.bound * w.n / (w.n + 1.0); },
                    },
                    params_);
}

double SensitivityDistribution::cdf(double x) const {
  if (std::isnan(x) || x < lower()) {
    throw DomainError(fmt::format("cdf: x = {} lies below the support", x));
  }
  return std::visit(overloaded{
                        [x](const UniformLaw& u) {
                          return x >= u.b ? 1.0 : (x - u.a) / (u.b - u.a);
                        },
                        [x](const ExponentialLaw& e) { return -std::expm1(-x / e.tau); },
                        [x](const GammaLaw& g) { return special::gamma_p(g.k, x / g.theta); },
                        [x](const PowerLaw& w) {
                          return x >= w.bound ? 1.0 : std::pow(x / w.bound, w.n);
                        },
                    },
                    params_);
}

double SensitivityDistribution::density(double x) const {
  if (std::isnan(x) || x < lower()) {
    throw DomainError(fmt::format("density: x = {} lies below the support", x));
  }
  return std::visit(
      overloaded{
          [x](const UniformLaw& u) { return x > u.b ? 0.0 : 1.0 / (u.b - u.a); },
          [x](const ExponentialLaw& e) { return std::exp(-x / e.tau) / e.tau; },
          [x](const GammaLaw& g) {
            if (x == 0.0) return g.k < 1.0 ? kInf : (g.k == 1.0 ? 1.0 / g.theta : 0.0);
            return std::exp((g.k - 1.0) * std::log(x / g.theta) - x / g.theta -
                            special::log_gamma(g.k)) /
                   g.theta;
          },
          [x](const PowerLaw& w) {
            if (x > w.bound) return 0.0;
            return w.n / w.bound * std::pow(x / w.bound, w.n - 1.0);
          },
      },
      params_);
}

double SensitivityDistribution::quantile(double p) const {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw DomainError(fmt::format("quantile: p = {} outside [0, 1]", p));
  }
  if (!bounded()) p = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return std::visit(overloaded{
                        [p](const UniformLaw& u) { return u.a + p * (u.b - u.a); },
                        [p](const ExponentialLaw& e) { return -e.tau * std::log1p(-p); },
                        [p](const GammaLaw& g) { return gamma_quantile(g, p); },
                        [p](const PowerLaw& w) { return w.bound * std::pow(p, 1.0 / w.n); },
                    },
                    params_);
}

// ---------------------------------------------------------------------------
// System configuration
// ---------------------------------------------------------------------------

std::vector<std::string> config_violations(const SystemConfig& cfg) {
  std::vector<std::string> out;
  const double lambda = cfg.lambda;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    out.push_back(fmt::format("lambda must be positive and finite (got {})", lambda));
    return out;  // the remaining checks all evaluate delays at lambda
  }

  auto stability = [&](const DelayModel& m, int id) {
    if (m.family() != DelayFamily::MM1) return true;
    if (m.mu() > lambda) return true;
    if (cfg.saturation_ok && m.mu() == lambda) return true;
    out.push_back(fmt::format(
        "server{}: M/M/1 service rate mu = {} must exceed lambda = {}{}", id, m.mu(), lambda,
        m.mu() == lambda ? " (set saturation_ok to allow mu == lambda)" : ""));
    return false;
  };
  const bool stable1 = stability(cfg.server1, 1);
  const bool stable2 = stability(cfg.server2, 2);

  if (stable1 && stable2) {
    const double d1_0 = cfg.delay1(0.0);
    const double d2_0 = cfg.delay2(0.0);
    const double d1_l = cfg.delay1(lambda);
    const double d2_l = cfg.delay2(lambda);
    // Under saturation an infinite delay at lambda is the allowed exception.
    const bool allow_inf = cfg.saturation_ok;
    if (!(d1_0 < d2_l) || (!allow_inf && !std::isfinite(d2_l))) {
      out.push_back(fmt::format("gap condition D1(0) < D2(lambda) < inf fails: {} vs {}",
                                d1_0, d2_l));
    }
    if (!(d2_0 < d1_l) || (!allow_inf && !std::isfinite(d1_l))) {
      out.push_back(fmt::format("gap condition D2(0) < D1(lambda) < inf fails: {} vs {}",
                                d2_0, d1_l));
    }
  }

  if (!(cfg.tol.residual > 0.0)) out.push_back("tolerances.residual must be positive");
  if (!(cfg.tol.argument > 0.0)) out.push_back("tolerances.argument must be positive");
  if (cfg.tol.max_iter < 1) out.push_back("tolerances.max_iter must be at least 1");
  return out;
}

const SystemConfig& validate_config(const SystemConfig& cfg) {
  auto failures = config_violations(cfg);
  if (!failures.empty()) throw ValidationError(std::move(failures));
  return cfg;
}

}  // namespace qpk
