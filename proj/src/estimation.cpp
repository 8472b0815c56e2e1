#include "qpk/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qpk/numeric.hpp"

namespace qpk {

double infer_threshold(const Measurement& m) {
  const double dd = m.d2 - m.d1;
  if (m.c1 == m.c2 || !(std::abs(dd) >= 1e-12)) {
    throw DegenerateError(fmt::format(
        "infer_threshold: no threshold information at prices ({}, {}) with delay gap {}", m.c1,
        m.c2, dd));
  }
  return (m.c1 - m.c2) / dd;
}

namespace {

bool interior(const Measurement& m) {
  return m.gamma1 > 0.0 && m.gamma1 < m.total_rate();
}

void require_interior(const Measurement& m, const char* what) {
  if (!interior(m)) {
    throw DegenerateError(fmt::format("{}: split at ({}, {}) is not interior (gamma1 = {})", what,
                                      m.c1, m.c2, m.gamma1));
  }
}

// CDF extended by 0 below the support, for fitting.
double cdf_or_zero(const SensitivityDistribution& F, double x) {
  return x < F.lower() ? 0.0 : F.cdf(x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Exponential closed form
// ---------------------------------------------------------------------------

ExponentialFit estimate_exponential(Oracle& oracle, double c1, double c2, double delta) {
  if (!(c1 > c2)) throw DomainError("estimate_exponential: requires c1 > c2");
  if (!(delta > 0.0)) throw DomainError("estimate_exponential: delta must be positive");

  ExponentialFit fit;
  fit.base = oracle.measure(c1, c2);
  fit.stepped = oracle.measure(c1 + delta, c2);
  require_interior(fit.base, "estimate_exponential");
  require_interior(fit.stepped, "estimate_exponential");

  const double lambda = fit.base.total_rate();
  fit.beta_lo = infer_threshold(fit.base);
  fit.beta_hi = infer_threshold(fit.stepped);
  if (!(fit.beta_hi > fit.beta_lo) || !(fit.stepped.gamma1 < fit.base.gamma1) ||
      !(fit.beta_lo > 0.0)) {
    throw DegenerateError("estimate_exponential: price step is not informative");
  }
  fit.mass = (fit.base.gamma1 - fit.stepped.gamma1) / lambda;

  const double lo = fit.beta_lo;
  const double hi = fit.beta_hi;
  const double mass = fit.mass;
  auto residual = [&](double tau) { return std::exp(-lo / tau) - std::exp(-hi / tau) - mass; };

  constexpr double tau_min = 1e-6;
  constexpr double tau_max = 1e6;
  const double peak = std::clamp((hi - lo) / std::log(hi / lo), tau_min, tau_max);
  if (residual(peak) < 0.0) {
    throw NoRootError(fmt::format(
        "estimate_exponential: interval mass {} exceeds every exponential law's mass on "
        "[{}, {}]",
        mass, lo, hi));
  }

  const Tolerances tight{1e-15, 1e-13, 400};
  std::vector<double> roots;
  if (residual(tau_min) < 0.0) roots.push_back(numeric::bisect(residual, tau_min, peak, tight));
  if (residual(tau_max) < 0.0) roots.push_back(numeric::bisect(residual, peak, tau_max, tight));
  if (roots.empty()) {
    throw NoRootError("estimate_exponential: no sign change in [1e-6, 1e6]");
  }

  const double tail = fit.base.gamma1 / lambda;
  fit.tau = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
    return std::abs(std::exp(-lo / a) - tail) < std::abs(std::exp(-lo / b) - tail);
  });
  return fit;
}

// ---------------------------------------------------------------------------
// Parametric least squares
// ---------------------------------------------------------------------------

namespace {

std::size_t parameter_count(DistFamily f) { return f == DistFamily::Exponential ? 1 : 2; }

// Unconstrained coordinates <-> family parameters. Everything is positive,
// so logs are used throughout; the uniform law is (log a, log(b - a)).
std::vector<double> to_params(DistFamily f, const std::vector<double>& u) {
  if (f == DistFamily::Uniform) {
    const double a = std::exp(u[0]);
    return {a, a + std::exp(u[1])};
  }
  std::vector<double> p(u.size());
  std::transform(u.begin(), u.end(), p.begin(), [](double x) { return std::exp(x); });
  return p;
}

std::vector<double> to_coords(DistFamily f, const std::vector<double>& p) {
  if (f == DistFamily::Uniform) return {std::log(p[0]), std::log(p[1] - p[0])};
  std::vector<double> u(p.size());
  std::transform(p.begin(), p.end(), u.begin(), [](double x) { return std::log(x); });
  return u;
}

std::vector<double> initial_params(DistFamily f, double tau0, double beta_first,
                                   double beta_last) {
  switch (f) {
    case DistFamily::Exponential:
      return {tau0};
    case DistFamily::Gamma:
      return {1.0, tau0};
    case DistFamily::Uniform:
      return {0.5 * beta_first, 1.5 * beta_last};
    case DistFamily::Power:
      return {1.0, 1.5 * beta_last};
  }
  return {tau0};
}

}  // namespace

ParametricFit estimate_parametric(Oracle& oracle, DistFamily family, double c2,
                                  const std::vector<double>& prices) {
  const std::size_t k = parameter_count(family);
  if (prices.size() < k + 1) {
    throw DomainError(fmt::format("estimate_parametric: {} law needs at least {} price points",
                                  to_string(family), k + 1));
  }
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > c2)) throw DomainError("estimate_parametric: every price must exceed c2");
    if (i > 0 && !(prices[i] > prices[i - 1])) {
      throw DomainError("estimate_parametric: prices must be strictly increasing");
    }
  }

  ParametricFit fit;
  fit.family = family;
  std::vector<double> beta;
  std::vector<double> gamma;
  for (double c1 : prices) {
    const auto m = oracle.measure(c1, c2);
    require_interior(m, "estimate_parametric");
    fit.measurements.push_back(m);
    beta.push_back(infer_threshold(m));
    gamma.push_back(m.gamma1);
  }
  const double lambda = fit.measurements.front().total_rate();
  for (std::size_t i = 1; i < beta.size(); ++i) {
    if (!(beta[i] > beta[i - 1]) || !(gamma[i] < gamma[i - 1])) {
      throw DegenerateError("estimate_parametric: consecutive price points are not informative");
    }
  }

  auto residuals = [&](const SensitivityDistribution& F) {
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < beta.size(); ++i) {
      r.push_back(cdf_or_zero(F, beta[i + 1]) - cdf_or_zero(F, beta[i]) -
                  (gamma[i] - gamma[i + 1]) / lambda);
    }
    r.push_back(1.0 - cdf_or_zero(F, beta.back()) - gamma.back() / lambda);
    return r;
  };
  auto objective = [&](const std::vector<double>& u) {
    try {
      const auto F = SensitivityDistribution::from_parameters(family, to_params(family, u));
      const auto r = residuals(F);
      return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    } catch (const DomainError&) {
      return kInf;
    }
  };

  const double tau0 = -beta.back() / std::log(gamma.back() / lambda);
  std::vector<double> u = to_coords(family, initial_params(family, tau0, beta.front(), beta.back()));
  double best = objective(u);

  // Hooke-Jeeves pattern search.
  constexpr double min_step = 1e-12;
  constexpr int max_iter = 200000;
  double step = 0.5;
  int it = 0;
  auto explore = [&](std::vector<double> base, double& value) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        auto trial = base;
        trial[i] += dir * step;
        const double v = objective(trial);
        if (v < value) {
          base = std::move(trial);
          value = v;
          break;
        }
      }
    }
    return base;
  };
  while (step > min_step && it < max_iter && best > 0.0) {
    ++it;
    double value = best;
    auto moved = explore(u, value);
    if (value < best) {
      // Pattern move: keep going in the direction that just paid off.
      while (it < max_iter) {
        ++it;
        std::vector<double> leap(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) leap[i] = 2.0 * moved[i] - u[i];
        u = moved;
        best = value;
        double leap_value = objective(leap);
        auto next = explore(leap, leap_value);
        if (!(leap_value < best)) break;
        moved = std::move(next);
        value = leap_value;
      }
    } else {
      step *= 0.5;
    }
  }

  fit.parameters = to_params(family, u);
  fit.residual_norm = std::sqrt(best);
  fit.iterations = it;
  fit.converged = step <= min_step || best == 0.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Piecewise-constant density
// ---------------------------------------------------------------------------

DensityEstimate estimate_density(Oracle& oracle, double c2, double c1_start, double delta,
                                 int steps) {
  if (!(c1_start >= c2)) throw DomainError("estimate_density: requires c1_start >= c2");
  if (!(delta > 0.0)) throw DomainError("estimate_density: delta must be positive");
  if (steps < 1) throw DomainError("estimate_density: steps must be at least 1");

  DensityEstimate est;
  for (int i = 0; i <= steps; ++i) {
    const double c1 = c1_start + i * delta;
    auto m = oracle.measure(c1, c2);
    double beta = kInf;
    try {
      beta = infer_threshold(m);
    } catch (const DegenerateError&) {
      // Both bin ends must come from the same reading, so the probe
      // replaces the uninformative one.
      try {
        const auto probe = oracle.measure(c1 + 1e-4 * delta, c2);
        beta = infer_threshold(probe);
        m = probe;
      } catch (const DegenerateError&) {
        beta = kInf;  // unusable; the adjacent pairs become gaps
      }
    }
    est.log.push_back(m);
    est.thresholds.push_back(beta);
  }

  const double lambda = est.log.front().total_rate();
  for (std::size_t i = 0; i + 1 < est.log.size(); ++i) {
    const double dg = est.log[i].gamma1 - est.log[i + 1].gamma1;
    const double lo = est.thresholds[i];
    const double hi = est.thresholds[i + 1];
    if (!(dg > 1e-12 * lambda) || !std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
      est.gaps.emplace_back(est.log[i].c1, est.log[i + 1].c1);
      continue;
    }
    const DensityBin bin{lo, hi, dg / (lambda * (hi - lo))};
    est.covered_mass += bin.z * (bin.beta_hi - bin.beta_lo);
    est.bins.push_back(bin);
  }
  est.swept_mass = (est.log.front().gamma1 - est.log.back().gamma1) / lambda;
  if (est.bins.empty()) throw DegenerateError("estimate_density: no informative price pair");
  return est;
}

// ---------------------------------------------------------------------------
// Discrete classes
// ---------------------------------------------------------------------------

std::vector<double> DiscreteClasses::closed_rates() const {
  std::vector<double> out;
  for (const auto& c : classes) out.push_back(c.rate);
  if (!out.empty() && !classes.back().resolved) out.back() += residual_rate;
  return out;
}

DiscreteClasses discover_classes(Oracle& oracle, double lambda, double delta, double eps,
                                 double c1_init) {
  if (!(lambda > 0.0)) throw DomainError("discover_classes: lambda must be positive");
  if (!(delta > 0.0)) throw DomainError("discover_classes: delta must be positive");
  if (!(eps > 0.0)) throw DomainError("discover_classes: eps must be positive");
  constexpr double c2 = 0.0;

  const auto first = oracle.measure(c1_init, c2);
  if (first.gamma1 >= eps) {
    throw DomainError(fmt::format(
        "discover_classes: c1_init = {} already attracts gamma1 = {}; start higher", c1_init,
        first.gamma1));
  }

  DiscreteClasses out;
  double plateau = 0.0;  // gamma1 level of the last completed class
  double previous = first.gamma1;
  double latest = first.gamma1;
  bool migrating = false;
  int quiet_steps = 0;

  for (long j = 1;; ++j) {
    const double c1 = c1_init - static_cast<double>(j) * delta;
    if (c1 <= 0.0) break;
    const auto m = oracle.measure(c1, c2);
    latest = m.gamma1;

    if (!migrating) {
      if (m.gamma1 - plateau >= eps) {
        out.classes.push_back({infer_threshold(m), 0.0, false});
        migrating = true;
        quiet_steps = 0;
      }
    } else if (std::abs(m.gamma1 - previous) < eps) {
      if (++quiet_steps >= 2) {
        auto& cls = out.classes.back();
        cls.rate = m.gamma1 - plateau;
        cls.resolved = true;
        plateau = m.gamma1;
        migrating = false;
      }
    } else {
      quiet_steps = 0;
    }
    previous = m.gamma1;
    if (plateau >= lambda - eps) break;
  }

  if (out.classes.empty()) {
    throw DegenerateError("discover_classes: gamma1 never reached eps before c1 <= 0");
  }
  if (migrating) out.classes.back().rate = latest - plateau;

  double seen = 0.0;
  for (const auto& c : out.classes) seen += c.rate;
  out.residual_rate = lambda - seen;
  out.complete = out.residual_rate <= eps;
  if (out.complete) out.classes.back().resolved = true;
  return out;
}

}  // namespace qpk
