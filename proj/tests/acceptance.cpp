// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "qpk/duopoly.hpp"
#include "qpk/estimation.hpp"
#include "qpk/monopoly.hpp"
#include "qpk/oracle.hpp"

using namespace qpk;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
    notes_.push_back(fmt::format("    {} {}", ok ? "ok  " : "FAIL", what));
  }

  bool report() const {
    const bool ok = failures_.empty();
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id_, title_.c_str());
    for (const auto& n : notes_) std::printf("%s\n", n.c_str());
    std::fflush(stdout);
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MonopolyTarget {
  const char* name;
  SensitivityDistribution law;
  double gamma1;
  double c1;
  double rt;
};

void monopoly_rows(Criterion& c, DelayFamily family, const std::vector<MonopolyTarget>& rows) {
  for (const auto& row : rows) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = optimize_monopoly(fixtures::asymmetric(family, row.law), 1.0);
    const double dt = seconds_since(t0);
    c.expect(std::abs(r.gamma1_star - row.gamma1) <= 0.01 &&
                 std::abs(r.c1_star - row.c1) <= 0.05 && std::abs(r.rt_star - row.rt) <= 0.01,
             fmt::format("{}: (gamma1*, c1*, RT*) = ({:.4f}, {:.4f}, {:.4f}) vs ({}, {}, {})",
                         row.name, r.gamma1_star, r.c1_star, r.rt_star, row.gamma1, row.c1, row.rt));
    c.expect(dt < 1.0, fmt::format("{}: runtime {:.3f} s < 1 s", row.name, dt));
  }
}

bool criterion1() {
  Criterion c(1, "monopoly optimum, linear delays (lambda=3, mu=3.3/4, c2=1)");
  monopoly_rows(c, DelayFamily::Linear,
                {{"Uniform(2,6)", fixtures::uniform26(), 0.62, 3.106, 4.306},
                 {"Exponential(4)", fixtures::exp4(), 0.44, 4.89, 4.712},
                 {"Gamma(2,2)", fixtures::gamma22(), 0.51, 4.0, 4.532}});
  return c.report();
}

bool criterion2() {
  Criterion c(2, "monopoly optimum, M/M/1 delays (lambda=3, mu=3.3/4, c2=1)");
  monopoly_rows(c, DelayFamily::MM1,
                {{"Uniform(2,6)", fixtures::uniform26(), 0.48, 2.72, 3.83},
                 {"Exponential(4)", fixtures::exp4(), 0.33, 4.67, 4.21},
                 {"Gamma(2,2)", fixtures::gamma22(), 0.38, 3.74, 4.04}});
  return c.report();
}

bool criterion3() {
  Criterion c(3, "symmetric Nash confirmed, identical Linear(4), Uniform(2,6)");
  const Market m(fixtures::identical_linear(fixtures::uniform26()));
  const auto a = symmetric_alpha(m);
  c.expect(std::abs(a.alpha1 - 3) < 1e-6 && std::abs(a.alpha2 - 3) < 1e-6,
           fmt::format("alpha = ({:.10f}, {:.10f})", a.alpha1, a.alpha2));
  const auto check = check_symmetric_nash(m, 0.01);
  c.expect(check.verdict == NashVerdict::Confirmed,
           fmt::format("verdict {}", to_string(check.verdict)));
  const auto nash = nash_iterate(m, {1, 1}, 1e-6, 200);
  c.expect(nash.converged && std::abs(nash.prices.c1 - 3) < 1e-4 &&
               std::abs(nash.prices.c2 - 3) < 1e-4,
           fmt::format("iteration from (1,1) -> ({:.6f}, {:.6f}) in {} steps, converged={}",
                       nash.prices.c1, nash.prices.c2, nash.iterations, nash.converged));
  return c.report();
}

bool criterion4() {
  Criterion c(4, "symmetric candidate rejected, identical Linear(4), Exponential(4)");
  const Market m(fixtures::identical_linear(fixtures::exp4()));
  const double closed_form = 1.5 * 4 * std::log(2.0) * 0.5;
  const auto a = symmetric_alpha(m);
  c.expect(std::abs(a.alpha1 - closed_form) < 1e-3 && std::abs(a.alpha1 - 2.0794) < 1e-3,
           fmt::format("alpha1 = {:.7f} (closed form {:.7f})", a.alpha1, closed_form));
  const auto check = check_symmetric_nash(m, 0.01);
  const double miss = std::abs(check.reply.gamma_star - m.balanced_load());
  c.expect(check.verdict == NashVerdict::NecessaryOnlyFailed,
           fmt::format("verdict {}", to_string(check.verdict)));
  c.expect(miss > 0.01 * m.lambda(),
           fmt::format("reply rate {:.4f} vs gamma+ {:.4f} (|diff| {:.4f} > {:.2f})",
                       check.reply.gamma_star, m.balanced_load(), miss, 0.01 * m.lambda()));
  return c.report();
}

bool criterion5() {
  Criterion c(5, "density sweep, Power(2,4), MM1(5)/MM1(5) saturated, lambda=5, c2=5");
  ExactOracle oracle(fixtures::saturated_power());
  auto midpoint_error = [](const DensityEstimate& est) {
    double worst = 0.0;
    for (const auto& b : est.bins) {
      worst = std::max(worst, std::abs(b.z - 0.5 * (b.beta_lo + b.beta_hi) / 8.0));
    }
    return worst;
  };

  const auto est = estimate_density(oracle, 5.0, 5.0, 0.2, 9);
  std::string zs;
  bool within = true;
  bool corridor = true;
  for (const auto& b : est.bins) {
    zs += fmt::format(" {:.3f}", b.z);
    within = within && std::abs(b.z - 0.5 * (b.beta_lo + b.beta_hi) / 8.0) <= 0.05;
    corridor = corridor && b.z >= 0.37 - 0.03 && b.z <= 0.47 + 0.03;
  }
  c.expect(est.bins.size() == 9, fmt::format("{} bins, z ={}", est.bins.size(), zs));
  c.expect(within, fmt::format("every z within 0.05 of x/8 at the bin midpoint (max error {:.2e})",
                               midpoint_error(est)));
  c.expect(std::abs(est.covered_mass - est.swept_mass) < 1e-9,
           fmt::format("covered mass {:.12f} vs swept mass {:.12f}", est.covered_mass,
                       est.swept_mass));
  c.expect(corridor, "every z inside the corridor [0.34, 0.50]");

  const double e1 = midpoint_error(est);
  const double e2 = midpoint_error(estimate_density(oracle, 5.0, 5.0, 0.1, 18));
  const double e3 = midpoint_error(estimate_density(oracle, 5.0, 5.0, 0.05, 36));
  c.expect(e2 < e1 && e3 < e2,
           fmt::format("max midpoint error strictly falls as delta halves: {:.2e}, {:.2e}, {:.2e}"
                       " (a linear density has zero discretization error, so these are round-off)",
                       e1, e2, e3));
  return c.report();
}

bool criterion6() {
  Criterion c(6, "parametric recovery on exact-oracle data");
  {
    ExactOracle o(fixtures::asymmetric_linear(fixtures::exp4()));
    const double tau = estimate_exponential(o, 3.0, 1.0, 0.2).tau;
    c.expect(std::abs(tau - 4) <= 0.01 * 4, fmt::format("Exponential(4): tau = {:.8f}", tau));
  }
  {
    ExactOracle o(fixtures::asymmetric_linear(SensitivityDistribution::exponential(20)));
    const double tau = estimate_exponential(o, 3.0, 1.0, 0.2).tau;
    c.expect(std::abs(tau - 20) <= 0.01 * 20, fmt::format("Exponential(20): tau = {:.8f}", tau));
  }
  {
    ExactOracle o(fixtures::asymmetric_linear(fixtures::uniform26()));
    const auto p = estimate_parametric(o, DistFamily::Uniform, 1.0, {2.0, 3.0, 4.0}).parameters;
    c.expect(std::abs(p[0] - 2) <= 0.05 && std::abs(p[1] - 6) <= 0.05,
             fmt::format("Uniform(2,6): ({:.6f}, {:.6f})", p[0], p[1]));
  }
  {
    ExactOracle o(fixtures::asymmetric_linear(fixtures::gamma22()));
    const auto p = estimate_parametric(o, DistFamily::Gamma, 1.0, {2.0, 3.0, 4.0, 5.0}).parameters;
    c.expect(std::abs(p[0] - 2) <= 0.05 && std::abs(p[1] - 2) <= 0.05,
             fmt::format("Gamma(2,2): ({:.6f}, {:.6f})", p[0], p[1]));
  }
  return c.report();
}

bool criterion7() {
  Criterion c(7, "discrete classes {(4,1),(2,1.5)}, MM1(4)/MM1(4), delta=0.01");
  DiscreteClassOracle o(DelayModel::mm1(4), DelayModel::mm1(4), {{4, 1}, {2, 1.5}});
  const double lambda = o.lambda();
  const auto r = discover_classes(o, lambda, 0.01, 1e-3 * lambda, 2.0);
  const auto rates = r.closed_rates();
  c.expect(r.classes.size() == 2, fmt::format("{} classes found", r.classes.size()));
  if (r.classes.size() == 2) {
    c.expect(std::abs(r.classes[0].beta - 4) <= 0.05 && std::abs(r.classes[1].beta - 2) <= 0.05,
             fmt::format("beta = ({:.4f}, {:.4f})", r.classes[0].beta, r.classes[1].beta));
    c.expect(std::abs(rates[0] - 1) <= 0.005 && std::abs(rates[1] - 1.5) <= 0.005,
             fmt::format("lambda = ({:.5f}, {:.5f}); last class observed {:.5f} + residual {:.5f}",
                         rates[0], rates[1], r.classes[1].rate, r.residual_rate));
  }
  const double seen = std::accumulate(r.classes.begin(), r.classes.end(), 0.0,
                                      [](double s, const DiscoveredClass& k) { return s + k.rate; });
  c.expect(r.complete == (seen >= lambda - 1e-3 * lambda),
           fmt::format("complete={} with observed mass {:.5f} of {}", r.complete, seen, lambda));
  return c.report();
}

SystemConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    SystemConfig cfg;
    cfg.lambda = 1.0 + 4.0 * u(rng);
    auto model = [&] {
      const double mu = cfg.lambda * (1.05 + 2.0 * u(rng));
      return rng() % 2 ? DelayModel::linear(mu) : DelayModel::mm1(mu);
    };
    cfg.server1 = model();
    cfg.server2 = model();
    const double p = 0.5 + 5.0 * u(rng);
    const double q = 0.5 + 5.0 * u(rng);
    switch (rng() % 4) {
      case 0: cfg.beta = SensitivityDistribution::uniform(p, p + q); break;
      case 1: cfg.beta = SensitivityDistribution::exponential(p); break;
      case 2: cfg.beta = SensitivityDistribution::gamma(p, q); break;
      default: cfg.beta = SensitivityDistribution::power(p, q); break;
    }
    if (config_violations(cfg).empty()) return cfg;
  }
}

bool criterion8() {
  Criterion c(8, "property suites");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int wrong = 0;
  for (int i = 0; i < 500; ++i) {
    const Market m(random_config(rng));
    const PriceVector p{10 * unit(rng), 10 * unit(rng)};
    const double g = m.solve(p).gamma1;
    const bool below = g <= m.balanced_load() + 1e-9;
    wrong += (p.c1 >= p.c2) != below;
  }
  c.expect(wrong == 0, fmt::format("gamma1 <= gamma+ iff c1 >= c2: {} violations in 500", wrong));

  const std::vector<SystemConfig> fixed = {
      fixtures::asymmetric_linear(fixtures::uniform26()), fixtures::asymmetric_mm1(fixtures::exp4()),
      fixtures::asymmetric_mm1(fixtures::gamma22()), fixtures::saturated_power()};
  bool monotone = true;
  double zero = 0.0;
  for (const auto& cfg : fixed) {
    const Market m(cfg);
    const double eps = 1e-6 * cfg.lambda;
    double p1 = kInf;
    double p2 = kInf;
    for (int i = 0; i < 10000; ++i) {
      const double g = eps + (cfg.lambda - 2 * eps) * i / 9999.0;
      const double a = m.price_gap_1(g);
      const double b = m.price_gap_2(g);
      monotone = monotone && a < p1 && b < p2;
      p1 = a;
      p2 = b;
    }
    zero = std::max(zero, std::abs(m.price_gap_1(m.balanced_load())));
  }
  c.expect(monotone && zero < 1e-9,
           fmt::format("g1, g2 strictly decreasing on 10^4-point grids; max |g1(gamma+)| = {:.1e}", zero));

  double round_trip = 0.0;
  for (const auto& cfg : fixed) {
    const Market m(cfg);
    for (double c2 : {0.0, 1.0, 4.0}) {
      const double cap = m.rate_cap_1(c2);
      for (int i = 1; i < 100; ++i) {
        const double g = cap * i / 100.0;
        round_trip = std::max(round_trip, std::abs(m.solve({m.price_of_rate_1(c2, g), c2}).gamma1 - g));
      }
    }
  }
  c.expect(round_trip < 1e-6, fmt::format("price/rate round trip max error {:.1e}", round_trip));

  double regret = 0.0;
  for (int trial = 0; trial < 100;) {
    const auto cfg = random_config(rng);
    const Market m(cfg);
    const PriceVector p{6 * unit(rng), 6 * unit(rng)};
    const auto s = m.solve(p);
    if (!(s.gamma1 > 0 && s.gamma1 < cfg.lambda)) continue;
    ++trial;
    const double f1 = cfg.beta.cdf(s.beta1);
    for (int k = 0; k < 200; ++k) {
      const double u = k % 2 ? f1 * unit(rng) : f1 + (1 - f1) * unit(rng);
      const double beta = cfg.beta.quantile(std::clamp(u, 1e-9, 1 - 1e-9));
      const double cost1 = p.c1 + beta * cfg.delay1(s.gamma1);
      const double cost2 = p.c2 + beta * cfg.delay2(s.gamma2);
      const bool one = m.kernel_choice(s, beta) == ServerId::One;
      regret = std::max(regret, one ? cost1 - cost2 : cost2 - cost1);
    }
  }
  c.expect(regret <= 1e-8, fmt::format("Wardrop no-regret: worst excess cost {:.1e}", regret));

  double alpha_gap = 0.0;
  for (const auto& F : {fixtures::uniform26(), fixtures::exp4(), fixtures::gamma22(),
                        SensitivityDistribution::power(2, 4)}) {
    for (double mu : {3.5, 4.0, 7.0}) {
      auto cfg = fixtures::identical_linear(F);
      cfg.server1 = cfg.server2 = DelayModel::mm1(mu);
      const auto a = symmetric_alpha(Market(cfg));
      alpha_gap = std::max(alpha_gap, std::abs(a.alpha1 - a.alpha2));
      const auto b = symmetric_alpha(Market(fixtures::identical_linear(F)));
      alpha_gap = std::max(alpha_gap, std::abs(b.alpha1 - b.alpha2));
    }
  }
  c.expect(alpha_gap < 1e-9, fmt::format("alpha1 = alpha2 on identical servers: max gap {:.1e}", alpha_gap));

  const auto des_cfg = fixtures::asymmetric_mm1(fixtures::uniform26());
  const double truth = ExactOracle(des_cfg).measure(3, 1).gamma1;
  std::vector<double> xs;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    xs.push_back(SimulationOracle(des_cfg, 2e4, seed).measure(3, 1).gamma1);
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (xs.size() - 1) / xs.size());
  c.expect(std::abs(mean - truth) < 2 * se,
           fmt::format("simulated gamma1 over 20 seeds: mean {:.5f} vs {:.5f}, 2 SE = {:.5f}", mean,
                       truth, 2 * se));

  const double dt = seconds_since(t0);
  c.expect(dt < 60.0, fmt::format("property runtime {:.2f} s < 60 s", dt));
  return c.report();
}

}  // namespace

int main() {
  int failed = 0;
  for (auto* criterion : {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
                          criterion7, criterion8}) {
    try {
      failed += criterion() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failed;
    }
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
