#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "qpk/duopoly.hpp"

using namespace qpk;
using doctest::Approx;

TEST_CASE("best response on identical linear servers with uniform sensitivities") {
  const Market m(fixtures::identical_linear(fixtures::uniform26()));
  const auto r = best_response(m, ServerId::One, 3.0);
  CHECK(r.gamma_star == Approx(1.5).epsilon(1e-4));
  CHECK(r.price_star == Approx(3.0).epsilon(1e-4));
  CHECK(r.revenue_star == Approx(4.5).epsilon(1e-4));
}

TEST_CASE("best response against a free rival") {
  for (const auto& cfg : {fixtures::identical_linear(fixtures::uniform26()),
                          fixtures::asymmetric_mm1(fixtures::exp4())}) {
    const Market m(cfg);
    const auto r = best_response(m, ServerId::One, 0.0);
    CHECK(r.gamma_star > 0.0);
    CHECK(r.gamma_star < m.balanced_load());
    CHECK(r.revenue_star > 0.0);
  }
  CHECK_THROWS_AS(best_response(Market(fixtures::identical_linear(fixtures::exp4())),
                                ServerId::Two, -1.0),
                  DomainError);
}

TEST_CASE("symmetric alpha") {
  const auto u = symmetric_alpha(Market(fixtures::identical_linear(fixtures::uniform26())));
  CHECK(u.alpha1 == Approx(3.0).epsilon(1e-9));
  CHECK(u.alpha2 == Approx(3.0).epsilon(1e-9));

  // 1.5 * beta1(1.5) * (1/4 + 1/4) with beta1(1.5) = 4 ln 2.
  const auto e = symmetric_alpha(Market(fixtures::identical_linear(fixtures::exp4())));
  CHECK(e.alpha1 == Approx(1.5 * 4 * std::log(2.0) * 0.5).epsilon(1e-12));
  CHECK(e.alpha1 == Approx(2.0794).epsilon(1e-4));
}

TEST_CASE("symmetric Nash verdicts") {
  const auto ok = check_symmetric_nash(Market(fixtures::identical_linear(fixtures::uniform26())), 0.01);
  CHECK(ok.verdict == NashVerdict::Confirmed);

  const auto bad = check_symmetric_nash(Market(fixtures::identical_linear(fixtures::exp4())), 0.01);
  CHECK(bad.verdict == NashVerdict::NecessaryOnlyFailed);
  CHECK(std::abs(bad.reply.gamma_star - 1.5) > 0.03);
  CHECK(bad.reply.rate_cap == Approx(2.25).epsilon(1e-6));

  CHECK_THROWS_AS(check_symmetric_nash(Market(fixtures::asymmetric_linear(fixtures::uniform26())), 0.01),
                  PreconditionError);
}

TEST_CASE("narrow uniform law behaves like a single class") {
  // Compare the reply to alpha with a brute-force scan over prices.
  const Market m(fixtures::identical_linear(SensitivityDistribution::uniform(4.0, 4.05)));
  const auto check = check_symmetric_nash(m, 0.01);
  const double alpha = check.alpha;
  double best = -1.0;
  for (int i = 0; i <= 200000; ++i) {
    const double c1 = 10.0 * i / 200000.0;
    const auto s = m.solve({c1, alpha});
    best = std::max(best, c1 * s.gamma1);
  }
  CHECK(check.reply.revenue_star >= best - 1e-4);
  CHECK(check.reply.revenue_star <= best + 1e-3);
  MESSAGE("narrow-law verdict: " << to_string(check.verdict));
}

TEST_CASE("Nash iteration") {
  const Market m(fixtures::identical_linear(fixtures::uniform26()));
  const auto r = nash_iterate(m, {1.0, 1.0}, 1e-6, 200);
  CHECK(r.converged);
  CHECK(r.prices.c1 == Approx(3.0).epsilon(1e-4));
  CHECK(r.prices.c2 == Approx(3.0).epsilon(1e-4));

  const auto none = nash_iterate(m, {1.0, 2.0}, 1e-6, 0);
  CHECK_FALSE(none.converged);
  CHECK(none.prices.c1 == 1.0);
  CHECK(none.prices.c2 == 2.0);
}

TEST_CASE("property: converged prices are a fixed point") {
  for (const auto& cfg : {fixtures::identical_linear(fixtures::uniform26()),
                          fixtures::asymmetric_linear(fixtures::uniform26()),
                          fixtures::asymmetric_mm1(fixtures::gamma22())}) {
    const Market m(cfg);
    const double tol = 1e-6;
    const auto r = nash_iterate(m, {1.0, 1.0}, tol, 300, 0.7);
    if (!r.converged) continue;
    CHECK(std::abs(best_response(m, ServerId::One, r.prices.c2).price_star - r.prices.c1) < 2 * tol);
    CHECK(std::abs(best_response(m, ServerId::Two, r.prices.c1).price_star - r.prices.c2) < 2 * tol);
  }
}

TEST_CASE("property: best responses are interior") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    SystemConfig cfg;
    cfg.lambda = 1.0 + 3.0 * u(rng);
    cfg.server1 = DelayModel::linear(cfg.lambda * (1.1 + u(rng)));
    cfg.server2 = DelayModel::mm1(cfg.lambda * (1.1 + u(rng)));
    cfg.beta = i % 2 ? SensitivityDistribution::gamma(1 + 3 * u(rng), 1 + u(rng))
                     : SensitivityDistribution::uniform(1 + u(rng), 4 + 3 * u(rng));
    const Market m(cfg);
    const ServerId s = i % 3 ? ServerId::One : ServerId::Two;
    const auto r = best_response(m, s, 5.0 * u(rng), 2048);
    REQUIRE(r.gamma_star > 1e-6 * cfg.lambda);
    REQUIRE(r.gamma_star < r.rate_cap - 1e-6 * cfg.lambda);
  }
}

TEST_CASE("property: revenue is stationary at the best response") {
  const Market m(fixtures::asymmetric_mm1(fixtures::exp4()));
  for (double rival : {0.5, 2.0, 4.0}) {
    const auto r = best_response(m, ServerId::One, rival);
    auto revenue = [&](double g) { return (m.price_gap_1(g) + rival) * g; };
    const double h = 1e-5;
    const double slope = (revenue(r.gamma_star + h) - revenue(r.gamma_star - h)) / (2 * h);
    CHECK(std::abs(slope) < 1e-4 * std::max(1.0, r.revenue_star));
  }
}

TEST_CASE("property: analytic and numeric alpha agree") {
  for (const auto& F : {fixtures::uniform26(), fixtures::exp4(), fixtures::gamma22()}) {
    const Market m(fixtures::identical_linear(F));
    const auto a = symmetric_alpha(m);
    const auto n = symmetric_alpha_numeric(m);
    CHECK(n.alpha1 == Approx(a.alpha1).epsilon(1e-5));
    CHECK(n.alpha2 == Approx(a.alpha2).epsilon(1e-5));
    CHECK(std::abs(a.alpha1 - a.alpha2) < 1e-9);
  }
}
