// qpk: command-line front end for the two-server pricing toolkit.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qpk/duopoly.hpp"
#include "qpk/estimation.hpp"
#include "qpk/io.hpp"
#include "qpk/monopoly.hpp"
#include "qpk/oracle.hpp"
#include "qpk/wardrop.hpp"

namespace {

using qpk::io::json;
using qpk::io::summary;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::string format = "summary";
  std::string output;
  std::uint64_t seed = 1;
  std::string oracle = "exact";
  double noise = 0.01;
  double horizon = 1e5;
};

void add_common(CLI::App* cmd, Common& c, bool with_oracle) {
  cmd->add_option("--config", c.config, "System config (JSON, schema qpk/1)")->required();
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"summary", "csv", "json"}));
  cmd->add_option("--output", c.output, "Write machine output here instead of stdout");
  cmd->add_option("--seed", c.seed, "Seed for noisy and simulated oracles");
  if (with_oracle) {
    cmd->add_option("--oracle", c.oracle, "Measurement backend")
        ->check(CLI::IsMember({"exact", "noisy", "des"}));
    cmd->add_option("--noise", c.noise, "Relative noise of the noisy oracle");
    cmd->add_option("--horizon", c.horizon, "Simulated time per DES measurement");
  }
}

class Emitter {
 public:
  explicit Emitter(const Common& c) : c_(c) {}

  void summary_line(const std::string& line) { text_ += line + "\n"; }
  void artifact(json doc) { json_ = std::move(doc); }
  void table(qpk::io::Table t) { table_ = std::move(t); }

  void flush() const {
    std::ostringstream body;
    if (c_.format == "summary") {
      body << text_;
    } else if (c_.format == "json") {
      body << (json_.is_null() && table_ ? qpk::io::to_json(*table_) : json_).dump(2) << '\n';
    } else {
      if (!table_) throw qpk::ConfigError("this command has no CSV form; use --format json");
      qpk::io::write_csv(body, *table_);
    }
    if (c_.output.empty()) {
      std::cout << body.str();
      std::cout.flush();
      return;
    }
    std::ofstream out(c_.output, std::ios::binary);
    if (!out) throw qpk::ConfigError(fmt::format("cannot write '{}'", c_.output));
    out << body.str();
  }

 private:
  const Common& c_;
  std::string text_;
  json json_;
  std::optional<qpk::io::Table> table_;
};

std::unique_ptr<qpk::Oracle> make_oracle(const Common& c, const qpk::SystemConfig& cfg) {
  if (c.oracle == "des") return std::make_unique<qpk::SimulationOracle>(cfg, c.horizon, c.seed);
  auto exact = std::make_unique<qpk::ExactOracle>(cfg);
  if (c.oracle == "noisy") return std::make_unique<qpk::NoisyOracle>(std::move(exact), c.noise, c.seed);
  return exact;
}

qpk::DistFamily parse_family(const std::string& s) {
  if (s == "uniform") return qpk::DistFamily::Uniform;
  if (s == "exponential") return qpk::DistFamily::Exponential;
  if (s == "gamma") return qpk::DistFamily::Gamma;
  if (s == "power") return qpk::DistFamily::Power;
  throw qpk::ConfigError(fmt::format("unknown distribution family '{}'", s));
}

// "beta:rate,beta:rate,..."
std::vector<qpk::CustomerClass> parse_classes(const std::string& s) {
  std::vector<qpk::CustomerClass> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw qpk::ConfigError(fmt::format("class '{}' is not of the form beta:rate", item));
    }
    try {
      std::size_t used_b = 0;
      std::size_t used_r = 0;
      const std::string b = item.substr(0, colon);
      const std::string r = item.substr(colon + 1);
      qpk::CustomerClass c{std::stod(b, &used_b), std::stod(r, &used_r)};
      if (used_b != b.size() || used_r != r.size()) throw std::invalid_argument(item);
      out.push_back(c);
    } catch (const std::logic_error&) {
      throw qpk::ConfigError(fmt::format("class '{}' is not of the form beta:rate", item));
    }
  }
  if (out.empty()) throw qpk::ConfigError("--classes is empty");
  return out;
}

// Midpoints of n equal cells on (lo, hi).
std::vector<double> cell_grid(double lo, double hi, int n) {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * (i + 0.5) / n;
  return xs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pricing, equilibrium and estimation for two competing servers"};
  app.require_subcommand(1);
  Common common;

  // equilibrium
  double eq_c1 = 0.0;
  double eq_c2 = 0.0;
  auto* eq = app.add_subcommand("equilibrium", "Wardrop split at given prices");
  add_common(eq, common, false);
  eq->add_option("--c1", eq_c1)->required();
  eq->add_option("--c2", eq_c2)->required();

  // monopoly
  double mono_c2 = 0.0;
  std::size_t grid = qpk::kDefaultGrid;
  std::size_t curve_n = 0;
  auto* mono = app.add_subcommand("monopoly", "Server 1's revenue-optimal price for fixed c2");
  add_common(mono, common, false);
  mono->add_option("--c2", mono_c2)->required();
  mono->add_option("--grid", grid, "Scan grid size");
  mono->add_option("--curve", curve_n, "Also emit the revenue curve with this many points");

  // duopoly-best-response
  int br_server = 1;
  double br_price = 0.0;
  auto* br = app.add_subcommand("duopoly-best-response", "Best response to the rival's price");
  add_common(br, common, false);
  br->add_option("--server", br_server)->check(CLI::IsMember({1, 2}));
  br->add_option("--price", br_price, "Rival's price")->required();
  br->add_option("--grid", grid, "Scan grid size");

  // duopoly-nash
  double nash_c1 = 1.0;
  double nash_c2 = 1.0;
  double nash_tol = 1e-6;
  int nash_iter = 200;
  double nash_damping = 1.0;
  auto* nash = app.add_subcommand("duopoly-nash", "Alternating best-response iteration");
  add_common(nash, common, false);
  nash->add_option("--c1", nash_c1, "Initial c1");
  nash->add_option("--c2", nash_c2, "Initial c2");
  nash->add_option("--tol", nash_tol);
  nash->add_option("--max-iter", nash_iter);
  nash->add_option("--damping", nash_damping);
  nash->add_option("--grid", grid, "Scan grid size");

  // duopoly-symmetric
  double sym_tol = 0.01;
  auto* sym = app.add_subcommand("duopoly-symmetric", "Symmetric Nash candidate and its check");
  add_common(sym, common, false);
  sym->add_option("--tol", sym_tol, "Relative rate / absolute price tolerance");
  sym->add_option("--grid", grid, "Scan grid size");

  // estimate-exp
  double ee_c1 = 0.0;
  double ee_c2 = 0.0;
  double ee_delta = 0.2;
  auto* ee = app.add_subcommand("estimate-exp", "Fit an exponential sensitivity law");
  add_common(ee, common, true);
  ee->add_option("--c1", ee_c1)->required();
  ee->add_option("--c2", ee_c2)->required();
  ee->add_option("--delta", ee_delta);

  // estimate-param
  std::string ep_family;
  double ep_c2 = 0.0;
  std::vector<double> ep_prices;
  auto* ep = app.add_subcommand("estimate-param", "Least-squares fit of a parametric law");
  add_common(ep, common, true);
  ep->add_option("--family", ep_family)
      ->required()
      ->check(CLI::IsMember({"uniform", "exponential", "gamma", "power"}));
  ep->add_option("--c2", ep_c2)->required();
  ep->add_option("--prices", ep_prices, "Increasing c1 values")->required()->delimiter(',');

  // estimate-density
  double ed_c2 = 0.0;
  std::optional<double> ed_start;
  double ed_delta = 0.2;
  int ed_steps = 9;
  auto* ed = app.add_subcommand("estimate-density", "Piecewise-constant density from a sweep");
  add_common(ed, common, true);
  ed->add_option("--c2", ed_c2)->required();
  ed->add_option("--c1-start", ed_start, "First c1 (default c2)");
  ed->add_option("--delta", ed_delta);
  ed->add_option("--steps", ed_steps);

  // discover-classes
  std::string dc_classes;
  double dc_delta = 0.01;
  std::optional<double> dc_eps;
  std::optional<double> dc_init;
  auto* dc = app.add_subcommand("discover-classes",
                                "Recover discrete classes; servers come from --config");
  add_common(dc, common, false);
  dc->add_option("--oracle", common.oracle, "Measurement backend")
      ->check(CLI::IsMember({"exact", "noisy"}));
  dc->add_option("--noise", common.noise, "Relative noise of the noisy oracle");
  dc->add_option("--classes", dc_classes, "Ground truth as beta:rate,beta:rate,...")->required();
  dc->add_option("--delta", dc_delta);
  dc->add_option("--eps", dc_eps, "Rate threshold (default 1e-3 * lambda)");
  dc->add_option("--c1-init", dc_init, "Starting c1 (default: just above every class's entry)");

  // sweep
  std::string sw_what;
  int sw_n = 200;
  double sw_c2 = 0.0;
  auto* sw = app.add_subcommand("sweep", "Plot-ready curve over a uniform rate grid");
  add_common(sw, common, false);
  sw->add_option("--what", sw_what)->required();
  sw->add_option("--n", sw_n)->check(CLI::PositiveNumber);
  sw->add_option("--c2", sw_c2, "Rival price for revenue and r1-and-c1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    Emitter emit(common);
    const auto cfg = qpk::io::load_config(common.config);
    const qpk::Market market(cfg);
    const double lambda = cfg.lambda;

    if (*eq) {
      const qpk::PriceVector p{eq_c1, eq_c2};
      const auto split = market.solve(p);
      const auto rev = qpk::revenue_rates(split, p);
      emit.summary_line(fmt::format("gamma1={} gamma2={} beta1={} regime={}", summary(split.gamma1),
                                    summary(split.gamma2), summary(split.beta1),
                                    qpk::to_string(split.regime)));
      emit.summary_line(fmt::format("R1={} R2={} RT={}", summary(rev.r1), summary(rev.r2),
                                    summary(rev.total)));
      emit.artifact(qpk::io::to_json(split, p));
      emit.table({{"c1", "c2", "gamma1", "gamma2", "beta1"},
                  {{eq_c1, eq_c2, split.gamma1, split.gamma2, split.beta1}}});
    } else if (*mono) {
      const auto r = qpk::optimize_monopoly(market, mono_c2, grid, curve_n);
      emit.summary_line(fmt::format("gamma1*={} c1*={} RT*={}", summary(r.gamma1_star),
                                    summary(r.c1_star), summary(r.rt_star)));
      auto doc = qpk::io::to_json(r);
      if (!r.curve.empty()) doc["curve"] = qpk::io::to_json(qpk::io::curve_table(r.curve))["rows"];
      emit.artifact(std::move(doc));
      if (r.curve.empty()) {
        emit.table({{"gamma1_star", "c1_star", "rt_star"}, {{r.gamma1_star, r.c1_star, r.rt_star}}});
      } else {
        emit.table(qpk::io::curve_table(r.curve));
      }
    } else if (*br) {
      const auto server = br_server == 1 ? qpk::ServerId::One : qpk::ServerId::Two;
      const auto r = qpk::best_response(market, server, br_price, grid);
      emit.summary_line(fmt::format("server {} reply to {}: gamma*={} price*={} revenue*={}",
                                    br_server, summary(br_price), summary(r.gamma_star),
                                    summary(r.price_star), summary(r.revenue_star)));
      emit.artifact(qpk::io::to_json(r));
      emit.table({{"given_price", "gamma_star", "price_star", "revenue_star", "rate_cap"},
                  {{r.given_price, r.gamma_star, r.price_star, r.revenue_star, r.rate_cap}}});
    } else if (*nash) {
      const auto r = qpk::nash_iterate(market, {nash_c1, nash_c2}, nash_tol, nash_iter,
                                       nash_damping, grid);
      emit.summary_line(fmt::format("c1={} c2={} converged={} iterations={} residual={}",
                                    summary(r.prices.c1), summary(r.prices.c2), r.converged,
                                    r.iterations, summary(r.residual)));
      emit.artifact(qpk::io::to_json(r));
      emit.table({{"c1", "c2", "iterations", "residual"},
                  {{r.prices.c1, r.prices.c2, static_cast<double>(r.iterations), r.residual}}});
    } else if (*sym) {
      const auto alpha = qpk::symmetric_alpha(market);
      const auto r = qpk::check_symmetric_nash(market, sym_tol, grid);
      emit.summary_line(fmt::format("alpha1={} alpha2={} verdict={}", summary(alpha.alpha1),
                                    summary(alpha.alpha2), qpk::to_string(r.verdict)));
      emit.summary_line(fmt::format("reply to alpha: gamma*={} price*={} (gamma+={})",
                                    summary(r.reply.gamma_star), summary(r.reply.price_star),
                                    summary(market.balanced_load())));
      emit.artifact(qpk::io::to_json(r));
    } else if (*ee) {
      auto oracle = make_oracle(common, cfg);
      const auto r = qpk::estimate_exponential(*oracle, ee_c1, ee_c2, ee_delta);
      emit.summary_line(fmt::format("tau={} rate={} on [{}, {}]", summary(r.tau), summary(r.rate()),
                                    summary(r.beta_lo), summary(r.beta_hi)));
      emit.artifact(qpk::io::to_json(r));
      emit.table(qpk::io::measurements_table({r.base, r.stepped}));
    } else if (*ep) {
      auto oracle = make_oracle(common, cfg);
      const auto r = qpk::estimate_parametric(*oracle, parse_family(ep_family), ep_c2, ep_prices);
      std::string params;
      for (double p : r.parameters) params += (params.empty() ? "" : ", ") + summary(p);
      emit.summary_line(fmt::format("{}({}) residual={} converged={}", ep_family, params,
                                    summary(r.residual_norm), r.converged));
      emit.artifact(qpk::io::to_json(r));
      emit.table(qpk::io::measurements_table(r.measurements));
    } else if (*ed) {
      auto oracle = make_oracle(common, cfg);
      const auto r =
          qpk::estimate_density(*oracle, ed_c2, ed_start.value_or(ed_c2), ed_delta, ed_steps);
      for (const auto& b : r.bins) {
        emit.summary_line(fmt::format("[{}, {}] z={}", summary(b.beta_lo), summary(b.beta_hi),
                                      summary(b.z)));
      }
      emit.summary_line(fmt::format("covered mass={} gaps={}", summary(r.covered_mass),
                                    r.gaps.size()));
      emit.artifact(qpk::io::to_json(r));
      emit.table(qpk::io::density_table(r));
    } else if (*dc) {
      const auto classes = parse_classes(dc_classes);
      std::unique_ptr<qpk::Oracle> oracle = std::make_unique<qpk::DiscreteClassOracle>(
          cfg.server1, cfg.server2, classes, cfg.saturation_ok);
      auto* exact = static_cast<qpk::DiscreteClassOracle*>(oracle.get());
      const double total = exact->lambda();
      double init = 0.0;
      if (dc_init) {
        init = *dc_init;
      } else {
        // Above beta_max * (D2(lambda) - D1(0)) nobody uses server 1.
        const double dd = cfg.delay2(total) - cfg.delay1(0.0);
        init = 1.01 * exact->classes().front().beta * dd + dc_delta;
      }
      if (common.oracle == "noisy") {
        oracle = std::make_unique<qpk::NoisyOracle>(std::move(oracle), common.noise, common.seed);
      }
      const auto r =
          qpk::discover_classes(*oracle, total, dc_delta, dc_eps.value_or(1e-3 * total), init);
      const auto closed = r.closed_rates();
      for (std::size_t i = 0; i < r.classes.size(); ++i) {
        emit.summary_line(fmt::format("class {}: beta={} rate={}{}", i + 1,
                                      summary(r.classes[i].beta), summary(closed[i]),
                                      r.classes[i].resolved ? "" : " (closed by residual)"));
      }
      emit.summary_line(fmt::format("complete={} residual={}", r.complete,
                                    summary(r.residual_rate)));
      emit.artifact(qpk::io::to_json(r));
      qpk::io::Table t{{"beta", "rate", "closed_rate"}, {}};
      for (std::size_t i = 0; i < r.classes.size(); ++i) {
        t.rows.push_back({r.classes[i].beta, r.classes[i].rate, closed[i]});
      }
      emit.table(std::move(t));
    } else if (*sw) {
      if (sw_n < 2) throw qpk::DomainError("sweep: --n must be at least 2");
      qpk::io::Table t;
      if (sw_what == "beta1") {
        t.header = {"gamma1", "beta1"};
        for (double g : cell_grid(0.0, lambda, sw_n)) t.rows.push_back({g, market.threshold_of_rate(g)});
      } else if (sw_what == "g1") {
        t.header = {"gamma1", "g1"};
        for (double g : cell_grid(0.0, lambda, sw_n)) t.rows.push_back({g, market.price_gap_1(g)});
      } else if (sw_what == "g2") {
        t.header = {"gamma2", "g2"};
        for (double g : cell_grid(0.0, lambda, sw_n)) t.rows.push_back({g, market.price_gap_2(g)});
      } else if (sw_what == "revenue") {
        t = qpk::io::curve_table(qpk::revenue_curve(market, sw_c2, sw_n));
      } else if (sw_what == "r1-and-c1") {
        t.header = {"gamma1", "r1", "c1"};
        const double cap = market.rate_cap_1(sw_c2);
        for (double g : cell_grid(0.0, cap, sw_n)) {
          const double c1 = sw_c2 + market.price_gap_1(g);
          t.rows.push_back({g, c1 * g, c1});
        }
      } else {
        throw qpk::DomainError(fmt::format(
            "sweep: unknown curve '{}' (beta1, g1, g2, revenue, r1-and-c1)", sw_what));
      }
      emit.summary_line(fmt::format("{} rows of {} over gamma in [{}, {}]", t.rows.size(), sw_what,
                                    summary(t.rows.front()[0]), summary(t.rows.back()[0])));
      emit.table(std::move(t));
    }

    emit.flush();
    return 0;
  } catch (const qpk::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qpk::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qpk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
