#include "qpk/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace qpk::io {

namespace {

class Reader {
 public:
  void fail(std::string msg) { problems_.push_back(std::move(msg)); }

  // Rejects keys outside `allowed`; returns false when `obj` is not an object.
  bool object(const json& obj, std::string_view where, std::set<std::string> allowed) {
    if (!obj.is_object()) {
      fail(fmt::format("{}: expected an object", where));
      return false;
    }
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.contains(key)) fail(fmt::format("{}: unknown key '{}'", where, key));
    }
    return true;
  }

  double number(const json& obj, const std::string& key, std::string_view where) {
    if (!obj.contains(key)) {
      fail(fmt::format("{}: missing '{}'", where, key));
      return std::nan("");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(fmt::format("{}.{}: expected a number", where, key));
      return std::nan("");
    }
    return v.get<double>();
  }

  std::string text(const json& obj, const std::string& key, std::string_view where) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
      fail(fmt::format("{}: '{}' must be a string", where, key));
      return {};
    }
    return obj.at(key).get<std::string>();
  }

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

template <class Fn>
auto guarded(Reader& r, std::string_view where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    r.fail(fmt::format("{}: {}", where, e.what()));
    return std::nullopt;
  }
}

std::optional<DelayModel> read_delay(Reader& r, const json& doc, const std::string& key) {
  if (!doc.contains(key)) {
    r.fail(fmt::format("config: missing '{}'", key));
    return std::nullopt;
  }
  const auto& obj = doc.at(key);
  if (!r.object(obj, key, {"family", "mu"})) return std::nullopt;
  const auto family = r.text(obj, "family", key);
  const double mu = r.number(obj, "mu", key);
  if (family != "linear" && family != "mm1") {
    r.fail(fmt::format("{}.family: expected 'linear' or 'mm1', got '{}'", key, family));
    return std::nullopt;
  }
  if (std::isnan(mu)) return std::nullopt;
  return guarded(r, key, [&]() -> std::optional<DelayModel> {
    return family == "linear" ? DelayModel::linear(mu) : DelayModel::mm1(mu);
  });
}

std::optional<SensitivityDistribution> read_beta(Reader& r, const json& doc) {
  if (!doc.contains("beta")) {
    r.fail("config: missing 'beta'");
    return std::nullopt;
  }
  const auto& obj = doc.at("beta");
  if (!obj.is_object()) {
    r.fail("beta: expected an object");
    return std::nullopt;
  }
  const auto family = r.text(obj, "family", "beta");
  struct Shape {
    DistFamily family;
    std::vector<std::string> keys;
  };
  static const std::vector<std::pair<std::string, Shape>> shapes = {
      {"uniform", {DistFamily::Uniform, {"a", "b"}}},
      {"exponential", {DistFamily::Exponential, {"tau"}}},
      {"gamma", {DistFamily::Gamma, {"k", "theta"}}},
      {"power", {DistFamily::Power, {"n", "B"}}},
  };
  for (const auto& [name, shape] : shapes) {
    if (name != family) continue;
    std::set<std::string> allowed{"family"};
    allowed.insert(shape.keys.begin(), shape.keys.end());
    r.object(obj, "beta", allowed);
    std::vector<double> p;
    for (const auto& k : shape.keys) p.push_back(r.number(obj, k, "beta"));
    for (double x : p) {
      if (std::isnan(x)) return std::nullopt;
    }
    return guarded(r, "beta", [&]() -> std::optional<SensitivityDistribution> {
      return SensitivityDistribution::from_parameters(shape.family, p);
    });
  }
  r.fail(fmt::format("beta.family: unknown family '{}'", family));
  return std::nullopt;
}

std::string_view family_key(DelayFamily f) { return f == DelayFamily::Linear ? "linear" : "mm1"; }

json delay_json(const DelayModel& m) {
  return json{{"family", family_key(m.family())}, {"mu", m.mu()}};
}

json beta_json(const SensitivityDistribution& F) {
  const auto p = F.parameters();
  switch (F.family()) {
    case DistFamily::Uniform:
      return json{{"family", "uniform"}, {"a", p[0]}, {"b", p[1]}};
    case DistFamily::Exponential:
      return json{{"family", "exponential"}, {"tau", p[0]}};
    case DistFamily::Gamma:
      return json{{"family", "gamma"}, {"k", p[0]}, {"theta", p[1]}};
    case DistFamily::Power:
      return json{{"family", "power"}, {"n", p[0]}, {"B", p[1]}};
  }
  return json{};
}

json artifact(std::string_view kind) { return json{{"schema", kSchema}, {"kind", kind}}; }

json measurement_json(const Measurement& m) {
  return json{{"c1", number_json(m.c1)},         {"c2", number_json(m.c2)},
              {"gamma1", number_json(m.gamma1)}, {"gamma2", number_json(m.gamma2)},
              {"d1", number_json(m.d1)},         {"d2", number_json(m.d2)}};
}

json best_response_json(const BestResponse& r) {
  json out{{"server", static_cast<int>(r.server)},
           {"given_price", number_json(r.given_price)},
           {"gamma_star", number_json(r.gamma_star)},
           {"price_star", number_json(r.price_star)},
           {"revenue_star", number_json(r.revenue_star)},
           {"rate_cap", number_json(r.rate_cap)},
           {"stationary_points", json::array()}};
  for (double x : r.stationary_points) out["stationary_points"].push_back(number_json(x));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

SystemConfig config_from_json(const json& doc) {
  Reader r;
  if (!r.object(doc, "config",
                {"schema", "lambda", "server1", "server2", "beta", "saturation_ok", "tolerances"})) {
    throw ConfigError("config: expected a JSON object");
  }
  if (!doc.contains("schema")) {
    r.fail(fmt::format("config: missing 'schema' (expected \"{}\")", kSchema));
  } else if (!doc.at("schema").is_string() || doc.at("schema").get<std::string>() != kSchema) {
    r.fail(fmt::format("config: unsupported schema {} (expected \"{}\")", doc.at("schema").dump(),
                       kSchema));
  }

  SystemConfig cfg;
  cfg.lambda = r.number(doc, "lambda", "config");
  const auto s1 = read_delay(r, doc, "server1");
  const auto s2 = read_delay(r, doc, "server2");
  const auto beta = read_beta(r, doc);
  if (doc.contains("saturation_ok")) {
    if (doc.at("saturation_ok").is_boolean()) {
      cfg.saturation_ok = doc.at("saturation_ok").get<bool>();
    } else {
      r.fail("config.saturation_ok: expected a boolean");
    }
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    if (r.object(t, "tolerances", {"residual", "argument", "max_iter"})) {
      if (t.contains("residual")) cfg.tol.residual = r.number(t, "residual", "tolerances");
      if (t.contains("argument")) cfg.tol.argument = r.number(t, "argument", "tolerances");
      if (t.contains("max_iter")) {
        if (t.at("max_iter").is_number_integer()) {
          cfg.tol.max_iter = t.at("max_iter").get<int>();
        } else {
          r.fail("tolerances.max_iter: expected an integer");
        }
      }
    }
  }

  if (!r.problems().empty()) {
    std::string msg;
    for (const auto& p : r.problems()) msg += (msg.empty() ? "" : "\n") + p;
    throw ConfigError(msg);
  }
  cfg.server1 = *s1;
  cfg.server2 = *s2;
  cfg.beta = *beta;
  validate_config(cfg);
  return cfg;
}

json config_to_json(const SystemConfig& cfg) {
  return json{{"schema", kSchema},
              {"lambda", cfg.lambda},
              {"server1", delay_json(cfg.server1)},
              {"server2", delay_json(cfg.server2)},
              {"beta", beta_json(cfg.beta)},
              {"saturation_ok", cfg.saturation_ok},
              {"tolerances", json{{"residual", cfg.tol.residual},
                                  {"argument", cfg.tol.argument},
                                  {"max_iter", cfg.tol.max_iter}}}};
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(doc);
}

// ---------------------------------------------------------------------------
// Numbers and tables
// ---------------------------------------------------------------------------

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

json number_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string summary(double x) {
  if (!std::isfinite(x)) return number(x);
  return fmt::format("{:.4g}", x);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
    out << '\n';
  }
}

Table measurements_table(const std::vector<Measurement>& log) {
  Table t{{"c1", "c2", "gamma1", "gamma2", "d1", "d2"}, {}};
  for (const auto& m : log) t.rows.push_back({m.c1, m.c2, m.gamma1, m.gamma2, m.d1, m.d2});
  return t;
}

Table density_table(const DensityEstimate& est) {
  Table t{{"beta_lo", "beta_hi", "z"}, {}};
  for (const auto& b : est.bins) t.rows.push_back({b.beta_lo, b.beta_hi, b.z});
  return t;
}

Table curve_table(const std::vector<CurvePoint>& curve) {
  Table t{{"gamma1", "revenue"}, {}};
  for (const auto& p : curve) t.rows.push_back({p.gamma1, p.revenue});
  return t;
}

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

json to_json(const EquilibriumSplit& split, const PriceVector& prices) {
  const auto rev = revenue_rates(split, prices);
  auto out = artifact("equilibrium");
  out["c1"] = number_json(prices.c1);
  out["c2"] = number_json(prices.c2);
  out["gamma1"] = number_json(split.gamma1);
  out["gamma2"] = number_json(split.gamma2);
  out["beta1"] = number_json(split.beta1);
  out["regime"] = to_string(split.regime);
  out["r1"] = number_json(rev.r1);
  out["r2"] = number_json(rev.r2);
  out["revenue_total"] = number_json(rev.total);
  return out;
}

json to_json(const MonopolyResult& r) {
  auto out = artifact("monopoly");
  out["gamma1_star"] = number_json(r.gamma1_star);
  out["c1_star"] = number_json(r.c1_star);
  out["rt_star"] = number_json(r.rt_star);
  return out;
}

json to_json(const BestResponse& r) {
  auto out = artifact("best-response");
  out.update(best_response_json(r));
  return out;
}

json to_json(const SymmetricCheck& r) {
  auto out = artifact("symmetric-nash");
  out["verdict"] = to_string(r.verdict);
  out["alpha"] = number_json(r.alpha);
  out["reply"] = best_response_json(r.reply);
  return out;
}

json to_json(const NashOutcome& r) {
  auto out = artifact("nash");
  out["c1"] = number_json(r.prices.c1);
  out["c2"] = number_json(r.prices.c2);
  out["converged"] = r.converged;
  out["iterations"] = r.iterations;
  out["residual"] = number_json(r.residual);
  out["symmetric_alpha"] = r.symmetric_alpha ? number_json(*r.symmetric_alpha) : json(nullptr);
  return out;
}

json to_json(const ExponentialFit& r) {
  auto out = artifact("exponential-fit");
  out["tau"] = number_json(r.tau);
  out["rate"] = number_json(r.rate());
  out["beta_lo"] = number_json(r.beta_lo);
  out["beta_hi"] = number_json(r.beta_hi);
  out["mass"] = number_json(r.mass);
  out["measurements"] = json::array({measurement_json(r.base), measurement_json(r.stepped)});
  return out;
}

json to_json(const ParametricFit& r) {
  auto out = artifact("parametric-fit");
  out["family"] = to_string(r.family);
  out["parameters"] = json::array();
  for (double p : r.parameters) out["parameters"].push_back(number_json(p));
  out["residual_norm"] = number_json(r.residual_norm);
  out["converged"] = r.converged;
  out["iterations"] = r.iterations;
  out["measurements"] = json::array();
  for (const auto& m : r.measurements) out["measurements"].push_back(measurement_json(m));
  return out;
}

json to_json(const DensityEstimate& r) {
  auto out = artifact("density");
  out["bins"] = json::array();
  for (const auto& b : r.bins) {
    out["bins"].push_back(json{{"beta_lo", number_json(b.beta_lo)},
                               {"beta_hi", number_json(b.beta_hi)},
                               {"z", number_json(b.z)}});
  }
  out["covered_mass"] = number_json(r.covered_mass);
  out["swept_mass"] = number_json(r.swept_mass);
  out["gaps"] = json::array();
  for (const auto& [a, b] : r.gaps) {
    out["gaps"].push_back(json::array({number_json(a), number_json(b)}));
  }
  out["log"] = json::array();
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    auto m = measurement_json(r.log[i]);
    m["beta1"] = number_json(r.thresholds[i]);
    out["log"].push_back(std::move(m));
  }
  return out;
}

json to_json(const DiscreteClasses& r) {
  auto out = artifact("discrete-classes");
  out["complete"] = r.complete;
  out["residual_rate"] = number_json(r.residual_rate);
  out["classes"] = json::array();
  const auto closed = r.closed_rates();
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    const auto& c = r.classes[i];
    out["classes"].push_back(json{{"beta", number_json(c.beta)},
                                  {"rate", number_json(c.rate)},
                                  {"closed_rate", number_json(closed[i])},
                                  {"resolved", c.resolved}});
  }
  return out;
}

json to_json(const Table& t) {
  auto out = artifact("table");
  out["columns"] = t.header;
  out["rows"] = json::array();
  for (const auto& row : t.rows) {
    json jr = json::array();
    for (double x : row) jr.push_back(number_json(x));
    out["rows"].push_back(std::move(jr));
  }
  return out;
}

}  // namespace qpk::io
