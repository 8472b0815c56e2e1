#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qpk/duopoly.hpp"
#include "qpk/estimation.hpp"
#include "qpk/monopoly.hpp"
#include "qpk/wardrop.hpp"

namespace qpk::io {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "qpk/1";

// Config documents look like
//   {"schema": "qpk/1", "lambda": 3,
//    "server1": {"family": "linear", "mu": 3.3},
//    "server2": {"family": "mm1", "mu": 4},
//    "beta": {"family": "uniform", "a": 2, "b": 6},
//    "saturation_ok": false,
//    "tolerances": {"residual": 1e-10, "argument": 1e-12, "max_iter": 200}}
// Beta families: uniform {a, b}, exponential {tau}, gamma {k, theta},
// power {n, B}. Unknown keys are rejected. Parse problems raise ConfigError
// listing every problem found; the parsed config is then validated.
SystemConfig config_from_json(const json& doc);
json config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::filesystem::path& path);

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string number(double x);
// Non-finite values become null.
json number_json(double x);
// Four significant digits, for human summaries.
std::string summary(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& out, const Table& table);

Table measurements_table(const std::vector<Measurement>& log);
Table density_table(const DensityEstimate& est);
Table curve_table(const std::vector<CurvePoint>& curve);

json to_json(const EquilibriumSplit& split, const PriceVector& prices);
json to_json(const MonopolyResult& r);
json to_json(const BestResponse& r);
json to_json(const SymmetricCheck& r);
json to_json(const NashOutcome& r);
json to_json(const ExponentialFit& r);
json to_json(const ParametricFit& r);
json to_json(const DensityEstimate& r);
json to_json(const DiscreteClasses& r);
json to_json(const Table& t);

}  // namespace qpk::io
