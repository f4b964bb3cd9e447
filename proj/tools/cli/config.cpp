#include "config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "insider_lab/errors.hpp"
#include "insider_lab/schedules.hpp"
#include "insider_lab/strategy.hpp"

namespace insider::cli {
namespace {

constexpr std::array kSchema{
    KeySpec{"T", ValueType::Number, "1.0", "trading horizon"},
    KeySpec{"alpha", ValueType::StepFunction, "0.1", "drift, constant or {starts, values}"},
    KeySpec{"beta", ValueType::StepFunction, "0.2", "volatility, constant or {starts, values}"},
    KeySpec{"x0", ValueType::Number, "1.0", "initial wealth"},
    KeySpec{"schedule", ValueType::Text, "\"powerlaw:q=0.5\"", "look-ahead schedule literal"},
    KeySpec{"strategy", ValueType::Text, "\"insider\"", "merton, insider or table:@file"},
    KeySpec{"paths", ValueType::Count, "200000", "Monte Carlo paths"},
    KeySpec{"base_points", ValueType::Count, "4096", "base grid points (power of two)"},
    KeySpec{"delta", ValueType::Number, "0.001", "truncation: wealth is evaluated at T - delta"},
    KeySpec{"deltas", ValueType::NumberList, "[0.1, 0.01]", "sweep truncations, decreasing"},
    KeySpec{"seed", ValueType::Count, "42", "master seed"},
    KeySpec{"antithetic", ValueType::Flag, "true", "antithetic path pairs"},
    KeySpec{"abs_tol", ValueType::Number, "0.02", "absolute tolerance of compare verdicts"},
    KeySpec{"pi_cap", ValueType::OptionalNumber, "null", "clip |pi| to this value"},
    KeySpec{"duality_kind", ValueType::Text, "\"constant\"", "constant, terminal or adapted"},
    KeySpec{"duality_eps", ValueType::Number, "0.5", "look-ahead of the constant duality integrand"},
    KeySpec{"drift_mode", ValueType::Text, "\"bridge\"", "bridge (h <= eps) or martingale (h >= eps)"},
    KeySpec{"drift_t", ValueType::Number, "0.25", "regression time t"},
    KeySpec{"drift_eps", ValueType::Number, "0.5", "regression look-ahead eps"},
    KeySpec{"drift_h", ValueType::Number, "0.25", "regression increment h"},
    KeySpec{"donsker_b", ValueType::Number, "0.0", "conditioning value B(t)"},
    KeySpec{"donsker_eps1", ValueType::Number, "1.0", "first look-ahead"},
    KeySpec{"donsker_eps2", ValueType::Number, "2.0", "second look-ahead"},
    KeySpec{"y1_min", ValueType::Number, "-3.0", "table grid"},
    KeySpec{"y1_max", ValueType::Number, "3.0", "table grid"},
    KeySpec{"y1_steps", ValueType::Count, "7", "table grid"},
    KeySpec{"y2_min", ValueType::Number, "-3.0", "table grid"},
    KeySpec{"y2_max", ValueType::Number, "3.0", "table grid"},
    KeySpec{"y2_steps", ValueType::Count, "7", "table grid"},
};

const KeySpec& find_key(std::string_view key) {
  for (const auto& spec : kSchema) {
    if (spec.name == key) return spec;
  }
  throw ValidationError("unknown config key '" + std::string(key) + "'");
}

[[noreturn]] void bad_value(std::string_view key, std::string_view expected, const Json& value) {
  throw ValidationError("config key '" + std::string(key) + "' expects " + std::string(expected) +
                        ", got " + value.dump());
}

double as_number(std::string_view key, const Json& value) {
  if (!value.is_number()) bad_value(key, "a number", value);
  const double x = value.get<double>();
  if (!std::isfinite(x)) bad_value(key, "a finite number", value);
  return x;
}

std::uint64_t as_count(std::string_view key, const Json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) {
    if (value.get<std::int64_t>() < 0) bad_value(key, "a non-negative integer", value);
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  if (value.is_number_float()) {
    const double x = value.get<double>();
    // 2e5 arrives as a float; accept it when it is an exact integer.
    if (x >= 0.0 && x < 0x1p63 && std::floor(x) == x) return static_cast<std::uint64_t>(x);
  }
  bad_value(key, "a non-negative integer", value);
}

Json number_array(std::string_view key, const Json& value) {
  if (!value.is_array()) bad_value(key, "an array of numbers", value);
  Json out = Json::array();
  for (const auto& item : value) out.push_back(as_number(key, item));
  return out;
}

}  // namespace

std::span<const KeySpec> config_schema() { return kSchema; }

Json default_config() {
  Json config = Json::object();
  for (const auto& spec : kSchema) config[std::string(spec.name)] = coerce(spec.name, Json::parse(spec.default_json));
  return config;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  Json config;
  try {
    config = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  if (!config.is_object()) throw ValidationError("config file " + path.string() + " must hold a JSON object");
  return config;
}

Json coerce(std::string_view key, const Json& value) {
  const KeySpec& spec = find_key(key);
  switch (spec.type) {
    case ValueType::Number:
      return as_number(key, value);
    case ValueType::Count:
      return as_count(key, value);
    case ValueType::Flag:
      if (!value.is_boolean()) bad_value(key, "true or false", value);
      return value;
    case ValueType::Text:
      if (!value.is_string()) bad_value(key, "a string", value);
      return value;
    case ValueType::NumberList:
      return number_array(key, value);
    case ValueType::OptionalNumber:
      if (value.is_null()) return value;
      return as_number(key, value);
    case ValueType::StepFunction: {
      if (value.is_number()) return as_number(key, value);
      if (!value.is_object() || value.size() != 2 || !value.contains("starts") || !value.contains("values")) {
        bad_value(key, "a number or {\"starts\": [...], \"values\": [...]}", value);
      }
      return Json{{"starts", number_array(key, value.at("starts"))},
                  {"values", number_array(key, value.at("values"))}};
    }
  }
  bad_value(key, "a known type", value);
}

Json parse_override_value(std::string_view key, std::string_view text) {
  if (find_key(key).type == ValueType::Text) return Json(std::string(text));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    throw ValidationError("config key '" + std::string(key) + "': cannot parse value '" + std::string(text) + "'");
  }
  return coerce(key, value);
}

void merge_into(Json& base, const Json& layer) {
  for (auto it = layer.begin(); it != layer.end(); ++it) base[it.key()] = coerce(it.key(), it.value());
}

std::string canonical_dump(const Json& config) {
  // nlohmann::json objects are std::map-backed, so dump() is already sorted.
  return config.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t config_digest(const Json& config) { return fnv1a64(canonical_dump(config)); }

std::string digest_hex(std::uint64_t digest) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(digest));
  return buffer;
}

namespace {

PiecewiseConstant step_function(const Json& value) {
  if (value.is_number()) return PiecewiseConstant::constant(value.get<double>());
  return PiecewiseConstant(value.at("starts").get<std::vector<double>>(),
                           value.at("values").get<std::vector<double>>());
}

}  // namespace

MarketCoefficients market_from(const Json& config) {
  return MarketCoefficients(step_function(config.at("alpha")), step_function(config.at("beta")),
                            config.at("T").get<double>(), config.at("x0").get<double>());
}

ExperimentConfig experiment_from(const Json& config, unsigned threads) {
  const double horizon = config.at("T").get<double>();
  EpsilonSchedule schedule = parse_schedule(config.at("schedule").get<std::string>(), horizon);
  Strategy strategy = parse_strategy(config.at("strategy").get<std::string>(), schedule);
  ExperimentConfig cfg{.market = market_from(config), .schedule = std::move(schedule), .strategy = std::move(strategy), .wealth = {}};
  cfg.n_paths = config.at("paths").get<std::size_t>();
  cfg.base_points = config.at("base_points").get<std::size_t>();
  cfg.delta = config.at("delta").get<double>();
  cfg.master_seed = config.at("seed").get<std::uint64_t>();
  cfg.antithetic = config.at("antithetic").get<bool>();
  cfg.threads = threads;
  if (!config.at("pi_cap").is_null()) cfg.wealth.pi_cap = config.at("pi_cap").get<double>();
  return cfg;
}

}  // namespace insider::cli
