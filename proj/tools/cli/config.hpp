#pragma once

// Experiment configuration for the command-line tool.
//
// A configuration is a flat JSON object with a fixed set of keys (see
// config_schema()). Values are resolved in three layers: built-in defaults,
// then the --config file, then inline overrides. After resolution every key
// is present with a canonical type, so the sorted-key dump is a stable
// identity for the run and its FNV-1a hash is the config digest.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "insider_lab/market.hpp"
#include "insider_lab/montecarlo.hpp"

namespace insider::cli {

using Json = nlohmann::json;

enum class ValueType {
  Number,        ///< double
  Count,         ///< unsigned 64-bit integer
  Flag,          ///< bool
  Text,          ///< string
  NumberList,    ///< array of doubles
  OptionalNumber,
  StepFunction,  ///< number, or {"starts": [...], "values": [...]}
};

struct KeySpec {
  std::string_view name;
  ValueType type;
  std::string_view default_json;
  std::string_view help;
};

std::span<const KeySpec> config_schema();

/// Defaults for every key.
Json default_config();

/// Reads a JSON object from disk; the top level must be an object.
Json load_config_file(const std::filesystem::path& path);

/// Coerces `value` to the canonical type of `key`. Throws ValidationError
/// naming the key for unknown keys and ill-typed values.
Json coerce(std::string_view key, const Json& value);

/// Parses a textual override. Text keys take the raw string; other keys
/// parse it as JSON, so "deltas=[0.1,0.01]" and "pi_cap=null" both work.
Json parse_override_value(std::string_view key, std::string_view text);

/// Applies every key of `layer` on top of `base`.
void merge_into(Json& base, const Json& layer);

/// Compact sorted-key serialization.
std::string canonical_dump(const Json& config);

std::uint64_t fnv1a64(std::string_view bytes);

/// fnv1a64(canonical_dump(config)).
std::uint64_t config_digest(const Json& config);

std::string digest_hex(std::uint64_t digest);

MarketCoefficients market_from(const Json& config);

/// The Monte Carlo experiment described by a resolved config. Threads are
/// not part of the config because they never change results.
ExperimentConfig experiment_from(const Json& config, unsigned threads);

}  // namespace insider::cli
