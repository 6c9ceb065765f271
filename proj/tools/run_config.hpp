#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bboxlab/experiments.hpp"

namespace bboxlab::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char* kSeedEnvVar = "BBOXLAB_SEED";

/// Everything an experiment command reads. Serialized field names are the
/// ones accepted in --config files.
struct RunConfig {
  SimConfig sim;  // sim.kinds doubles as the kind list of the sampling studies
  std::size_t samples = 100000;
  SampleDomain domain = SampleDomain::Unit;
};

/// Built-in defaults for one of gradmag, correlate, simulate, align, gradcheck.
RunConfig defaults_for(std::string_view command);

/// Overlays the keys present in `doc` onto `config`. A run manifest is
/// accepted as well; its "config" member is used. Unknown keys and bad
/// values raise ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& doc);

void apply_config_file(RunConfig& config, const std::string& path);

/// Fully materialized form, suitable for apply_json().
nlohmann::json to_json(const RunConfig& config);

std::uint64_t parse_seed(std::string_view text);

/// "4:1" or "0.25" style ratio; returns width / height.
double parse_ratio(std::string_view text);
std::vector<double> parse_number_list(std::string_view text, bool ratios);
Point parse_point(std::string_view text);

}  // namespace bboxlab::cli
