#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace bboxlab::cli {

using nlohmann::json;

namespace {

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

double ratio_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_ratio(v.get<std::string>());
  throw ConfigError("ratios must be numbers or \"w:h\" strings");
}

std::vector<double> numbers_from_json(const json& v, const char* key, bool ratios) {
  if (v.is_string()) return parse_number_list(v.get<std::string>(), ratios);
  if (!v.is_array()) throw ConfigError(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const json& item : v) {
    if (ratios) {
      out.push_back(ratio_from_json(item));
    } else if (item.is_number()) {
      out.push_back(item.get<double>());
    } else {
      throw ConfigError(std::string(key) + " entries must be numbers");
    }
  }
  return out;
}

std::vector<LossKind> kinds_from_json(const json& v) {
  try {
    if (v.is_string()) return parse_loss_kinds(v.get<std::string>());
    if (!v.is_array()) throw ConfigError("kinds must be an array of names");
    std::vector<LossKind> out;
    for (const json& item : v) out.push_back(parse_loss_kind(item.get<std::string>()));
    return out;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kinds: ") + e.what());
  }
}

template <class T>
T number_as(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        throw ConfigError(std::string(key) + " must be non-negative");
      }
    }
  }
  return v.get<T>();
}

}  // namespace

RunConfig defaults_for(std::string_view command) {
  RunConfig config;
  if (command == "gradmag") {
    config.sim.kinds = {LossKind::IoU, LossKind::GIoU, LossKind::DIoU, LossKind::SO,
                        LossKind::SCA};
  } else if (command == "gradcheck") {
    config.sim.kinds.assign(kAllLossKinds.begin(), kAllLossKinds.end());
    config.samples = 10000;
    config.domain = SampleDomain::OffTie;
  } else if (command == "align") {
    config.sim.kinds = {LossKind::CenterDist, LossKind::CD};
  }
  return config;
}

double parse_ratio(std::string_view text) {
  const std::size_t colon = text.find(':');
  double ratio = 0.0;
  if (colon == std::string_view::npos) {
    ratio = parse_double(text, "ratio");
  } else {
    const double w = parse_double(text.substr(0, colon), "ratio");
    const double h = parse_double(text.substr(colon + 1), "ratio");
    if (!(h > 0.0)) throw ConfigError("invalid ratio '" + std::string(text) + "'");
    ratio = w / h;
  }
  if (!(ratio > 0.0)) throw ConfigError("ratio must be positive: '" + std::string(text) + "'");
  return ratio;
}

std::vector<double> parse_number_list(std::string_view text, bool ratios) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    out.push_back(ratios ? parse_ratio(item) : parse_double(item, "number"));
    start = comma + 1;
  }
  return out;
}

Point parse_point(std::string_view text) {
  const std::vector<double> v = parse_number_list(text, false);
  if (v.size() != 2) throw ConfigError("expected a point 'x,y', got '" + std::string(text) + "'");
  return {v[0], v[1]};
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t seed = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, seed);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid seed '" + std::string(text) + "'");
  }
  return seed;
}

void apply_json(RunConfig& config, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (doc.contains("config")) {
    apply_json(config, doc.at("config"));
    return;
  }
  static const std::set<std::string> known = {
      "grid",  "grid_spacing", "anchor_ratios", "anchor_scales", "gt_ratios", "gt_center",
      "gt_area", "eta",      "iters",         "kinds",         "alpha",     "seed",
      "samples", "domain",
  };
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  SimConfig& sim = config.sim;
  try {
    if (doc.contains("grid")) sim.grid = number_as<int>(doc["grid"], "grid");
    if (doc.contains("grid_spacing")) {
      sim.grid_spacing = number_as<double>(doc["grid_spacing"], "grid_spacing");
    }
    if (doc.contains("anchor_ratios")) {
      sim.anchor_ratios = numbers_from_json(doc["anchor_ratios"], "anchor_ratios", true);
    }
    if (doc.contains("anchor_scales")) {
      sim.anchor_scales = numbers_from_json(doc["anchor_scales"], "anchor_scales", false);
    }
    if (doc.contains("gt_ratios")) {
      sim.gt_ratios = numbers_from_json(doc["gt_ratios"], "gt_ratios", true);
    }
    if (doc.contains("gt_center")) {
      const auto v = numbers_from_json(doc["gt_center"], "gt_center", false);
      if (v.size() != 2) throw ConfigError("gt_center must have two entries");
      sim.gt_center = {v[0], v[1]};
    }
    if (doc.contains("gt_area")) sim.gt_area = number_as<double>(doc["gt_area"], "gt_area");
    if (doc.contains("eta")) sim.eta = number_as<double>(doc["eta"], "eta");
    if (doc.contains("iters")) sim.iters = number_as<int>(doc["iters"], "iters");
    if (doc.contains("kinds")) sim.kinds = kinds_from_json(doc["kinds"]);
    if (doc.contains("alpha")) sim.alpha = number_as<double>(doc["alpha"], "alpha");
    if (doc.contains("seed")) sim.seed = number_as<std::uint64_t>(doc["seed"], "seed");
    if (doc.contains("samples")) {
      config.samples = number_as<std::size_t>(doc["samples"], "samples");
    }
    if (doc.contains("domain")) {
      config.domain = parse_sample_domain(doc["domain"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_json(config, doc);
}

json to_json(const RunConfig& config) {
  const SimConfig& sim = config.sim;
  json kinds = json::array();
  for (LossKind k : sim.kinds) kinds.push_back(std::string(to_string(k)));
  return {
      {"grid", sim.grid},
      {"grid_spacing", sim.grid_spacing},
      {"anchor_ratios", sim.anchor_ratios},
      {"anchor_scales", sim.anchor_scales},
      {"gt_ratios", sim.gt_ratios},
      {"gt_center", {sim.gt_center.x, sim.gt_center.y}},
      {"gt_area", sim.gt_area},
      {"eta", sim.eta},
      {"iters", sim.iters},
      {"kinds", kinds},
      {"alpha", sim.alpha},
      {"seed", sim.seed},
      {"samples", config.samples},
      {"domain", std::string(to_string(config.domain))},
  };
}

}  // namespace bboxlab::cli
