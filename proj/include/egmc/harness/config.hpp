// SPDX-License-Identifier: Apache-2.0
//
// Experiment description: a flat key=value settings map with units carried
// in the key names, loaded from a config file and overridden from the CLI.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "egmc/errors.hpp"

namespace egmc::harness {

enum class ExperimentKind { run1d, run3d, calibrate1d, calibrate3d, noise_profile, inaccuracy_sweep, figure_repro };
enum class OutputFormat { csv, json };

inline constexpr std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::run1d: return "run1d";
    case ExperimentKind::run3d: return "run3d";
    case ExperimentKind::calibrate1d: return "calibrate1d";
    case ExperimentKind::calibrate3d: return "calibrate3d";
    case ExperimentKind::noise_profile: return "noise";
    case ExperimentKind::inaccuracy_sweep: return "inaccuracy";
    case ExperimentKind::figure_repro: return "repro";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::run1d, ExperimentKind::run3d, ExperimentKind::calibrate1d,
                 ExperimentKind::calibrate3d, ExperimentKind::noise_profile, ExperimentKind::inaccuracy_sweep,
                 ExperimentKind::figure_repro}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline const std::vector<std::string>& valid_figures() {
  static const std::vector<std::string> figs = {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9"};
  return figs;
}

/// Every key accepted in a config file.
inline const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys = {
      "experiment",      "figure",          "D_um2_per_s",       "L_um",       "R_um",
      "r_x_um",          "dt_s",            "n_steps",           "n_particles", "alpha",
      "seed",            "n_repeats",       "alpha_min",         "alpha_max",  "alpha_points",
      "step_ratio_min",  "step_ratio_max",  "step_ratio_points", "output",     "format",
      "threads"};
  return keys;
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::run3d;
  std::map<std::string, std::string> settings;  ///< physical and numerical parameters
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;

  bool has(const std::string& key) const { return settings.contains(key); }
  std::optional<std::string> get(const std::string& key) const {
    auto it = settings.find(key);
    if (it == settings.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace detail

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigurationError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigurationError("key '" + key + "': '" + text + "' is not a non-negative integer");
  }
  return v;
}

/// Apply one key=value pair; routes the non-physical keys to their fields.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  const auto& keys = valid_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigurationError("unknown key '" + key + "'; valid keys: " + detail::join(keys));
  }
  if (key == "experiment") {
    const auto k = parse_kind(value);
    if (!k) throw ConfigurationError("unknown experiment '" + value + "'");
    spec.kind = *k;
  } else if (key == "output") {
    spec.output_path = value;
  } else if (key == "format") {
    if (value == "csv") {
      spec.format = OutputFormat::csv;
    } else if (value == "json") {
      spec.format = OutputFormat::json;
    } else {
      throw ConfigurationError("format must be csv or json, got '" + value + "'");
    }
  } else if (key == "threads") {
    spec.threads = static_cast<unsigned>(parse_uint(key, value));
  } else {
    spec.settings[key] = value;
  }
}

/// Parse "key = value" lines; '#' starts a comment.
inline ExperimentSpec parse_config(std::istream& in, ExperimentSpec spec = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("line " + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(spec, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
  }
  return spec;
}

inline ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
  return parse_config(in);
}

/// Recover the experiment that produced a result file from its metadata
/// header (CSV "# key=value" lines or the JSON "metadata" object).
inline ExperimentSpec load_result_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read result file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::pair<std::string, std::string>> entries;
  if (const auto first = text.find_first_not_of(" \t\r\n"); first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("metadata")) throw ConfigurationError("'" + path + "' has no metadata");
    for (const auto& [k, v] : j["metadata"].items()) entries.emplace_back(k, v.get<std::string>());
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line) && line.starts_with("#")) {
      const std::string body = detail::trim(std::string_view(line).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) entries.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    }
  }

  ExperimentSpec spec;
  bool found = false;
  const auto& keys = valid_keys();
  for (const auto& [k, v] : entries) {
    if (k == "output" || k == "format" || k == "threads") continue;
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) continue;
    apply_setting(spec, k, v);
    found = found || k == "experiment";
  }
  if (!found) throw ConfigurationError("'" + path + "' does not name the experiment that produced it");
  return spec;
}

}  // namespace egmc::harness
