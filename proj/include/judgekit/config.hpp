#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "judgekit/client.hpp"
#include "judgekit/errors.hpp"
#include "judgekit/judge.hpp"
#include "judgekit/pipeline.hpp"

namespace judgekit {

inline std::optional<Weighting> weighting_from_string(const std::string& s) {
  if (s == "unweighted") return Weighting::unweighted;
  if (s == "linear") return Weighting::linear;
  if (s == "quadratic") return Weighting::quadratic;
  return std::nullopt;
}

inline std::optional<BinningRule> binning_from_string(const std::string& s) {
  if (s == "pool") return BinningRule::partial_pool;
  if (s == "nearest") return BinningRule::nearest;
  return std::nullopt;
}

/// Everything the CLI reads from a config file. Any value here can be
/// overridden by a command-line flag; flags win.
struct ToolConfig {
  TierThresholds thresholds{};
  Weighting weighting = Weighting::quadratic;
  BinningRule binning = BinningRule::partial_pool;
  std::vector<double> sensitivity_thresholds{0.5, 1.0, 1.5, 1.96};
  double max_failure_rate = 0.10;
  EndpointConfig endpoint{};
};

namespace detail {

struct ConfigLine {
  std::string section;
  std::string key;
  std::string value;  // raw, unquoted for strings
  std::size_t line_no = 0;
};

inline std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline double parse_config_number(const ConfigLine& line) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(line.value, &consumed);
    if (consumed != line.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line.line_no, "expected a number for '" + line.key + "'");
  }
}

inline bool parse_config_bool(const ConfigLine& line) {
  if (line.value == "true") return true;
  if (line.value == "false") return false;
  throw ParseError(line.line_no, "expected true or false for '" + line.key + "'");
}

inline std::string parse_config_string(const ConfigLine& line) {
  const std::string& v = line.value;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  throw ParseError(line.line_no, "expected a quoted string for '" + line.key + "'");
}

inline std::vector<double> parse_config_number_array(const ConfigLine& line) {
  const std::string& v = line.value;
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ParseError(line.line_no, "expected an array for '" + line.key + "'");
  }
  std::vector<double> out;
  std::string body = v.substr(1, v.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string token = strip(body.substr(pos, comma - pos));
    if (!token.empty()) {
      ConfigLine element{line.section, line.key, token, line.line_no};
      out.push_back(parse_config_number(element));
    }
    pos = comma + 1;
  }
  if (out.empty()) {
    throw ParseError(line.line_no, "array for '" + line.key + "' is empty");
  }
  return out;
}

}  // namespace detail

/// Parses the TOML-style key/value config document. Supported syntax:
/// comments (#), [section] headers, and key = value with quoted strings,
/// numbers, booleans, and flat number arrays. Unknown keys are rejected so
/// typos fail loudly.
inline ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file " + path.string());
  }
  ToolConfig cfg;
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    // strip comments outside quotes
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line = line.substr(0, i);
        break;
      }
    }
    line = detail::strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(line_no, "unterminated section header");
      }
      section = detail::strip(line.substr(1, line.size() - 2));
      if (section != "endpoint") {
        throw ParseError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected key = value");
    }
    detail::ConfigLine entry{section, detail::strip(line.substr(0, eq)),
                             detail::strip(line.substr(eq + 1)), line_no};
    if (entry.key.empty() || entry.value.empty()) {
      throw ParseError(line_no, "expected key = value");
    }

    if (entry.section.empty()) {
      if (entry.key == "r_threshold") {
        cfg.thresholds.r_threshold = detail::parse_config_number(entry);
      } else if (entry.key == "z_threshold") {
        cfg.thresholds.z_threshold = detail::parse_config_number(entry);
      } else if (entry.key == "strict_z_boundary") {
        cfg.thresholds.strict_z_boundary = detail::parse_config_bool(entry);
      } else if (entry.key == "weighting") {
        const std::string v = detail::parse_config_string(entry);
        const auto w = weighting_from_string(v);
        if (!w) throw ParseError(line_no, "unknown weighting '" + v + "'");
        cfg.weighting = *w;
      } else if (entry.key == "binning") {
        const std::string v = detail::parse_config_string(entry);
        const auto b = binning_from_string(v);
        if (!b) throw ParseError(line_no, "unknown binning rule '" + v + "'");
        cfg.binning = *b;
      } else if (entry.key == "sensitivity_thresholds") {
        cfg.sensitivity_thresholds = detail::parse_config_number_array(entry);
      } else if (entry.key == "max_failure_rate") {
        cfg.max_failure_rate = detail::parse_config_number(entry);
      } else {
        throw ParseError(line_no, "unknown key '" + entry.key + "'");
      }
    } else {  // [endpoint]
      if (entry.key == "base_url") {
        cfg.endpoint.base_url = detail::parse_config_string(entry);
      } else if (entry.key == "model_id") {
        cfg.endpoint.model_id = detail::parse_config_string(entry);
      } else if (entry.key == "timeout_ms") {
        cfg.endpoint.timeout =
            std::chrono::milliseconds(static_cast<long long>(detail::parse_config_number(entry)));
      } else if (entry.key == "max_parallel") {
        cfg.endpoint.max_parallel =
            static_cast<std::size_t>(detail::parse_config_number(entry));
      } else if (entry.key == "max_retries") {
        cfg.endpoint.max_retries = static_cast<std::size_t>(detail::parse_config_number(entry));
      } else if (entry.key == "temperature") {
        cfg.endpoint.temperature = detail::parse_config_number(entry);
      } else if (entry.key == "requests_per_second") {
        cfg.endpoint.requests_per_second = detail::parse_config_number(entry);
      } else {
        throw ParseError(line_no, "unknown key '" + entry.key + "' in [endpoint]");
      }
    }
  }
  return cfg;
}

}  // namespace judgekit
