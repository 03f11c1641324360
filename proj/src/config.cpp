// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "surfcut/error.hpp"

namespace surfcut {

std::string_view version() { return SURFCUT_VERSION; }

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view key, const std::string& what) {
  std::ostringstream msg;
  if (!where.empty()) msg << where << ": ";
  msg << key << ": " << what;
  throw ConfigError(msg.str());
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view where, std::string_view key) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    fail(where, key, "expected a finite number, got '" + std::string(text) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view where,
                               std::string_view key) {
  std::vector<double> out;
  std::string buf(text);
  for (char& c : buf)
    if (c == ',') c = ' ';
  std::istringstream in(buf);
  std::string token;
  while (in >> token) out.push_back(parse_double(token, where, key));
  if (out.empty()) fail(where, key, "expected at least one number");
  return out;
}

bool parse_bool(std::string_view text, std::string_view where, std::string_view key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(where, key, "expected true or false, got '" + std::string(text) + "'");
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_shortest(values[i]);
  }
  return out;
}

}  // namespace

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string format_full(double value) {
  std::array<char, 64> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

void apply_setting(ExperimentConfig& config, std::string_view key_in, std::string_view value,
                   std::string_view where) {
  std::string key(trim(key_in));
  for (char& c : key)
    if (c == '-') c = '_';
  value = trim(value);

  if (key == "R") {
    config.major_radius = parse_double(value, where, key);
  } else if (key == "r") {
    config.minor_radius = parse_double(value, where, key);
  } else if (key == "box_lo" || key == "box_hi") {
    const auto v = parse_list(value, where, key);
    if (v.size() != 3) fail(where, key, "expected three coordinates");
    (key == "box_lo" ? config.box_lo : config.box_hi) = Vec3(v[0], v[1], v[2]);
  } else if (key == "h") {
    config.h = parse_list(value, where, key);
  } else if (key == "c_F") {
    config.c_F = parse_list(value, where, key);
  } else if (key == "coefficient_mode") {
    try {
      config.mode = parse_coefficient_mode(value);
    } catch (const ConfigError& e) {
      fail(where, key, e.what());
    }
  } else if (key == "rel_tol") {
    config.rel_tol = parse_double(value, where, key);
  } else if (key == "max_iterations") {
    const double v = parse_double(value, where, key);
    if (v != std::floor(v) || v < 1 || v > 1e9) fail(where, key, "expected a positive integer");
    config.max_iterations = static_cast<int>(v);
  } else if (key == "rel_change") {
    config.rel_change = parse_double(value, where, key);
  } else if (key == "output_dir") {
    if (value.empty()) fail(where, key, "must not be empty");
    config.output_dir = std::string(value);
  } else if (key == "export_obj") {
    config.export_obj = parse_bool(value, where, key);
  } else if (key == "export_solution") {
    config.export_solution = parse_bool(value, where, key);
  } else if (key == "export_matrix") {
    config.export_matrix = parse_bool(value, where, key);
  } else if (key == "allow_unstabilized") {
    config.allow_unstabilized = parse_bool(value, where, key);
  } else {
    fail(where, key, "unknown key");
  }
}

void parse_config(std::istream& in, std::string_view source, ExperimentConfig& config) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream msg;
      msg << where << ": expected 'key = value'";
      throw ConfigError(msg.str());
    }
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key");
    apply_setting(config, key, text.substr(eq + 1), where);
  }
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  parse_config(in, path, config);
}

void validate(const ExperimentConfig& c) {
  if (!(c.minor_radius > 0.0)) fail("", "r", "minor radius must be positive");
  if (!(c.major_radius > c.minor_radius))
    fail("", "R", "major radius must exceed the minor radius");
  for (int a = 0; a < 3; ++a)
    if (!(c.box_hi[a] > c.box_lo[a])) fail("", "box_hi", "each coordinate must exceed box_lo");
  if (c.h.empty()) fail("", "h", "needs at least one value");
  if (c.c_F.empty()) fail("", "c_F", "needs at least one value");
  for (double h : c.h) {
    if (!(h > 0.0)) fail("", "h", "values must be positive");
    for (int a = 0; a < 3; ++a) {
      const double n = (c.box_hi[a] - c.box_lo[a]) / h;
      const double rounded = std::round(n);
      if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
        fail("", "h", format_shortest(h) + " does not divide box edge " + std::to_string(a) +
                          " into an integer number of cells");
    }
  }
  for (double cf : c.c_F) {
    if (cf < 0.0) fail("", "c_F", "must be non-negative");
    if (cf == 0.0 && !c.allow_unstabilized)
      fail("", "c_F", "0 disables stabilization; pass --allow-unstabilized to run it anyway");
  }
  if (!(c.rel_tol > 0.0)) fail("", "rel_tol", "must be positive");
  if (!(c.rel_change > 0.0)) fail("", "rel_change", "must be positive");
}

std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& c) {
  auto vec = [](const Vec3& v) {
    return format_shortest(v[0]) + ", " + format_shortest(v[1]) + ", " + format_shortest(v[2]);
  };
  return {
      {"R", format_shortest(c.major_radius)},
      {"r", format_shortest(c.minor_radius)},
      {"box_lo", vec(c.box_lo)},
      {"box_hi", vec(c.box_hi)},
      {"h", join(c.h)},
      {"c_F", join(c.c_F)},
      {"coefficient_mode", std::string(to_string(c.mode))},
      {"rel_tol", format_shortest(c.rel_tol)},
      {"max_iterations", std::to_string(c.max_iterations)},
      {"rel_change", format_shortest(c.rel_change)},
      {"output_dir", c.output_dir},
      {"export_obj", c.export_obj ? "true" : "false"},
      {"export_solution", c.export_solution ? "true" : "false"},
      {"export_matrix", c.export_matrix ? "true" : "false"},
      {"allow_unstabilized", c.allow_unstabilized ? "true" : "false"},
  };
}

}  // namespace surfcut
