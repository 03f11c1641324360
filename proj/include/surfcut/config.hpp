// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "surfcut/assembly.hpp"

namespace surfcut {

[[nodiscard]] std::string_view version();

struct ExperimentConfig {
  double major_radius = 1.0;
  double minor_radius = 0.5;
  Vec3 box_lo{-1.6, -1.6, -0.6};
  Vec3 box_hi{1.6, 1.6, 0.6};
  std::vector<double> h{0.2};
  std::vector<double> c_F{1e-2};
  CoefficientMode mode = CoefficientMode::pointwise;
  double rel_tol = 1e-10;
  int max_iterations = 5000;  ///< condition estimator
  double rel_change = 1e-8;   ///< condition estimator
  std::string output_dir = "out";
  bool export_obj = true;
  bool export_solution = true;
  bool export_matrix = false;
  bool allow_unstabilized = false;
};

/// Sets one key from its text value. `where` prefixes error messages
/// (e.g. "run.conf:12"). Keys: R, r, box_lo, box_hi, h, c_F,
/// coefficient_mode, rel_tol, max_iterations, rel_change, output_dir,
/// export_obj, export_solution, export_matrix, allow_unstabilized.
/// Dashes in keys are read as underscores.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   std::string_view where);

/// Flat `key = value` lines; `#` starts a comment. Later keys win.
void parse_config(std::istream& in, std::string_view source, ExperimentConfig& config);
void load_config_file(const std::string& path, ExperimentConfig& config);

/// Checks that hold for every command: radii, box, h divisibility, c_F sign,
/// tolerances. Throws ConfigError naming the field.
void validate(const ExperimentConfig& config);

/// Resolved config as (key, text) pairs in a fixed order; values round-trip
/// through apply_setting.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& config);

/// Shortest text that parses back to the same double.
[[nodiscard]] std::string format_shortest(double value);
/// 17 significant digits.
[[nodiscard]] std::string format_full(double value);

}  // namespace surfcut
