// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "surfcut/config.hpp"

namespace surfcut {

/// Single h and c_F. Writes gamma_h.obj, solution.txt, report.csv (and
/// matrix.mtx, rhs.txt with export_matrix) into config.output_dir.
void cmd_solve(const ExperimentConfig& config, std::ostream& log);

/// Several decreasing h, single c_F. Writes convergence.csv row by row; a
/// failing level leaves the rows so far plus a `# FAILED` marker, then
/// rethrows.
void cmd_convergence(const ExperimentConfig& config, std::ostream& log);

/// Every (c_F, h) pair. Writes condition.csv with one slope row per c_F.
/// Estimator failures mark their row and the sweep continues; the call then
/// throws ConvergenceError after the file is complete.
void cmd_condition(const ExperimentConfig& config, std::ostream& log);

/// `surfcut solve|convergence|condition [--config FILE] [--key value ...]`.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace surfcut
