// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace surfcut {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  config = 1,
  geometry = 2,
  solver = 3,
  convergence = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Geometry and mesh failures share one category.
class GeometryError : public Error {
public:
  explicit GeometryError(const std::string& what) : Error(ErrorKind::geometry, what) {}
};

class SolverError : public Error {
public:
  explicit SolverError(const std::string& what) : Error(ErrorKind::solver, what) {}
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_value, int iterations)
      : Error(ErrorKind::convergence, what), last_value_(last_value), iterations_(iterations) {}
  [[nodiscard]] double last_value() const noexcept { return last_value_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }

private:
  double last_value_;
  int iterations_;
};

}  // namespace surfcut
