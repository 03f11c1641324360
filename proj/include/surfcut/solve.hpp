// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "surfcut/assembly.hpp"

namespace surfcut {

/// Sparse LU with partial pivoting (COLAMD column ordering). Factorizes on
/// construction; throws SolverError when the factorization breaks down or
/// the smallest pivot is below 1e-14 of the largest.
class SparseLu {
public:
  explicit SparseLu(const CsrMatrix& A);
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
  /// Solves A^T x = b with the same factors.
  [[nodiscard]] std::vector<double> solve_transposed(std::span<const double> b) const;
  /// min |U_jj| / max |U_jj|
  [[nodiscard]] double pivot_ratio() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

[[nodiscard]] double norm2(std::span<const double> v);

/// Direct solve. The returned vector satisfies |A u - b| <= rel_tol |b|;
/// any breakdown or residual violation throws SolverError.
[[nodiscard]] std::vector<double> solve(const LinearSystem& system, double rel_tol = 1e-10);

[[nodiscard]] double relative_residual(const CsrMatrix& A, std::span<const double> u,
                                       std::span<const double> b);

struct ErrorReport {
  double h = 0.0;
  double l2_error = 0.0;      ///< ||u^e - u_h|| on Gamma_h
  double energy_error = 0.0;  ///< |||u^e - u_h|||_h
  double grad_error = 0.0;    ///< ||grad_{Gamma_h}(u^e - u_h)|| on Gamma_h
  double streamline = 0.0;    ///< ||beta_h . grad_{Gamma_h}(u^e - u_h)||
  double jump = 0.0;          ///< ||[n_F . grad u_h]|| over the stabilization faces
};

/// Error of a discrete solution (indexed by dofs) against the exact solution
/// of `data`, using the degree-4 rule on every facet (or `degree`).
[[nodiscard]] ErrorReport error_norms(std::span<const double> u_h, const DofMap& dofs,
                                      const BackgroundMesh& mesh, const CutSurfaceMesh& cut,
                                      const ProblemData& data, const AssemblyParams& params,
                                      int degree = 4);

struct ConvergenceRow {
  double h = 0.0;
  std::size_t dofs = 0;
  ErrorReport errors;
  std::optional<double> eoc_l2;
  std::optional<double> eoc_energy;
  std::optional<double> eoc_grad;
};

/// log(coarse / fine) / log(h_coarse / h_fine); absent if an error is zero.
[[nodiscard]] std::optional<double> eoc(double error_coarse, double error_fine, double h_coarse,
                                        double h_fine);
/// Fills the rate columns of rows 1.. from their predecessors. Throws
/// ConfigError unless there are >= 2 rows with strictly decreasing h.
void compute_eoc(std::vector<ConvergenceRow>& rows);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConditionOptions {
  int max_iterations = 5000;
  double rel_change = 1e-8;
};

struct ConditionReport {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = 0.0;
  int iterations_max = 0;
  int iterations_min = 0;
  double change_max = 0.0;  ///< last relative eigenvalue change, power iteration
  double change_min = 0.0;  ///< same for inverse iteration
};

/// kappa = sigma_max / sigma_min in the spectral norm: power iteration on
/// A^T A and inverse iteration with the LU factors of A. Throws
/// ConvergenceError if either iteration exhausts max_iterations.
[[nodiscard]] ConditionReport condition_number(const CsrMatrix& A,
                                               const ConditionOptions& options = {});

}  // namespace surfcut
