// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/solve.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "surfcut/error.hpp"
#include "surfcut/kernels.hpp"
#include "surfcut/parallel.hpp"

namespace surfcut {
namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Exposes the diagonal of U, which SparseLU keeps in its supernodal L store.
class PivotedLu : public Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> {
public:
  [[nodiscard]] double pivot_ratio() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index j = 0; j < cols(); ++j) {
      double diag = 0.0;
      for (typename SCMatrix::InnerIterator it(m_Lstore, j); it; ++it)
        if (it.index() == j) {
          diag = std::abs(it.value());
          break;
        }
      lo = std::min(lo, diag);
      hi = std::max(hi, diag);
    }
    return hi > 0.0 ? lo / hi : 0.0;
  }
};

ColMatrix to_eigen(const CsrMatrix& A) {
  const Eigen::Map<const RowMatrix> view(A.rows, A.cols, static_cast<Eigen::Index>(A.nonzeros()),
                                         A.row_ptr.data(), A.col.data(), A.values.data());
  ColMatrix out = view;
  out.makeCompressed();
  return out;
}

}  // namespace

struct SparseLu::Impl {
  ColMatrix matrix;
  PivotedLu lu;
};

SparseLu::SparseLu(const CsrMatrix& A) : impl_(std::make_unique<Impl>()) {
  if (A.rows != A.cols || A.rows < 1) throw SolverError("LU needs a non-empty square matrix");
  impl_->matrix = to_eigen(A);
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
  const double ratio = impl_->lu.pivot_ratio();
  if (!(ratio >= 1e-14)) {
    std::ostringstream msg;
    msg << "matrix is numerically singular (pivot ratio " << ratio << ")";
    throw SolverError(msg.str());
  }
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

std::vector<double> SparseLu::solve(std::span<const double> b) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> SparseLu::solve_transposed(std::span<const double> b) const {
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->lu.transpose().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

double SparseLu::pivot_ratio() const { return impl_->lu.pivot_ratio(); }

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

double relative_residual(const CsrMatrix& A, std::span<const double> u,
                         std::span<const double> b) {
  std::vector<double> r = A.multiply(u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

std::vector<double> solve(const LinearSystem& system, double rel_tol) {
  const CsrMatrix& A = system.A;
  for (int i = 0; i < A.rows; ++i) {
    bool zero = true;
    for (auto k = A.row_ptr[i]; k < A.row_ptr[i + 1] && zero; ++k) zero = A.values[k] == 0.0;
    if (zero) throw SolverError("matrix row " + std::to_string(i) + " is identically zero");
  }
  const SparseLu lu(A);
  std::vector<double> u = lu.solve(system.b);
  for (double v : u)
    if (!std::isfinite(v)) throw SolverError("solution contains non-finite values");
  const double residual = relative_residual(A, u, system.b);
  if (!(residual <= rel_tol)) {
    std::ostringstream msg;
    msg << "relative residual " << residual << " exceeds tolerance " << rel_tol;
    throw SolverError(msg.str());
  }
  return u;
}

ErrorReport error_norms(std::span<const double> u_h, const DofMap& dofs,
                        const BackgroundMesh& mesh, const CutSurfaceMesh& cut,
                        const ProblemData& data, const AssemblyParams& params, int degree) {
  if (u_h.size() != dofs.size()) throw SolverError("solution size does not match the DOF map");
  const TriangleRule& rule = triangle_rule(degree);
  const BetaField beta(cut, data, params.mode);

  struct Sums {
    double l2 = 0.0;
    double grad = 0.0;
    double stream = 0.0;
  };
  std::vector<Sums> per_element(cut.elements.size());
  parallel_for(cut.elements.size(), [&](std::size_t e) {
    const CutElement& element = cut.elements[e];
    const auto& tet = mesh.tets[static_cast<std::size_t>(element.tet)];
    const P1TetBasis basis = p1_basis({mesh.vertices[tet[0]], mesh.vertices[tet[1]],
                                       mesh.vertices[tet[2]], mesh.vertices[tet[3]]});
    std::array<double, 4> coeffs;
    Vec3 grad_uh = Vec3::Zero();
    for (int i = 0; i < 4; ++i) {
      coeffs[i] = u_h[static_cast<std::size_t>(dofs.dof_of_vertex[tet[i]])];
      grad_uh += coeffs[i] * basis.gradients[i];
    }
    const Vec3 tangential_uh = tangential_gradient(grad_uh, element.normal);

    Sums& s = per_element[e];
    for (int f = element.first_facet; f < element.first_facet + element.facet_count; ++f) {
      const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 x = rule.map(q, facet.vertices[0], facet.vertices[1], facet.vertices[2]);
        const double w = facet.area * rule.weights[q];
        const SurfaceFrame frame = data.surface().frame_at(x);
        const BMapResult b = b_map(frame, element.normal);
        const auto phi = basis.values(x);
        double uh = 0.0;
        for (int i = 0; i < 4; ++i) uh += coeffs[i] * phi[i];
        const double err = data.exact(frame) - uh;
        const Vec3 grad_err = b.map.transpose() * data.exact_surface_gradient(frame) - tangential_uh;
        const double streamline = beta(static_cast<int>(e), frame).dot(grad_err);
        s.l2 += w * err * err;
        s.grad += w * grad_err.squaredNorm();
        s.stream += w * streamline * streamline;
      }
    }
  });

  std::vector<double> per_face(cut.faces.size());
  parallel_for(cut.faces.size(), [&](std::size_t f) {
    const FaceJump j = face_jump(mesh, cut.faces[f]);
    double jump = 0.0;
    for (int k = 0; k < j.count; ++k)
      jump += j.jump[k] * u_h[static_cast<std::size_t>(dofs.dof_of_vertex[j.vertices[k]])];
    per_face[f] = cut.faces[f].area * jump * jump;
  });

  Sums total;
  for (const Sums& s : per_element) {
    total.l2 += s.l2;
    total.grad += s.grad;
    total.stream += s.stream;
  }
  double jump_sq = 0.0;
  for (double v : per_face) jump_sq += v;

  ErrorReport report;
  report.h = params.h;
  report.l2_error = std::sqrt(total.l2);
  report.grad_error = std::sqrt(total.grad);
  report.streamline = std::sqrt(total.stream);
  report.jump = std::sqrt(jump_sq);
  report.energy_error = std::sqrt(total.l2 + params.h * total.stream + params.h * jump_sq);
  return report;
}

std::optional<double> eoc(double error_coarse, double error_fine, double h_coarse,
                          double h_fine) {
  if (!(error_coarse > 0.0) || !(error_fine > 0.0)) return std::nullopt;
  return std::log(error_coarse / error_fine) / std::log(h_coarse / h_fine);
}

void compute_eoc(std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) throw ConfigError("convergence rates need at least two mesh levels");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const ConvergenceRow& c = rows[i - 1];
    ConvergenceRow& f = rows[i];
    if (!(f.h < c.h)) throw ConfigError("mesh sizes must be strictly decreasing");
    f.eoc_l2 = eoc(c.errors.l2_error, f.errors.l2_error, c.h, f.h);
    f.eoc_energy = eoc(c.errors.energy_error, f.errors.energy_error, c.h, f.h);
    f.eoc_grad = eoc(c.errors.grad_error, f.errors.grad_error, c.h, f.h);
  }
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
}

}  // namespace

ConditionReport condition_number(const CsrMatrix& A, const ConditionOptions& options) {
  if (A.rows != A.cols || A.rows < 1) throw SolverError("condition number needs a square matrix");
  const auto n = static_cast<std::size_t>(A.rows);
  const CsrMatrix At = A.transpose();
  ConditionReport report;

  // Largest eigenvalue of A^T A.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  std::vector<double> z(n);
  double lambda = 0.0;
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    A.multiply(x, y);
    At.multiply(y, z);
    const double next = kernels::dot(x, z);
    report.change_max = std::abs(next - lambda) / std::abs(next);
    lambda = next;
    report.iterations_max = it;
    x = z;
    normalize(x);
    if (it > 1 && report.change_max < options.rel_change) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("power iteration for sigma_max did not converge", std::sqrt(lambda),
                           report.iterations_max);
  report.sigma_max = std::sqrt(lambda);

  // Largest eigenvalue of (A^T A)^{-1} = A^{-1} A^{-T}.
  const SparseLu lu(A);
  x.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double mu = 0.0;
  converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    z = lu.solve(lu.solve_transposed(x));
    const double next = kernels::dot(x, z);
    report.change_min = std::abs(next - mu) / std::abs(next);
    mu = next;
    report.iterations_min = it;
    x = z;
    normalize(x);
    if (it > 1 && report.change_min < options.rel_change) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("inverse iteration for sigma_min did not converge", 1.0 / std::sqrt(mu),
                           report.iterations_min);
  report.sigma_min = 1.0 / std::sqrt(mu);
  report.kappa = report.sigma_max / report.sigma_min;
  return report;
}

}  // namespace surfcut
