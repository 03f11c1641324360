// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact surface description: signed distance, closest-point projection,
// differential quantities, the B map between discrete and exact tangent
// planes, and the manufactured problem data posed on the surface.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>

namespace surfcut {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Differential data of the distance function at an ambient point x in the
/// tubular neighbourhood.
struct SurfaceFrame {
  Vec3 point;            ///< closest point p(x) on the surface
  Vec3 normal;           ///< n = grad rho(x) = n(p(x))
  Mat3 projector;        ///< P = I - n n^T
  Mat3 shape_operator;   ///< H = Hessian of rho at x
  double distance = 0.0; ///< rho(x)
};

/// Contract shared by analytic implicit surfaces. rho must be an exact
/// signed distance (negative inside) in a tube around the surface.
class ImplicitSurface {
public:
  virtual ~ImplicitSurface() = default;

  [[nodiscard]] virtual double sdf(const Vec3& x) const = 0;
  [[nodiscard]] virtual Vec3 closest_point(const Vec3& x) const = 0;
  [[nodiscard]] virtual SurfaceFrame frame_at(const Vec3& x) const = 0;

  /// Batched sdf over structure-of-arrays coordinates.
  virtual void sdf_batch(std::span<const double> x, std::span<const double> y,
                         std::span<const double> z, std::span<double> out) const;
};

/// Ring torus centred at the origin with symmetry axis z.
class Torus final : public ImplicitSurface {
public:
  /// Throws GeometryError unless major > minor > 0.
  Torus(double major_radius, double minor_radius);

  [[nodiscard]] double major_radius() const { return major_; }
  [[nodiscard]] double minor_radius() const { return minor_; }
  [[nodiscard]] double area() const;

  /// Defined everywhere, including the z-axis where every centre-circle
  /// point is equidistant.
  [[nodiscard]] double sdf(const Vec3& x) const override;
  /// Requires |rho(x)| <= r, x off the z-axis and off the centre circle.
  [[nodiscard]] Vec3 closest_point(const Vec3& x) const override;
  [[nodiscard]] SurfaceFrame frame_at(const Vec3& x) const override;

  void sdf_batch(std::span<const double> x, std::span<const double> y, std::span<const double> z,
                 std::span<double> out) const override;

private:
  // Nearest centre-circle point c(x) and the offset x - c; validates x.
  void centre_offset(const Vec3& x, Vec3& centre, Vec3& offset) const;

  double major_;
  double minor_;
};

struct BMapResult {
  Mat3 map;          ///< B = P_Gamma (I - rho H) P_h
  double det = 1.0;  ///< |B|, the surface measure ratio dGamma / dGamma_h
  Mat3 inverse;      ///< P_h (I - rho H)^{-1} P_Gamma
};

/// Orthonormal basis {xi1, xi2} of the plane with unit normal n: xi1 is
/// normalize(e_k x n) for the axis e_k least aligned with n (lowest index on
/// ties), xi2 = n x xi1.
void plane_basis(const Vec3& n, Vec3& xi1, Vec3& xi2);

/// B map at a point x of a facet with unit normal facet_normal.
[[nodiscard]] BMapResult b_map(const ImplicitSurface& surface, const Vec3& x,
                               const Vec3& facet_normal);
[[nodiscard]] BMapResult b_map(const SurfaceFrame& frame, const Vec3& facet_normal);

/// Coefficient and solution fields in ambient form. They are only ever
/// evaluated at surface points p(x).
struct ProblemFields {
  std::function<double(const Vec3&)> alpha;
  std::function<Vec3(const Vec3&)> beta_raw;  ///< projected onto T_p Gamma at use
  std::function<double(const Vec3&)> u;
  std::function<Vec3(const Vec3&)> grad_u;    ///< ambient gradient of u
};

/// Torus benchmark: alpha = 1, beta = P(x^2 y z, x, y z^3),
/// u = (0.5x + (x-1)^2 + 0.5y + (y-1)) exp(-x(x-1) - y(y-1)).
[[nodiscard]] ProblemFields benchmark_fields();
/// u = c, beta as in the benchmark unless zero_beta, alpha = alpha_value.
[[nodiscard]] ProblemFields constant_fields(double c, double alpha_value = 1.0,
                                            bool zero_beta = false);
/// u = a.x + d with the benchmark beta (or zero) and alpha = 1.
[[nodiscard]] ProblemFields linear_fields(const Vec3& a, double d, bool zero_beta = false);

/// Problem data bound to a surface. Every accessor evaluates at p(x), so the
/// results are the normal-constant extensions.
class ProblemData {
public:
  ProblemData(std::shared_ptr<const ImplicitSurface> surface, ProblemFields fields);

  [[nodiscard]] const ImplicitSurface& surface() const { return *surface_; }
  [[nodiscard]] const ProblemFields& fields() const { return fields_; }

  [[nodiscard]] double alpha(const Vec3& x) const;
  [[nodiscard]] Vec3 beta(const Vec3& x) const;
  [[nodiscard]] double exact(const Vec3& x) const;
  /// Surface gradient P grad u at p(x).
  [[nodiscard]] Vec3 exact_surface_gradient(const Vec3& x) const;
  /// f = beta . grad_Gamma u + alpha u at p(x).
  [[nodiscard]] double rhs(const Vec3& x) const;

  // Variants reusing a frame already computed at x.
  [[nodiscard]] double alpha(const SurfaceFrame& frame) const;
  [[nodiscard]] Vec3 beta(const SurfaceFrame& frame) const;
  [[nodiscard]] double exact(const SurfaceFrame& frame) const;
  [[nodiscard]] Vec3 exact_surface_gradient(const SurfaceFrame& frame) const;
  [[nodiscard]] double rhs(const SurfaceFrame& frame) const;

private:
  std::shared_ptr<const ImplicitSurface> surface_;
  ProblemFields fields_;
};

/// Surface divergence of the extended beta by central differences of the
/// ambient Jacobian: tr(P grad(beta^e) P). Diagnostic only.
[[nodiscard]] double surface_divergence_fd(const ProblemData& data, const Vec3& x,
                                           double step = 1e-5);

}  // namespace surfcut
