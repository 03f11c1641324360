// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "surfcut/error.hpp"
#include "surfcut/kernels.hpp"

namespace surfcut {

void ImplicitSurface::sdf_batch(std::span<const double> x, std::span<const double> y,
                                std::span<const double> z, std::span<double> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sdf(Vec3(x[i], y[i], z[i]));
}

Torus::Torus(double major_radius, double minor_radius)
    : major_(major_radius), minor_(minor_radius) {
  if (!(minor_ > 0.0 && major_ > minor_)) {
    std::ostringstream msg;
    msg << "torus requires R > r > 0, got R=" << major_ << " r=" << minor_;
    throw GeometryError(msg.str());
  }
}

double Torus::area() const { return 4.0 * std::numbers::pi * std::numbers::pi * major_ * minor_; }

double Torus::sdf(const Vec3& x) const {
  // Same operation order as kernels::torus_sdf.
  const double s = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  const double d = s - major_;
  const double q = std::sqrt(x[2] * x[2] + d * d);
  return q - minor_;
}

void Torus::sdf_batch(std::span<const double> x, std::span<const double> y,
                      std::span<const double> z, std::span<double> out) const {
  kernels::torus_sdf(x, y, z, major_, minor_, out);
}

void Torus::centre_offset(const Vec3& x, Vec3& centre, Vec3& offset) const {
  const double s = std::hypot(x[0], x[1]);
  if (s == 0.0) {
    std::ostringstream msg;
    msg << "closest point undefined on the torus axis at (" << x.transpose() << ")";
    throw GeometryError(msg.str());
  }
  centre = Vec3(major_ * x[0] / s, major_ * x[1] / s, 0.0);
  offset = x - centre;
  const double q = offset.norm();
  if (q == 0.0) {
    std::ostringstream msg;
    msg << "closest point undefined on the centre circle at (" << x.transpose() << ")";
    throw GeometryError(msg.str());
  }
  if (q - minor_ > minor_) {
    std::ostringstream msg;
    msg << "point (" << x.transpose() << ") lies outside the tube |rho| <= " << minor_;
    throw GeometryError(msg.str());
  }
}

Vec3 Torus::closest_point(const Vec3& x) const {
  Vec3 centre;
  Vec3 offset;
  centre_offset(x, centre, offset);
  return centre + minor_ * offset / offset.norm();
}

SurfaceFrame Torus::frame_at(const Vec3& x) const {
  Vec3 centre;
  Vec3 offset;
  centre_offset(x, centre, offset);
  const double q = offset.norm();
  const double s = std::hypot(x[0], x[1]);

  SurfaceFrame frame;
  frame.normal = offset / q;
  frame.point = centre + minor_ * frame.normal;
  frame.distance = q - minor_;
  frame.projector = Mat3::Identity() - frame.normal * frame.normal.transpose();
  // grad n = (P - (R/s) e_phi e_phi^T) / q with e_phi the azimuthal direction.
  const Vec3 e_phi(-x[1] / s, x[0] / s, 0.0);
  frame.shape_operator =
      (frame.projector - (major_ / s) * e_phi * e_phi.transpose()) / q;
  return frame;
}

void plane_basis(const Vec3& n, Vec3& xi1, Vec3& xi2) {
  int axis = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
  xi1 = Vec3::Unit(axis).cross(n).normalized();
  xi2 = n.cross(xi1);
}

BMapResult b_map(const SurfaceFrame& frame, const Vec3& facet_normal) {
  const Mat3 facet_projector = Mat3::Identity() - facet_normal * facet_normal.transpose();
  const Mat3 stretch = Mat3::Identity() - frame.distance * frame.shape_operator;
  const double stretch_det = stretch.determinant();
  if (!(std::abs(stretch_det) > 1e-14)) throw GeometryError("b_map: I - rho H is singular");

  BMapResult out;
  out.map = frame.projector * stretch * facet_projector;
  out.inverse = facet_projector * stretch.inverse() * frame.projector;

  Vec3 xi1;
  Vec3 xi2;
  plane_basis(facet_normal, xi1, xi2);
  Mat3 columns;
  columns.col(0) = out.map * xi1;
  columns.col(1) = out.map * xi2;
  columns.col(2) = frame.normal;
  out.det = std::abs(columns.determinant());
  return out;
}

BMapResult b_map(const ImplicitSurface& surface, const Vec3& x, const Vec3& facet_normal) {
  return b_map(surface.frame_at(x), facet_normal);
}

namespace {

Vec3 benchmark_beta_raw(const Vec3& p) {
  const double x = p[0];
  const double y = p[1];
  const double z = p[2];
  return {x * x * y * z, x, y * z * z * z};
}

double benchmark_u(const Vec3& p) {
  const double x = p[0];
  const double y = p[1];
  const double g = 0.5 * x + (x - 1.0) * (x - 1.0) + 0.5 * y + (y - 1.0);
  return g * std::exp(-x * (x - 1.0) - y * (y - 1.0));
}

Vec3 benchmark_grad_u(const Vec3& p) {
  const double x = p[0];
  const double y = p[1];
  const double g = 0.5 * x + (x - 1.0) * (x - 1.0) + 0.5 * y + (y - 1.0);
  const double e = std::exp(-x * (x - 1.0) - y * (y - 1.0));
  return {(0.5 + 2.0 * (x - 1.0) - g * (2.0 * x - 1.0)) * e,
          (1.5 - g * (2.0 * y - 1.0)) * e,
          0.0};
}

}  // namespace

ProblemFields benchmark_fields() {
  return {[](const Vec3&) { return 1.0; }, benchmark_beta_raw, benchmark_u, benchmark_grad_u};
}

ProblemFields constant_fields(double c, double alpha_value, bool zero_beta) {
  ProblemFields f;
  f.alpha = [alpha_value](const Vec3&) { return alpha_value; };
  if (zero_beta)
    f.beta_raw = [](const Vec3&) { return Vec3::Zero().eval(); };
  else
    f.beta_raw = benchmark_beta_raw;
  f.u = [c](const Vec3&) { return c; };
  f.grad_u = [](const Vec3&) { return Vec3::Zero().eval(); };
  return f;
}

ProblemFields linear_fields(const Vec3& a, double d, bool zero_beta) {
  ProblemFields f;
  f.alpha = [](const Vec3&) { return 1.0; };
  if (zero_beta)
    f.beta_raw = [](const Vec3&) { return Vec3::Zero().eval(); };
  else
    f.beta_raw = benchmark_beta_raw;
  f.u = [a, d](const Vec3& p) { return a.dot(p) + d; };
  f.grad_u = [a](const Vec3&) { return a; };
  return f;
}

ProblemData::ProblemData(std::shared_ptr<const ImplicitSurface> surface, ProblemFields fields)
    : surface_(std::move(surface)), fields_(std::move(fields)) {}

double ProblemData::alpha(const SurfaceFrame& frame) const { return fields_.alpha(frame.point); }

Vec3 ProblemData::beta(const SurfaceFrame& frame) const {
  return frame.projector * fields_.beta_raw(frame.point);
}

double ProblemData::exact(const SurfaceFrame& frame) const { return fields_.u(frame.point); }

Vec3 ProblemData::exact_surface_gradient(const SurfaceFrame& frame) const {
  return frame.projector * fields_.grad_u(frame.point);
}

double ProblemData::rhs(const SurfaceFrame& frame) const {
  return beta(frame).dot(exact_surface_gradient(frame)) + alpha(frame) * exact(frame);
}

double ProblemData::alpha(const Vec3& x) const { return alpha(surface_->frame_at(x)); }
Vec3 ProblemData::beta(const Vec3& x) const { return beta(surface_->frame_at(x)); }
double ProblemData::exact(const Vec3& x) const { return fields_.u(surface_->closest_point(x)); }
Vec3 ProblemData::exact_surface_gradient(const Vec3& x) const {
  return exact_surface_gradient(surface_->frame_at(x));
}
double ProblemData::rhs(const Vec3& x) const { return rhs(surface_->frame_at(x)); }

double surface_divergence_fd(const ProblemData& data, const Vec3& x, double step) {
  const SurfaceFrame frame = data.surface().frame_at(x);
  Mat3 jacobian;
  for (int k = 0; k < 3; ++k) {
    const Vec3 dx = step * Vec3::Unit(k);
    jacobian.col(k) = (data.beta(x + dx) - data.beta(x - dx)) / (2.0 * step);
  }
  return (frame.projector * jacobian * frame.projector).trace();
}

}  // namespace surfcut
