// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared test oracles. Nothing here calls into the production quadrature or
// extraction code, so the checks stay independent of what they check.

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "surfcut/assembly.hpp"
#include "surfcut/error.hpp"
#include "surfcut/mesh.hpp"
#include "surfcut/solve.hpp"

namespace surfcut::test {

/// Plane n.x = offset; p is affine, so linear ambient data stays linear
/// after extension.
class Plane final : public ImplicitSurface {
public:
  Plane(const Vec3& normal, double offset) : n_(normal.normalized()), d_(offset) {}

  double sdf(const Vec3& x) const override { return n_.dot(x) - d_; }
  Vec3 closest_point(const Vec3& x) const override { return x - sdf(x) * n_; }
  SurfaceFrame frame_at(const Vec3& x) const override {
    SurfaceFrame f;
    f.distance = sdf(x);
    f.point = x - f.distance * n_;
    f.normal = n_;
    f.projector = Mat3::Identity() - n_ * n_.transpose();
    f.shape_operator = Mat3::Zero();
    return f;
  }

private:
  Vec3 n_;
  double d_;
};

/// Gauss-Legendre on [0, 1] via Golub-Welsch.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = v0 * v0;  // 2 v0^2 on [-1, 1], halved for [0, 1]
  }
}

struct OracleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;  ///< sum to 1
};

/// Collapsed (Duffy) n x n Gauss product rule on the triangle, exact for
/// degree 2n - 2.
inline OracleRule duffy_rule(int n = 5) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  OracleRule r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double l1 = x[i];
      const double l2 = x[j] * (1.0 - x[i]);
      r.bary.push_back({1.0 - l1 - l2, l1, l2});
      r.weights.push_back(2.0 * w[i] * w[j] * (1.0 - x[i]));
    }
  return r;
}

template <class F>
double integrate_facet(const OracleRule& rule, const CutFacet& f, F&& g) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Vec3 x = rule.bary[q][0] * f.vertices[0] + rule.bary[q][1] * f.vertices[1] +
                   rule.bary[q][2] * f.vertices[2];
    s += rule.weights[q] * g(x);
  }
  return s * f.area;
}

/// One reference tetrahedron (0,0,0), e1, e2, e3 as a background mesh.
inline BackgroundMesh reference_tet_mesh() {
  BackgroundMesh m;
  m.lo = Vec3::Zero();
  m.hi = Vec3::Ones();
  m.cells = {1, 1, 1};
  m.h = 1.0;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.tets = {{0, 1, 2, 3}};
  m.faces = {{{0, 1, 2}, 0, -1}, {{0, 1, 3}, 0, -1}, {{0, 2, 3}, 0, -1}, {{1, 2, 3}, 0, -1}};
  m.tet_faces = {{3, 2, 1, 0}};
  return m;
}

struct Level {
  BackgroundMesh mesh;
  CutSurfaceMesh cut;
};

inline Level torus_level(double h, const Torus& torus) {
  Level l;
  l.mesh = build_background(Vec3(-1.6, -1.6, -0.6), Vec3(1.6, 1.6, 0.6), h);
  l.cut = extract_cut_surface(l.mesh, interpolate_levelset(l.mesh, torus));
  return l;
}

inline Eigen::MatrixXd dense(const CsrMatrix& A) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) D(i, A.col[k]) += A.values[k];
  return D;
}

/// Sets SURFCUT_THREADS for the lifetime of the guard.
class ThreadsGuard {
public:
  explicit ThreadsGuard(int n) {
    if (const char* old = std::getenv("SURFCUT_THREADS")) old_ = old, had_ = true;
    setenv("SURFCUT_THREADS", std::to_string(n).c_str(), 1);
  }
  ~ThreadsGuard() {
    if (had_)
      setenv("SURFCUT_THREADS", old_.c_str(), 1);
    else
      unsetenv("SURFCUT_THREADS");
  }
  ThreadsGuard(const ThreadsGuard&) = delete;
  ThreadsGuard& operator=(const ThreadsGuard&) = delete;

private:
  std::string old_;
  bool had_ = false;
};

}  // namespace surfcut::test
