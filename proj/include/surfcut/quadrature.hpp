// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "surfcut/geometry.hpp"

namespace surfcut {

/// Symmetric positive-weight rule on a triangle. Weights sum to one; scale
/// by the physical area at the use site.
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;  ///< barycentric coordinates
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
  /// Physical location of point q on triangle (a, b, c).
  [[nodiscard]] Vec3 map(std::size_t q, const Vec3& a, const Vec3& b, const Vec3& c) const {
    return points[q][0] * a + points[q][1] * b + points[q][2] * c;
  }
};

/// degree 2: 3 edge midpoints; degree 3: 6-point full orbit; degree 4:
/// 6-point rule. Anything else throws ConfigError.
[[nodiscard]] const TriangleRule& triangle_rule(int degree);

/// Linear Lagrange basis on one tetrahedron.
struct P1TetBasis {
  std::array<Vec3, 4> vertices;
  std::array<Vec3, 4> gradients;  ///< constant per tet, sum to zero
  double volume = 0.0;

  /// Barycentric coordinates of x. No containment check.
  [[nodiscard]] std::array<double, 4> values(const Vec3& x) const;
};

/// Throws GeometryError if the volume is below 1e-14 (max edge)^3.
[[nodiscard]] P1TetBasis p1_basis(const std::array<Vec3, 4>& vertices);

struct P1Evaluation {
  std::array<double, 4> values;
  std::array<Vec3, 4> gradients;
};

/// Throws GeometryError if x lies outside the tet by more than 1e-10 in any
/// barycentric coordinate, or if the tet is degenerate.
[[nodiscard]] P1Evaluation p1_eval_and_grad(const std::array<Vec3, 4>& vertices, const Vec3& x);

/// (I - n n^T) g
[[nodiscard]] inline Vec3 tangential_gradient(const Vec3& g, const Vec3& n) {
  return g - n * n.dot(g);
}

}  // namespace surfcut
