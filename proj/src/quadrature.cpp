// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surfcut/error.hpp"

namespace surfcut {
namespace {

void add_orbit3(TriangleRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({a, a, b});
  rule.points.push_back({a, b, a});
  rule.points.push_back({b, a, a});
  rule.weights.insert(rule.weights.end(), 3, w);
}

void add_orbit6(TriangleRule& rule, double a, double b, double c, double w) {
  for (const auto& p : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                        std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}}) {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  }
}

TriangleRule make_degree2() {
  TriangleRule rule;
  rule.degree = 2;
  rule.points = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  return rule;
}

// Barycentrics are the roots of t^3 - t^2 + t/4 - 1/60, which matches the
// second and third symmetric moments of the triangle.
TriangleRule make_degree3() {
  TriangleRule rule;
  rule.degree = 3;
  add_orbit6(rule, 0.65902762237409221517838077125540, 0.23193336855303057249678456117469,
             0.10903900907287721232483466756991, 1.0 / 6.0);
  return rule;
}

TriangleRule make_degree4() {
  TriangleRule rule;
  rule.degree = 4;
  add_orbit3(rule, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
  add_orbit3(rule, 0.091576213509770743459571463402202, 0.10995174365532186763832632490021);
  return rule;
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const TriangleRule d2 = make_degree2();
  static const TriangleRule d3 = make_degree3();
  static const TriangleRule d4 = make_degree4();
  switch (degree) {
    case 2:
      return d2;
    case 3:
      return d3;
    case 4:
      return d4;
    default:
      throw ConfigError("unsupported triangle quadrature degree " + std::to_string(degree) +
                        " (expected 2, 3 or 4)");
  }
}

std::array<double, 4> P1TetBasis::values(const Vec3& x) const {
  std::array<double, 4> out;
  double rest = 1.0;
  for (int i = 1; i < 4; ++i) {
    out[i] = gradients[i].dot(x - vertices[0]);
    rest -= out[i];
  }
  out[0] = rest;
  return out;
}

P1TetBasis p1_basis(const std::array<Vec3, 4>& vertices) {
  P1TetBasis basis;
  basis.vertices = vertices;
  Mat3 jacobian;
  double max_edge = 0.0;
  for (int i = 0; i < 3; ++i) jacobian.col(i) = vertices[i + 1] - vertices[0];
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) max_edge = std::max(max_edge, (vertices[i] - vertices[j]).norm());
  const double det = jacobian.determinant();
  basis.volume = std::abs(det) / 6.0;
  if (!(basis.volume >= 1e-14 * max_edge * max_edge * max_edge))
    throw GeometryError("degenerate tetrahedron (volume " + std::to_string(basis.volume) + ")");
  // Rows of J^{-1} are the gradients of barycentrics 1..3.
  const Mat3 inv = jacobian.inverse();
  basis.gradients[0] = Vec3::Zero();
  for (int i = 1; i < 4; ++i) {
    basis.gradients[i] = inv.row(i - 1).transpose();
    basis.gradients[0] -= basis.gradients[i];
  }
  return basis;
}

P1Evaluation p1_eval_and_grad(const std::array<Vec3, 4>& vertices, const Vec3& x) {
  const P1TetBasis basis = p1_basis(vertices);
  P1Evaluation out;
  out.values = basis.values(x);
  out.gradients = basis.gradients;
  for (double v : out.values)
    if (v < -1e-10) throw GeometryError("p1_eval_and_grad: point outside tetrahedron");
  return out;
}

}  // namespace surfcut
