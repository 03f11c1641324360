// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace surfcut;
using Catch::Approx;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_T x^a y^b over the reference triangle (0,0), (1,0), (0,1).
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

TEST_CASE("rules integrate every monomial up to their degree", "[quadrature]") {
  for (int degree : {2, 3, 4}) {
    const auto& rule = triangle_rule(degree);
    CHECK(rule.degree == degree);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
          s += rule.weights[q] * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
        INFO("degree " << degree << " monomial x^" << a << " y^" << b);
        CHECK(std::abs(0.5 * s - monomial_integral(a, b)) < 1e-15);
      }
  }
}

TEST_CASE("rule sizes, weights and points", "[quadrature]") {
  CHECK(triangle_rule(2).size() == 3);
  CHECK(triangle_rule(4).size() == 6);
  for (int degree : {2, 3, 4}) {
    const auto& rule = triangle_rule(degree);
    double total = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      total += rule.weights[q];
      double bary = 0.0;
      for (double l : rule.points[q]) {
        CHECK(l >= 0.0);
        bary += l;
      }
      CHECK(bary == Approx(1.0).epsilon(1e-15));
    }
    // Scaled by the reference area.
    CHECK(0.5 * total == Approx(0.5).epsilon(1e-15));
  }
  CHECK(std::abs(0.5 * [] {
          const auto& r = triangle_rule(3);
          double s = 0.0;
          for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q][1], 3);
          return s;
        }() - 1.0 / 20.0) < 1e-15);
  CHECK_THROWS_AS(triangle_rule(1), ConfigError);
  CHECK_THROWS_AS(triangle_rule(5), ConfigError);
}

TEST_CASE("degree 4 fails to integrate degree 5", "[quadrature]") {
  const auto& rule = triangle_rule(4);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q][1], 5);
  CHECK(std::abs(0.5 * s - monomial_integral(5, 0)) > 1e-8);
}

TEST_CASE("P1 basis on a tet", "[quadrature]") {
  const std::array<Vec3, 4> v{Vec3(0.1, 0.2, 0.0), Vec3(1.3, 0.1, 0.2), Vec3(0.2, 1.1, -0.1),
                              Vec3(0.3, 0.4, 0.9)};
  for (int i = 0; i < 4; ++i) {
    const auto e = p1_eval_and_grad(v, v[i]);
    for (int j = 0; j < 4; ++j) CHECK(e.values[j] == Approx(i == j ? 1.0 : 0.0).margin(1e-14));
  }
  const auto c = p1_eval_and_grad(v, 0.25 * (v[0] + v[1] + v[2] + v[3]));
  for (double x : c.values) CHECK(x == Approx(0.25).epsilon(1e-14));
  Vec3 g = Vec3::Zero();
  for (const auto& gi : c.gradients) g += gi;
  CHECK(g.norm() < 1e-13);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto basis = p1_basis(v);
  CHECK(basis.volume > 0.0);
  for (int k = 0; k < 200; ++k) {
    double l[4] = {U(rng), U(rng), U(rng), U(rng)};
    const double s = l[0] + l[1] + l[2] + l[3];
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < 4; ++i) x += l[i] / s * v[i];
    const auto vals = basis.values(x);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      sum += vals[i];
      CHECK(vals[i] == Approx(l[i] / s).margin(1e-13));
    }
    CHECK(sum == Approx(1.0).epsilon(1e-13));
    // Gradients are the derivative of the values.
    const Vec3 d(1e-3, -2e-3, 5e-4);
    const auto moved = basis.values(x + d);
    for (int i = 0; i < 4; ++i) CHECK(moved[i] - vals[i] == Approx(basis.gradients[i].dot(d)).margin(1e-13));
  }
}

TEST_CASE("P1 evaluation rejects outside points and flat tets", "[quadrature]") {
  const std::array<Vec3, 4> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  CHECK_NOTHROW(p1_eval_and_grad(v, Vec3(-1e-12, 0.3, 0.3)));
  CHECK_THROWS(p1_eval_and_grad(v, Vec3(-0.1, 0.3, 0.3)));
  const std::array<Vec3, 4> flat{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 1e-16)};
  CHECK_THROWS_AS(p1_basis(flat), GeometryError);
}

TEST_CASE("tangential gradient", "[quadrature]") {
  const Vec3 n = Vec3(1, 2, 2) / 3.0;
  CHECK(tangential_gradient(4.0 * n, n).norm() < 1e-15);
  const Vec3 t = Vec3(2, -1, 0).normalized();
  CHECK((tangential_gradient(t, n) - t).norm() < 1e-15);
  CHECK((tangential_gradient(Vec3(1, 1, 0), Vec3(0, 0, 1)) - Vec3(1, 1, 0)).norm() == 0.0);
  std::mt19937_64 rng(47);
  std::normal_distribution<double> N;
  for (int i = 0; i < 100; ++i) {
    const Vec3 m = Vec3(N(rng), N(rng), N(rng)).normalized();
    CHECK(std::abs(tangential_gradient(Vec3(N(rng), N(rng), N(rng)), m).dot(m)) < 1e-12);
  }
}

TEST_CASE("traces of linear functions on torus facets", "[quadrature][property]") {
  const Torus torus(1.0, 0.5);
  const auto level = test::torus_level(0.2, torus);
  const Vec3 c(0.7, -1.3, 2.1);
  const double d = 0.4;
  const auto& rule = triangle_rule(4);
  for (const auto& f : level.cut.facets) {
    std::array<Vec3, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = level.mesh.vertices[level.mesh.tets[f.parent_tet][i]];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = rule.map(q, f.vertices[0], f.vertices[1], f.vertices[2]);
      const auto e = p1_eval_and_grad(v, x);
      double value = 0.0;
      Vec3 grad = Vec3::Zero();
      for (int i = 0; i < 4; ++i) {
        value += e.values[i] * (c.dot(v[i]) + d);
        grad += (c.dot(v[i]) + d) * e.gradients[i];
      }
      CHECK(std::abs(value - (c.dot(x) + d)) < 1e-13);
      CHECK((grad - c).norm() < 1e-12);
    }
  }
}
