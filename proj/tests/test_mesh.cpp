// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace surfcut;
using Catch::Approx;

namespace {

const auto torus = std::make_shared<Torus>(1.0, 0.5);

Vec3 level_gradient(const BackgroundMesh& mesh, const LevelSetField& field, int tet) {
  std::array<Vec3, 4> v;
  for (int i = 0; i < 4; ++i) v[i] = mesh.vertices[mesh.tets[tet][i]];
  const auto basis = p1_basis(v);
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 4; ++i) g += field.values[mesh.tets[tet][i]] * basis.gradients[i];
  return g;
}

std::string obj_text(const CutSurfaceMesh& cut) {
  std::ostringstream out;
  write_obj(out, cut);
  return out.str();
}

bool same_bits(const Vec3& a, const Vec3& b) { return std::memcmp(a.data(), b.data(), 24) == 0; }

}  // namespace

TEST_CASE("unit cube is six equal Kuhn tets", "[mesh]") {
  const auto m = build_background(Vec3::Zero(), Vec3::Ones(), std::array<int, 3>{1, 1, 1});
  CHECK(m.vertices.size() == 8);
  CHECK(m.tets.size() == 6);
  double total = 0.0;
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    CHECK(m.tet_volume(static_cast<int>(t)) == Approx(1.0 / 6.0).epsilon(1e-14));
    total += m.tet_volume(static_cast<int>(t));
  }
  CHECK(total == Approx(1.0).epsilon(1e-14));
  CHECK(m.h == 1.0);
}

TEST_CASE("face adjacency across two cubes", "[mesh]") {
  const auto m =
      build_background(Vec3::Zero(), Vec3(2, 1, 1), std::array<int, 3>{2, 1, 1});
  CHECK(m.tets.size() == 12);
  int interior = 0, boundary = 0;
  for (const auto& f : m.faces) (f.neighbor >= 0 ? interior : boundary)++;
  // Six faces inside each cube, two across the shared square, two
  // triangles per boundary square.
  CHECK(interior == 14);
  CHECK(boundary == 20);

  // Brute-force oracle: count tets per sorted vertex triple.
  std::map<std::array<int, 3>, int> uses;
  for (const auto& t : m.tets)
    for (int skip = 0; skip < 4; ++skip) {
      std::array<int, 3> key{};
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) key[k++] = t[i];
      std::sort(key.begin(), key.end());
      uses[key]++;
    }
  REQUIRE(uses.size() == m.faces.size());
  for (const auto& f : m.faces) CHECK(uses[f.vertices] == (f.neighbor >= 0 ? 2 : 1));
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    for (int i = 0; i < 4; ++i) {
      const auto& f = m.faces[m.tet_faces[t][i]];
      CHECK((f.owner == static_cast<int>(t) || f.neighbor == static_cast<int>(t)));
      CHECK(std::find(f.vertices.begin(), f.vertices.end(), m.tets[t][i]) == f.vertices.end());
    }
}

TEST_CASE("benchmark box at h = 0.2", "[mesh]") {
  const auto m = build_background(Vec3(-1.6, -1.6, -0.6), Vec3(1.6, 1.6, 0.6), 0.2);
  CHECK(m.cells == std::array<int, 3>{16, 16, 6});
  CHECK(m.tets.size() == 9216);
  CHECK(m.vertices.size() == 17 * 17 * 7);
  CHECK((m.vertices[m.vertex_id(16, 16, 6)] - Vec3(1.6, 1.6, 0.6)).norm() < 1e-14);
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    CHECK(m.tet_volume(static_cast<int>(t)) == Approx(0.008 / 6.0).epsilon(1e-10));
}

TEST_CASE("anisotropic or non-dividing requests are rejected", "[mesh]") {
  CHECK_THROWS_AS(build_background(Vec3::Zero(), Vec3(2, 1, 1), std::array<int, 3>{1, 1, 1}),
                  ConfigError);
  CHECK_THROWS_AS(build_background(Vec3::Zero(), Vec3(1, 1, 1), 0.3), ConfigError);
  CHECK_THROWS_AS(build_background(Vec3::Zero(), Vec3(1, 1, 1), 0.0), ConfigError);
}

TEST_CASE("level set interpolation and the zero shift", "[mesh]") {
  const auto m = build_background(Vec3(-1.6, -1.6, -0.6), Vec3(1.6, 1.6, 0.6), 0.1);
  const auto field = interpolate_levelset(m, *torus);
  // (1.5, 0, 0) is a grid vertex lying on the torus.
  const int on_surface = m.vertex_id(31, 16, 6);
  REQUIRE((m.vertices[on_surface] - Vec3(1.5, 0, 0)).norm() < 1e-12);
  CHECK(field.values[on_surface] == 1e-12 * m.h);
  double lo = 1e300, hi = -1e300;
  for (double v : field.values) {
    CHECK(v != 0.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < 0.0);
  CHECK(hi > 0.0);

  const auto shifted = make_levelset(m, std::vector<double>(m.vertices.size(), 0.0));
  for (double v : shifted.values) CHECK(v == 1e-12 * m.h);
  CHECK_THROWS_AS(make_levelset(m, {1.0}), GeometryError);
}

TEST_CASE("single tet with one negative vertex", "[mesh]") {
  const auto m = test::reference_tet_mesh();
  const auto cut = extract_cut_surface(m, make_levelset(m, {-1, 1, 1, 1}));
  REQUIRE(cut.facets.size() == 1);
  const auto& f = cut.facets[0];
  std::set<std::array<double, 3>> got;
  for (const auto& v : f.vertices) got.insert({v[0], v[1], v[2]});
  CHECK(got == std::set<std::array<double, 3>>{{0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 0.5}});
  CHECK(f.area == Approx(std::sqrt(3.0) / 8.0).epsilon(1e-15));
  CHECK((f.normal - Vec3(1, 1, 1).normalized()).norm() < 1e-15);
  CHECK(cut.active_tets == std::vector<int>{0});
  CHECK(cut.faces.empty());
}

TEST_CASE("single tet with a two-two split", "[mesh]") {
  const auto m = test::reference_tet_mesh();
  const auto cut = extract_cut_surface(m, make_levelset(m, {-1, -1, 1, 1}));
  REQUIRE(cut.facets.size() == 2);
  double area = 0.0;
  for (const auto& f : cut.facets) {
    area += f.area;
    CHECK((f.normal - Vec3(0, 1, 1).normalized()).norm() < 1e-15);
    for (const auto& v : f.vertices) CHECK(v[1] + v[2] == Approx(0.5).epsilon(1e-15));
  }
  CHECK(area == Approx(0.25 * std::sqrt(2.0)).epsilon(1e-14));

  // Monte-Carlo oracle: the plane y + z = 0.5 parametrized by (x, y) has
  // area element sqrt(2); count parameters landing inside the tet.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int samples = 400000;
  int inside = 0;
  for (int i = 0; i < samples; ++i) {
    const double x = U(rng), y = U(rng), z = 0.5 - y;
    if (z >= 0 && x + y + z <= 1) ++inside;
  }
  const double mc = std::sqrt(2.0) * inside / samples;
  CHECK(area == Approx(mc).epsilon(0.01));
  CHECK(cut.elements.size() == 1);
  CHECK(cut.elements[0].facet_count == 2);
  CHECK(cut.elements[0].area == Approx(area).epsilon(1e-15));
}

TEST_CASE("tet without sign change has no facet", "[mesh]") {
  const auto m = test::reference_tet_mesh();
  const auto cut = extract_cut_surface(m, make_levelset(m, {1, 2, 3, 4}));
  CHECK(cut.empty());
  CHECK(cut.active_tets.empty());
  CHECK(cut.element_of_tet == std::vector<int>{-1});
}

TEST_CASE("torus cut surface invariants", "[mesh][property]") {
  const auto m = build_background(Vec3(-1.6, -1.6, -0.6), Vec3(1.6, 1.6, 0.6), 0.2);
  const auto field = interpolate_levelset(m, *torus);
  const auto cut = extract_cut_surface(m, field);
  REQUIRE(!cut.empty());

  double max_abs = 0.0;
  for (double v : field.values) max_abs = std::max(max_abs, std::abs(v));

  SECTION("facets lie on parent edges where the interpolant vanishes") {
    for (const auto& f : cut.facets) {
      const auto& tet = m.tets[f.parent_tet];
      std::array<Vec3, 4> v;
      for (int i = 0; i < 4; ++i) v[i] = m.vertices[tet[i]];
      const auto basis = p1_basis(v);
      for (int k = 0; k < 3; ++k) {
        const auto [a, b] = f.edges[k];
        CHECK(std::find(tet.begin(), tet.end(), a) != tet.end());
        CHECK(std::find(tet.begin(), tet.end(), b) != tet.end());
        const Vec3 d = m.vertices[b] - m.vertices[a];
        const Vec3 r = f.vertices[k] - m.vertices[a];
        CHECK(r.cross(d).norm() < 1e-12 * d.squaredNorm());
        const auto lam = basis.values(f.vertices[k]);
        double value = 0.0;
        for (int i = 0; i < 4; ++i) value += lam[i] * field.values[tet[i]];
        CHECK(std::abs(value) <= 1e-12 * max_abs);
      }
    }
  }

  SECTION("orientation and winding") {
    for (const auto& f : cut.facets) {
      const Vec3 g = level_gradient(m, field, f.parent_tet);
      CHECK(f.normal.dot(g) > 0.0);
      CHECK((g.normalized() - f.normal).norm() < 1e-12);
      const Vec3 c = (f.vertices[1] - f.vertices[0]).cross(f.vertices[2] - f.vertices[0]);
      CHECK(c.dot(f.normal) > 0.0);
      CHECK(f.area == Approx(0.5 * c.norm()).epsilon(1e-12));
    }
  }

  SECTION("watertight, with bitwise shared crossings") {
    std::map<EdgeKey, Vec3> points;
    std::map<std::pair<EdgeKey, EdgeKey>, int> segments;
    for (const auto& f : cut.facets)
      for (int k = 0; k < 3; ++k) {
        const auto [it, fresh] = points.emplace(f.edges[k], f.vertices[k]);
        if (!fresh) CHECK(same_bits(it->second, f.vertices[k]));
        auto a = f.edges[k], b = f.edges[(k + 1) % 3];
        if (b < a) std::swap(a, b);
        segments[{a, b}]++;
      }
    for (const auto& [seg, n] : segments) CHECK(n == 2);
    // Euler characteristic of a torus.
    const long V = static_cast<long>(points.size());
    const long E = static_cast<long>(segments.size());
    const long F = static_cast<long>(cut.facets.size());
    CHECK(V - E + F == 0);
  }

  SECTION("active sets") {
    std::set<int> with_facets;
    for (const auto& f : cut.facets) with_facets.insert(f.parent_tet);
    CHECK(std::vector<int>(with_facets.begin(), with_facets.end()) == cut.active_tets);
    CHECK(cut.elements.size() == cut.active_tets.size());
    for (std::size_t e = 0; e < cut.elements.size(); ++e) {
      CHECK(cut.elements[e].facet_count >= 1);
      CHECK(cut.element_of_tet[cut.elements[e].tet] == static_cast<int>(e));
    }

    std::set<int> stab;
    for (const auto& sf : cut.faces) {
      const auto& face = m.faces[sf.face];
      CHECK(face.neighbor >= 0);
      CHECK(cut.element_of_tet[sf.tet_a] >= 0);
      CHECK(cut.element_of_tet[sf.tet_b] >= 0);
      CHECK(std::abs(sf.normal.norm() - 1.0) < 1e-14);
      const Vec3 a = m.vertices[face.vertices[0]], b = m.vertices[face.vertices[1]],
                 c = m.vertices[face.vertices[2]];
      CHECK(sf.area == Approx(0.5 * (b - a).cross(c - a).norm()).epsilon(1e-12));
      stab.insert(sf.face);
    }
    // Every interior face between two active tets is present.
    for (std::size_t fid = 0; fid < m.faces.size(); ++fid) {
      const auto& face = m.faces[fid];
      const bool both = face.neighbor >= 0 && cut.element_of_tet[face.owner] >= 0 &&
                        cut.element_of_tet[face.neighbor] >= 0;
      CHECK(both == (stab.count(static_cast<int>(fid)) == 1));
    }
  }

  SECTION("facet edges carry unit in-plane conormals") {
    REQUIRE(!cut.edges.empty());
    for (const auto& e : cut.edges) {
      const Vec3 t = (e.end - e.start).normalized();
      const Vec3 na = cut.elements[e.element_a].normal, nb = cut.elements[e.element_b].normal;
      CHECK(std::abs(e.conormal_a.norm() - 1.0) < 1e-12);
      CHECK(std::abs(e.conormal_a.dot(t)) < 1e-10);
      CHECK(std::abs(e.conormal_a.dot(na)) < 1e-12);
      CHECK(std::abs(e.conormal_b.dot(nb)) < 1e-12);
      // Outward from each side: roughly opposite each other.
      CHECK(e.conormal_a.dot(e.conormal_b) < 0.0);
    }
  }
}

TEST_CASE("cut area converges to the torus area", "[mesh]") {
  std::vector<double> hs{0.4, 0.2, 0.1}, errors;
  for (double h : hs) {
    const auto level = test::torus_level(h, *torus);
    errors.push_back(std::abs(level.cut.area() - torus->area()));
    if (h <= 0.1) CHECK(std::abs(level.cut.area() / torus->area() - 1.0) < 0.01);
  }
  CHECK(loglog_slope(hs, errors) >= 2.0);
}

TEST_CASE("geometric approximation rates", "[mesh]") {
  std::vector<double> hs{0.4, 0.2, 0.1}, dist, normal;
  for (double h : hs) {
    const auto level = test::torus_level(h, *torus);
    const auto g = geometry_report(level.cut, *torus);
    dist.push_back(g.max_distance);
    normal.push_back(g.max_normal_error);
    CHECK(g.area == Approx(level.cut.area()).epsilon(1e-14));
  }
  const double s_rho = loglog_slope(hs, dist), s_n = loglog_slope(hs, normal);
  CHECK(s_rho >= 1.7);
  CHECK(s_rho <= 2.3);
  CHECK(s_n >= 0.7);
  CHECK(s_n <= 1.3);
}

TEST_CASE("planes are reproduced exactly", "[mesh]") {
  const Vec3 lo(-0.5, -0.5, -0.5), hi(0.5, 0.5, 0.5);
  const auto m = build_background(lo, hi, 0.125);
  {
    // Aligned with grid planes: vertices on it become +1e-12 h. The margin
    // is rounding in the crossing formula.
    test::Plane plane(Vec3(0, 0, 1), 0.0);
    const auto cut = extract_cut_surface(m, interpolate_levelset(m, plane));
    REQUIRE(!cut.empty());
    CHECK(geometry_report(cut, plane).max_distance <= 1e-12 * m.h + 1e-16);
    CHECK(cut.area() == Approx(1.0).epsilon(1e-10));
  }
  {
    test::Plane plane(Vec3(0.3, -0.2, 1.0), 0.0173);
    const auto cut = extract_cut_surface(m, interpolate_levelset(m, plane));
    const auto g = geometry_report(cut, plane);
    CHECK(g.max_distance < 1e-14);
    CHECK(g.max_normal_error < 1e-14);
  }
  CHECK_THROWS_AS(geometry_report(CutSurfaceMesh{}, *torus), GeometryError);
}

TEST_CASE("extraction is deterministic across worker counts", "[mesh][determinism]") {
  const auto m = build_background(Vec3(-1.6, -1.6, -0.6), Vec3(1.6, 1.6, 0.6), 0.1);
  const auto field = interpolate_levelset(m, *torus);
  std::string reference;
  for (int threads : {1, 2, 3, 7}) {
    test::ThreadsGuard g(threads);
    const std::string text = obj_text(extract_cut_surface(m, field));
    if (reference.empty())
      reference = text;
    else
      CHECK(text == reference);
  }
}

TEST_CASE("OBJ export shares vertices", "[mesh]") {
  const auto level = test::torus_level(0.4, *torus);
  std::istringstream in(obj_text(level.cut));
  std::string line;
  long v = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) {
      ++f;
      std::istringstream fl(line.substr(2));
      long a = 0, b = 0, c = 0;
      fl >> a >> b >> c;
      CHECK(a >= 1);
      CHECK(std::max({a, b, c}) <= v);
    }
  }
  CHECK(f == static_cast<long>(level.cut.facets.size()));
  // Closed torus: E = 3F/2 and V - E + F = 0.
  CHECK(2 * v == f);
}
