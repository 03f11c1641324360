// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Structured Kuhn background mesh, nodal level set, and extraction of the
// piecewise planar discrete surface with its active topology.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "surfcut/geometry.hpp"

namespace surfcut {

struct MeshFace {
  std::array<int, 3> vertices;  ///< ascending vertex ids
  int owner = -1;               ///< lower tet id
  int neighbor = -1;            ///< -1 on the box boundary
};

struct BackgroundMesh {
  Vec3 lo;
  Vec3 hi;
  std::array<int, 3> cells{};
  double h = 0.0;
  std::vector<Vec3> vertices;             ///< x index fastest, then y, then z
  std::vector<std::array<int, 4>> tets;   ///< positively oriented
  std::vector<MeshFace> faces;            ///< sorted by vertex triple
  std::vector<std::array<int, 4>> tet_faces;  ///< face opposite local vertex i

  [[nodiscard]] int vertex_id(int i, int j, int k) const {
    return i + (cells[0] + 1) * (j + (cells[1] + 1) * k);
  }
  [[nodiscard]] double tet_volume(int t) const;
};

/// Uniform grid over the box, each cube split into six Kuhn tetrahedra about
/// its main diagonal. Throws ConfigError unless every axis has the same
/// spacing. cells must be >= 1 per axis.
[[nodiscard]] BackgroundMesh build_background(const Vec3& lo, const Vec3& hi,
                                              std::array<int, 3> cells);
/// Derives the cell counts from a target h; every box edge must be an
/// integer multiple of h (relative slack 1e-9).
[[nodiscard]] BackgroundMesh build_background(const Vec3& lo, const Vec3& hi, double h);

struct LevelSetField {
  std::vector<double> values;  ///< one per background vertex, never exactly 0
};

/// Nodal interpolant of the signed distance; |value| < 1e-12 h becomes
/// +1e-12 h.
[[nodiscard]] LevelSetField interpolate_levelset(const BackgroundMesh& mesh,
                                                 const ImplicitSurface& surface);
/// Applies the same zero-shift rule to caller-provided nodal values.
[[nodiscard]] LevelSetField make_levelset(const BackgroundMesh& mesh, std::vector<double> values);

using EdgeKey = std::pair<int, int>;  ///< (lower vertex id, higher vertex id)

/// Point where the linear interpolant vanishes on an edge. Always evaluated
/// from the lower-id end, so every tet sharing the edge gets identical bits.
[[nodiscard]] Vec3 edge_crossing(const BackgroundMesh& mesh, const LevelSetField& field,
                                 EdgeKey edge);

struct CutFacet {
  int parent_tet = -1;
  std::array<Vec3, 3> vertices;   ///< counter-clockwise about normal
  std::array<EdgeKey, 3> edges;   ///< background edge carrying each vertex
  Vec3 normal;                    ///< grad rho_h / |grad rho_h| of the parent tet
  double area = 0.0;
};

/// K = T cut by Gamma_h: the one or two facets of an active tet.
struct CutElement {
  int tet = -1;
  int first_facet = 0;
  int facet_count = 0;
  Vec3 normal;
  double area = 0.0;
};

/// Full interior face between two active tets.
struct StabilizationFace {
  int face = -1;
  int tet_a = -1;
  int tet_b = -1;
  Vec3 normal;  ///< unit normal, orientation arbitrary
  double area = 0.0;
};

/// Segment shared by the cut polygons of two face-adjacent tets.
struct FacetEdge {
  int face = -1;
  int element_a = -1;
  int element_b = -1;
  Vec3 start;
  Vec3 end;
  Vec3 conormal_a;  ///< in the plane of element_a, pointing away from it
  Vec3 conormal_b;
};

struct CutSurfaceMesh {
  std::vector<CutFacet> facets;            ///< grouped by parent tet, ascending
  std::vector<CutElement> elements;        ///< one per active tet
  std::vector<int> active_tets;            ///< ascending
  std::vector<int> element_of_tet;         ///< -1 for inactive tets
  std::vector<StabilizationFace> faces;    ///< ascending face id
  std::vector<FacetEdge> edges;            ///< ascending face id

  [[nodiscard]] bool empty() const { return facets.empty(); }
  [[nodiscard]] double area() const;
};

/// Marching-tetrahedra extraction of the zero level set of the P1 field.
[[nodiscard]] CutSurfaceMesh extract_cut_surface(const BackgroundMesh& mesh,
                                                 const LevelSetField& field);

struct GeometryReport {
  double max_distance = 0.0;      ///< max |rho| over facet quadrature points
  double max_normal_error = 0.0;  ///< max |n(p(x)) - n_h|
  double area = 0.0;
};

/// Throws GeometryError on an empty cut.
[[nodiscard]] GeometryReport geometry_report(const CutSurfaceMesh& cut,
                                             const ImplicitSurface& surface);

/// ASCII OBJ; vertices shared through their background edge, 17 digits.
void write_obj(std::ostream& out, const CutSurfaceMesh& cut);

}  // namespace surfcut
