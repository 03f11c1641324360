// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "surfcut/error.hpp"
#include "surfcut/parallel.hpp"
#include "surfcut/quadrature.hpp"

namespace surfcut {

double BackgroundMesh::tet_volume(int t) const {
  const auto& v = tets[static_cast<std::size_t>(t)];
  Mat3 j;
  for (int i = 0; i < 3; ++i) j.col(i) = vertices[v[i + 1]] - vertices[v[0]];
  return j.determinant() / 6.0;
}

BackgroundMesh build_background(const Vec3& lo, const Vec3& hi, std::array<int, 3> cells) {
  for (int a = 0; a < 3; ++a) {
    if (cells[a] < 1) throw ConfigError("background mesh needs at least one cell per axis");
    if (!(hi[a] > lo[a])) throw ConfigError("background box has non-positive extent");
  }
  BackgroundMesh mesh;
  mesh.lo = lo;
  mesh.hi = hi;
  mesh.cells = cells;
  const Vec3 spacing((hi[0] - lo[0]) / cells[0], (hi[1] - lo[1]) / cells[1],
                     (hi[2] - lo[2]) / cells[2]);
  if (std::abs(spacing[1] - spacing[0]) > 1e-9 * spacing[0] ||
      std::abs(spacing[2] - spacing[0]) > 1e-9 * spacing[0]) {
    std::ostringstream msg;
    msg << "anisotropic background spacing (" << spacing.transpose()
        << "); all axes must share one h";
    throw ConfigError(msg.str());
  }
  mesh.h = spacing[0];

  const int nx = cells[0] + 1;
  const int ny = cells[1] + 1;
  const int nz = cells[2] + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        mesh.vertices.emplace_back(lo[0] + (hi[0] - lo[0]) * i / cells[0],
                                   lo[1] + (hi[1] - lo[1]) * j / cells[1],
                                   lo[2] + (hi[2] - lo[2]) * k / cells[2]);

  // Kuhn subdivision: one tet per axis permutation, walking 000 -> 111.
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  mesh.tets.reserve(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2] * 6);
  for (int k = 0; k < cells[2]; ++k)
    for (int j = 0; j < cells[1]; ++j)
      for (int i = 0; i < cells[0]; ++i)
        for (const auto& perm : perms) {
          std::array<int, 3> idx{i, j, k};
          std::array<int, 4> tet;
          tet[0] = mesh.vertex_id(idx[0], idx[1], idx[2]);
          for (int s = 0; s < 3; ++s) {
            ++idx[perm[s]];
            tet[s + 1] = mesh.vertex_id(idx[0], idx[1], idx[2]);
          }
          // Odd permutations come out negatively oriented.
          const bool odd = ((perm[0] > perm[1]) != (perm[1] > perm[2])) != (perm[0] > perm[2]);
          if (odd) std::swap(tet[1], tet[2]);
          mesh.tets.push_back(tet);
        }

  struct FaceRef {
    std::array<int, 3> key;
    int tet;
    int local;
  };
  std::vector<FaceRef> refs;
  refs.reserve(mesh.tets.size() * 4);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (int l = 0; l < 4; ++l) {
      std::array<int, 3> key;
      int n = 0;
      for (int m = 0; m < 4; ++m)
        if (m != l) key[n++] = mesh.tets[t][m];
      std::sort(key.begin(), key.end());
      refs.push_back({key, static_cast<int>(t), l});
    }
  std::sort(refs.begin(), refs.end(), [](const FaceRef& a, const FaceRef& b) {
    return a.key != b.key ? a.key < b.key : a.tet < b.tet;
  });
  mesh.tet_faces.assign(mesh.tets.size(), {-1, -1, -1, -1});
  for (std::size_t r = 0; r < refs.size();) {
    MeshFace face;
    face.vertices = refs[r].key;
    face.owner = refs[r].tet;
    const int id = static_cast<int>(mesh.faces.size());
    mesh.tet_faces[refs[r].tet][refs[r].local] = id;
    std::size_t next = r + 1;
    if (next < refs.size() && refs[next].key == refs[r].key) {
      face.neighbor = refs[next].tet;
      mesh.tet_faces[refs[next].tet][refs[next].local] = id;
      ++next;
    }
    mesh.faces.push_back(face);
    r = next;
  }
  return mesh;
}

BackgroundMesh build_background(const Vec3& lo, const Vec3& hi, double h) {
  if (!(h > 0.0)) throw ConfigError("mesh size h must be positive");
  std::array<int, 3> cells{};
  for (int a = 0; a < 3; ++a) {
    const double n = (hi[a] - lo[a]) / h;
    const double rounded = std::round(n);
    if (rounded < 1.0 || std::abs(n - rounded) > 1e-9 * std::max(1.0, n)) {
      std::ostringstream msg;
      msg << "h = " << h << " does not divide box edge " << a << " of length " << hi[a] - lo[a]
          << " into an integer number of cells";
      throw ConfigError(msg.str());
    }
    cells[a] = static_cast<int>(rounded);
  }
  return build_background(lo, hi, cells);
}

LevelSetField make_levelset(const BackgroundMesh& mesh, std::vector<double> values) {
  if (values.size() != mesh.vertices.size())
    throw GeometryError("level set size does not match background vertex count");
  const double shift = 1e-12 * mesh.h;
  for (double& v : values)
    if (std::abs(v) < shift) v = shift;
  return LevelSetField{std::move(values)};
}

LevelSetField interpolate_levelset(const BackgroundMesh& mesh, const ImplicitSurface& surface) {
  const std::size_t n = mesh.vertices.size();
  std::vector<double> x(n), y(n), z(n), values(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = mesh.vertices[i][0];
    y[i] = mesh.vertices[i][1];
    z[i] = mesh.vertices[i][2];
  }
  surface.sdf_batch(x, y, z, values);
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(values[i])) throw GeometryError("signed distance is not finite at a vertex");
  return make_levelset(mesh, std::move(values));
}

Vec3 edge_crossing(const BackgroundMesh& mesh, const LevelSetField& field, EdgeKey edge) {
  const double r0 = field.values[edge.first];
  const double r1 = field.values[edge.second];
  const double t = r0 / (r0 - r1);
  const Vec3& x0 = mesh.vertices[edge.first];
  const Vec3& x1 = mesh.vertices[edge.second];
  return x0 + t * (x1 - x0);
}

double CutSurfaceMesh::area() const {
  double sum = 0.0;
  for (const auto& f : facets) sum += f.area;
  return sum;
}

namespace {

EdgeKey make_edge(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

Vec3 levelset_gradient(const BackgroundMesh& mesh, const LevelSetField& field,
                       const std::array<int, 4>& tet) {
  Mat3 jt;
  Vec3 diff;
  for (int i = 0; i < 3; ++i) {
    jt.row(i) = (mesh.vertices[tet[i + 1]] - mesh.vertices[tet[0]]).transpose();
    diff[i] = field.values[tet[i + 1]] - field.values[tet[0]];
  }
  return jt.partialPivLu().solve(diff);
}

struct Crossing {
  EdgeKey edge;
  Vec3 point;
};

CutFacet make_facet(int tet, const Crossing& a, const Crossing& b, const Crossing& c,
                    const Vec3& normal) {
  CutFacet f;
  f.parent_tet = tet;
  f.normal = normal;
  f.vertices = {a.point, b.point, c.point};
  f.edges = {a.edge, b.edge, c.edge};
  Vec3 cross = (b.point - a.point).cross(c.point - a.point);
  if (cross.dot(normal) < 0.0) {
    std::swap(f.vertices[1], f.vertices[2]);
    std::swap(f.edges[1], f.edges[2]);
    cross = -cross;
  }
  f.area = 0.5 * cross.norm();
  return f;
}

std::vector<CutFacet> cut_tet(const BackgroundMesh& mesh, const LevelSetField& field, int t) {
  const auto& tet = mesh.tets[static_cast<std::size_t>(t)];
  std::array<bool, 4> negative{};
  int count = 0;
  for (int i = 0; i < 4; ++i) {
    negative[i] = field.values[tet[i]] < 0.0;
    count += negative[i] ? 1 : 0;
  }
  std::vector<CutFacet> out;
  if (count == 0 || count == 4) return out;

  const Vec3 normal = levelset_gradient(mesh, field, tet).normalized();
  auto crossing = [&](int i, int j) {
    const EdgeKey e = make_edge(tet[i], tet[j]);
    return Crossing{e, edge_crossing(mesh, field, e)};
  };

  if (count == 1 || count == 3) {
    const bool lone_sign = count == 1;
    int lone = 0;
    while (negative[lone] != lone_sign) ++lone;
    std::array<Crossing, 3> c;
    int n = 0;
    for (int j = 0; j < 4; ++j)
      if (j != lone) c[n++] = crossing(lone, j);
    out.push_back(make_facet(t, c[0], c[1], c[2], normal));
    return out;
  }

  std::array<int, 2> neg{};
  std::array<int, 2> pos{};
  int nn = 0;
  int np = 0;
  for (int i = 0; i < 4; ++i) (negative[i] ? neg[nn++] : pos[np++]) = i;
  // Cyclic order around the quad: ac, ad, bd, bc.
  const Crossing ac = crossing(neg[0], pos[0]);
  const Crossing ad = crossing(neg[0], pos[1]);
  const Crossing bd = crossing(neg[1], pos[1]);
  const Crossing bc = crossing(neg[1], pos[0]);
  const double d1 = (bd.point - ac.point).squaredNorm();
  const double d2 = (bc.point - ad.point).squaredNorm();
  bool use_first;
  if (d1 != d2) {
    use_first = d1 < d2;
  } else {
    const EdgeKey lowest = std::min({ac.edge, ad.edge, bd.edge, bc.edge});
    use_first = lowest == ac.edge || lowest == bd.edge;
  }
  if (use_first) {
    out.push_back(make_facet(t, ac, ad, bd, normal));
    out.push_back(make_facet(t, ac, bd, bc, normal));
  } else {
    out.push_back(make_facet(t, ad, bd, bc, normal));
    out.push_back(make_facet(t, ad, bc, ac, normal));
  }
  return out;
}

Vec3 element_centroid(const CutSurfaceMesh& cut, const CutElement& e) {
  Vec3 c = Vec3::Zero();
  for (int f = e.first_facet; f < e.first_facet + e.facet_count; ++f) {
    const auto& facet = cut.facets[static_cast<std::size_t>(f)];
    c += facet.area * (facet.vertices[0] + facet.vertices[1] + facet.vertices[2]) / 3.0;
  }
  if (e.area > 0.0) return c / e.area;
  const auto& facet = cut.facets[static_cast<std::size_t>(e.first_facet)];
  return (facet.vertices[0] + facet.vertices[1] + facet.vertices[2]) / 3.0;
}

Vec3 outward_conormal(const Vec3& normal, const Vec3& tangent, const Vec3& centroid,
                      const Vec3& midpoint) {
  Vec3 c = normal.cross(tangent).normalized();
  if (c.dot(centroid - midpoint) > 0.0) c = -c;
  return c;
}

}  // namespace

CutSurfaceMesh extract_cut_surface(const BackgroundMesh& mesh, const LevelSetField& field) {
  if (field.values.size() != mesh.vertices.size())
    throw GeometryError("level set size does not match background vertex count");
  CutSurfaceMesh cut;
  cut.element_of_tet.assign(mesh.tets.size(), -1);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    int negatives = 0;
    for (int v : mesh.tets[t]) negatives += field.values[v] < 0.0 ? 1 : 0;
    if (negatives != 0 && negatives != 4) cut.active_tets.push_back(static_cast<int>(t));
  }

  std::vector<std::vector<CutFacet>> local(cut.active_tets.size());
  parallel_for(local.size(), [&](std::size_t i) { local[i] = cut_tet(mesh, field, cut.active_tets[i]); });

  for (std::size_t i = 0; i < local.size(); ++i) {
    CutElement e;
    e.tet = cut.active_tets[i];
    e.first_facet = static_cast<int>(cut.facets.size());
    e.facet_count = static_cast<int>(local[i].size());
    e.normal = local[i].front().normal;
    for (auto& f : local[i]) {
      e.area += f.area;
      cut.facets.push_back(std::move(f));
    }
    cut.element_of_tet[static_cast<std::size_t>(e.tet)] = static_cast<int>(cut.elements.size());
    cut.elements.push_back(e);
  }

  for (std::size_t fid = 0; fid < mesh.faces.size(); ++fid) {
    const MeshFace& face = mesh.faces[fid];
    if (face.neighbor < 0) continue;
    const int ea = cut.element_of_tet[static_cast<std::size_t>(face.owner)];
    const int eb = cut.element_of_tet[static_cast<std::size_t>(face.neighbor)];
    if (ea < 0 || eb < 0) continue;

    const Vec3& p0 = mesh.vertices[face.vertices[0]];
    const Vec3 cross =
        (mesh.vertices[face.vertices[1]] - p0).cross(mesh.vertices[face.vertices[2]] - p0);
    StabilizationFace sf;
    sf.face = static_cast<int>(fid);
    sf.tet_a = face.owner;
    sf.tet_b = face.neighbor;
    sf.normal = cross.normalized();
    sf.area = 0.5 * cross.norm();
    cut.faces.push_back(sf);

    // The cut polygons of both tets meet this face in the same segment when
    // its vertices change sign.
    std::array<EdgeKey, 2> crossing_edges;
    int found = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const int vi = face.vertices[i];
        const int vj = face.vertices[j];
        if ((field.values[vi] < 0.0) != (field.values[vj] < 0.0))
          crossing_edges[found++] = make_edge(vi, vj);
      }
    if (found != 2) continue;
    FacetEdge edge;
    edge.face = static_cast<int>(fid);
    edge.element_a = ea;
    edge.element_b = eb;
    edge.start = edge_crossing(mesh, field, crossing_edges[0]);
    edge.end = edge_crossing(mesh, field, crossing_edges[1]);
    const Vec3 seg = edge.end - edge.start;
    if (seg.squaredNorm() == 0.0) continue;
    const Vec3 tangent = seg.normalized();
    const Vec3 mid = 0.5 * (edge.start + edge.end);
    const CutElement& a = cut.elements[static_cast<std::size_t>(ea)];
    const CutElement& b = cut.elements[static_cast<std::size_t>(eb)];
    edge.conormal_a = outward_conormal(a.normal, tangent, element_centroid(cut, a), mid);
    edge.conormal_b = outward_conormal(b.normal, tangent, element_centroid(cut, b), mid);
    cut.edges.push_back(edge);
  }
  return cut;
}

GeometryReport geometry_report(const CutSurfaceMesh& cut, const ImplicitSurface& surface) {
  if (cut.empty()) throw GeometryError("geometry report requested for an empty cut surface");
  const TriangleRule& rule = triangle_rule(4);
  std::vector<GeometryReport> per_facet(cut.facets.size());
  parallel_for(cut.facets.size(), [&](std::size_t i) {
    const CutFacet& f = cut.facets[i];
    GeometryReport& r = per_facet[i];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = rule.map(q, f.vertices[0], f.vertices[1], f.vertices[2]);
      const SurfaceFrame frame = surface.frame_at(x);
      r.max_distance = std::max(r.max_distance, std::abs(frame.distance));
      r.max_normal_error = std::max(r.max_normal_error, (frame.normal - f.normal).norm());
    }
  });
  GeometryReport out;
  for (std::size_t i = 0; i < per_facet.size(); ++i) {
    out.max_distance = std::max(out.max_distance, per_facet[i].max_distance);
    out.max_normal_error = std::max(out.max_normal_error, per_facet[i].max_normal_error);
    out.area += cut.facets[i].area;
  }
  return out;
}

void write_obj(std::ostream& out, const CutSurfaceMesh& cut) {
  std::map<EdgeKey, int> index;
  std::vector<const Vec3*> points;
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(cut.facets.size());
  for (const auto& f : cut.facets) {
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = index.try_emplace(f.edges[k], static_cast<int>(points.size()) + 1);
      if (inserted) points.push_back(&f.vertices[k]);
      tri[k] = it->second;
    }
    triangles.push_back(tri);
  }
  char line[128];
  out << "# surfcut Gamma_h: " << points.size() << " vertices, " << triangles.size()
      << " triangles\n";
  for (const Vec3* p : points) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", (*p)[0], (*p)[1], (*p)[2]);
    out << line;
  }
  for (const auto& t : triangles) out << "f " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace surfcut
