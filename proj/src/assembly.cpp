// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include "surfcut/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "surfcut/error.hpp"
#include "surfcut/kernels.hpp"
#include "surfcut/parallel.hpp"

namespace surfcut {

std::string_view to_string(CoefficientMode mode) {
  return mode == CoefficientMode::pointwise ? "pointwise-projected" : "piola-L2";
}

CoefficientMode parse_coefficient_mode(std::string_view text) {
  if (text == "pointwise" || text == "pointwise-projected") return CoefficientMode::pointwise;
  if (text == "piola" || text == "piola-L2" || text == "piola-l2") return CoefficientMode::piola_l2;
  throw ConfigError("unknown coefficient_mode '" + std::string(text) +
                    "' (expected pointwise-projected or piola-L2)");
}

DofMap make_dof_map(const BackgroundMesh& mesh, const CutSurfaceMesh& cut) {
  DofMap dofs;
  dofs.dof_of_vertex.assign(mesh.vertices.size(), -1);
  for (int t : cut.active_tets)
    for (int v : mesh.tets[static_cast<std::size_t>(t)]) dofs.dof_of_vertex[v] = 0;
  for (std::size_t v = 0; v < dofs.dof_of_vertex.size(); ++v)
    if (dofs.dof_of_vertex[v] == 0) {
      dofs.dof_of_vertex[v] = static_cast<int>(dofs.vertex_of_dof.size());
      dofs.vertex_of_dof.push_back(static_cast<int>(v));
    }
  return dofs;
}

double CsrMatrix::coeff(int i, int j) const {
  const auto begin = col.begin() + row_ptr[i];
  const auto end = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return it != end && *it == j ? values[static_cast<std::size_t>(it - col.begin())] : 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::csr_matvec(row_ptr, col, values, x, y);
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows));
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.row_ptr.assign(static_cast<std::size_t>(cols) + 1, 0);
  for (auto c : col) ++t.row_ptr[static_cast<std::size_t>(c) + 1];
  for (int i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col.resize(col.size());
  t.values.resize(values.size());
  std::vector<std::int32_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int i = 0; i < rows; ++i)
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const auto dst = next[col[k]]++;
      t.col[dst] = i;
      t.values[dst] = values[k];
    }
  return t;
}

double LinearTangentField::divergence(const Vec3& n) const {
  const Mat3 p = Mat3::Identity() - n * n.transpose();
  return (p * gradient * p).trace();
}

LinearTangentField project_linear(const CutSurfaceMesh& cut, int element,
                                  const std::function<Vec3(const Vec3&)>& field) {
  const CutElement& e = cut.elements[static_cast<std::size_t>(element)];
  const TriangleRule& rule = triangle_rule(4);
  Vec3 xi1;
  Vec3 xi2;
  plane_basis(e.normal, xi1, xi2);

  LinearTangentField out;
  out.origin = Vec3::Zero();
  double diameter = 0.0;
  for (int f = e.first_facet; f < e.first_facet + e.facet_count; ++f) {
    const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
    out.origin += facet.area * (facet.vertices[0] + facet.vertices[1] + facet.vertices[2]) / 3.0;
    for (int a = 0; a < 3; ++a)
      diameter = std::max(diameter, (facet.vertices[a] - facet.vertices[(a + 1) % 3]).norm());
  }
  const CutFacet& first = cut.facets[static_cast<std::size_t>(e.first_facet)];
  if (e.area > 0.0)
    out.origin /= e.area;
  else
    out.origin = (first.vertices[0] + first.vertices[1] + first.vertices[2]) / 3.0;
  out.gradient = Mat3::Zero();
  if (!(e.area > 0.0) || !(diameter > 0.0)) {
    out.value = field(out.origin);
    return out;
  }

  // Scaled in-plane coordinates keep the Gram matrix O(1).
  Mat3 gram = Mat3::Zero();
  Eigen::Matrix<double, 3, 3> rhs = Eigen::Matrix<double, 3, 3>::Zero();  // rows: basis, cols: xyz
  for (int f = e.first_facet; f < e.first_facet + e.facet_count; ++f) {
    const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = rule.map(q, facet.vertices[0], facet.vertices[1], facet.vertices[2]);
      const double w = facet.area * rule.weights[q];
      const Vec3 phi(1.0, xi1.dot(x - out.origin) / diameter, xi2.dot(x - out.origin) / diameter);
      gram += w * phi * phi.transpose();
      rhs += w * phi * field(x).transpose();
    }
  }
  const Eigen::CompleteOrthogonalDecomposition<Mat3> cod = gram.completeOrthogonalDecomposition();
  const Eigen::Matrix<double, 3, 3> coef = cod.solve(rhs);
  out.value = coef.row(0).transpose();
  out.gradient = (coef.row(1).transpose() * xi1.transpose() +
                  coef.row(2).transpose() * xi2.transpose()) /
                 diameter;
  return out;
}

BetaField::BetaField(const CutSurfaceMesh& cut, const ProblemData& data, CoefficientMode mode)
    : cut_(&cut), data_(&data), mode_(mode) {
  if (mode_ != CoefficientMode::piola_l2) return;
  projections_.resize(cut.elements.size());
  parallel_for(cut.elements.size(), [&](std::size_t e) {
    const Vec3 normal = cut.elements[e].normal;
    projections_[e] = project_linear(cut, static_cast<int>(e), [&](const Vec3& x) {
      const SurfaceFrame frame = data.surface().frame_at(x);
      const BMapResult b = b_map(frame, normal);
      return Vec3(b.det * (b.inverse * data.beta(frame)));
    });
  });
}

Vec3 BetaField::operator()(int element, const SurfaceFrame& frame) const {
  const Vec3& n = cut_->elements[static_cast<std::size_t>(element)].normal;
  if (mode_ == CoefficientMode::pointwise) return tangential_gradient(data_->beta(frame), n);
  return projections_[static_cast<std::size_t>(element)](frame.point + frame.distance * frame.normal);
}

Vec3 BetaField::operator()(int element, const Vec3& x) const {
  if (mode_ == CoefficientMode::piola_l2) return projections_[static_cast<std::size_t>(element)](x);
  const Vec3& n = cut_->elements[static_cast<std::size_t>(element)].normal;
  return tangential_gradient(data_->beta(x), n);
}

LinearTangentField BetaField::linear(int element) const {
  if (mode_ == CoefficientMode::piola_l2) return projections_[static_cast<std::size_t>(element)];
  return project_linear(*cut_, element, [&](const Vec3& x) { return (*this)(element, x); });
}

Eigen::Matrix4d element_matrix(const CutSurfaceMesh& cut, int element, const P1TetBasis& basis,
                               const std::function<Vec3(const Vec3&)>& beta_h,
                               const std::function<double(const Vec3&)>& alpha_h,
                               const TriangleRule& rule) {
  const CutElement& e = cut.elements[static_cast<std::size_t>(element)];
  std::array<Vec3, 4> tangential;
  for (int j = 0; j < 4; ++j) tangential[j] = tangential_gradient(basis.gradients[j], e.normal);

  Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
  for (int f = e.first_facet; f < e.first_facet + e.facet_count; ++f) {
    const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = rule.map(q, facet.vertices[0], facet.vertices[1], facet.vertices[2]);
      const double w = facet.area * rule.weights[q];
      const auto phi = basis.values(x);
      const Vec3 beta = beta_h(x);
      const double alpha = alpha_h(x);
      for (int j = 0; j < 4; ++j) {
        const double column = beta.dot(tangential[j]) + alpha * phi[j];
        for (int i = 0; i < 4; ++i) local(i, j) += w * column * phi[i];
      }
    }
  }
  return local;
}

Eigen::Vector4d element_load(const CutSurfaceMesh& cut, int element, const P1TetBasis& basis,
                             const std::function<double(const Vec3&)>& f_h,
                             const TriangleRule& rule) {
  const CutElement& e = cut.elements[static_cast<std::size_t>(element)];
  Eigen::Vector4d local = Eigen::Vector4d::Zero();
  for (int f = e.first_facet; f < e.first_facet + e.facet_count; ++f) {
    const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3 x = rule.map(q, facet.vertices[0], facet.vertices[1], facet.vertices[2]);
      const double w = facet.area * rule.weights[q];
      const auto phi = basis.values(x);
      const double fx = f_h(x);
      for (int i = 0; i < 4; ++i) local[i] += w * fx * phi[i];
    }
  }
  return local;
}

namespace {

P1TetBasis tet_basis(const BackgroundMesh& mesh, int t) {
  const auto& tet = mesh.tets[static_cast<std::size_t>(t)];
  return p1_basis({mesh.vertices[tet[0]], mesh.vertices[tet[1]], mesh.vertices[tet[2]],
                   mesh.vertices[tet[3]]});
}

}  // namespace

FaceJump face_jump(const BackgroundMesh& mesh, const StabilizationFace& face) {
  FaceJump out;
  auto add = [&](int vertex, double value) {
    for (int k = 0; k < out.count; ++k)
      if (out.vertices[k] == vertex) {
        out.jump[k] += value;
        return;
      }
    out.vertices[out.count] = vertex;
    out.jump[out.count] = value;
    ++out.count;
  };
  const P1TetBasis a = tet_basis(mesh, face.tet_a);
  const P1TetBasis b = tet_basis(mesh, face.tet_b);
  const auto& ta = mesh.tets[static_cast<std::size_t>(face.tet_a)];
  const auto& tb = mesh.tets[static_cast<std::size_t>(face.tet_b)];
  for (int i = 0; i < 4; ++i) add(ta[i], face.normal.dot(a.gradients[i]));
  for (int i = 0; i < 4; ++i) add(tb[i], -face.normal.dot(b.gradients[i]));
  return out;
}

LinearSystem assemble(const BackgroundMesh& mesh, const CutSurfaceMesh& cut,
                      const ProblemData& data, const AssemblyParams& params) {
  if (cut.empty()) throw GeometryError("cannot assemble on an empty cut surface");
  if (!(params.c_F >= 0.0)) throw ConfigError("stabilization parameter c_F must be >= 0");
  if (!(params.h > 0.0)) throw ConfigError("mesh parameter h must be positive");
  const TriangleRule& mass_rule = triangle_rule(params.mass_degree);
  const TriangleRule& load_rule = triangle_rule(params.load_degree);

  LinearSystem sys;
  sys.dofs = make_dof_map(mesh, cut);
  const int n = static_cast<int>(sys.dofs.size());

  // Pattern: DOFs sharing an active tet or a stabilization face pair.
  std::vector<std::vector<std::int32_t>> pattern(static_cast<std::size_t>(n));
  auto couple = [&](std::span<const int> vertices) {
    for (int vi : vertices)
      for (int vj : vertices) {
        const int i = sys.dofs.dof_of_vertex[vi];
        const int j = sys.dofs.dof_of_vertex[vj];
        if (i < 0 || j < 0) throw Error(ErrorKind::solver, "assemble: DOF map mismatch");
        pattern[i].push_back(j);
      }
  };
  for (int t : cut.active_tets) couple(mesh.tets[static_cast<std::size_t>(t)]);
  std::vector<FaceJump> jumps(cut.faces.size());
  parallel_for(cut.faces.size(), [&](std::size_t f) { jumps[f] = face_jump(mesh, cut.faces[f]); });
  for (const FaceJump& j : jumps) couple(std::span<const int>(j.vertices.data(), j.count));

  CsrMatrix& A = sys.A;
  A.rows = A.cols = n;
  A.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& row = pattern[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    A.row_ptr[i + 1] = A.row_ptr[i] + static_cast<std::int32_t>(row.size());
  }
  A.col.reserve(static_cast<std::size_t>(A.row_ptr.back()));
  for (auto& row : pattern) {
    A.col.insert(A.col.end(), row.begin(), row.end());
    std::vector<std::int32_t>().swap(row);
  }
  A.values.assign(A.col.size(), 0.0);
  sys.b.assign(static_cast<std::size_t>(n), 0.0);

  auto slot = [&](int i, int j) -> double& {
    const auto begin = A.col.begin() + A.row_ptr[i];
    const auto end = A.col.begin() + A.row_ptr[i + 1];
    return A.values[static_cast<std::size_t>(std::lower_bound(begin, end, j) - A.col.begin())];
  };

  // Local contributions in parallel, merged in element order.
  const BetaField beta(cut, data, params.mode);
  std::vector<Eigen::Matrix4d> local_matrix(cut.elements.size());
  std::vector<Eigen::Vector4d> local_load(cut.elements.size());
  parallel_for(cut.elements.size(), [&](std::size_t e) {
    const int element = static_cast<int>(e);
    const P1TetBasis basis = tet_basis(mesh, cut.elements[e].tet);
    local_matrix[e] = element_matrix(
        cut, element, basis, [&](const Vec3& x) { return beta(element, x); },
        [&](const Vec3& x) { return data.alpha(x); }, mass_rule);
    local_load[e] = element_load(
        cut, element, basis, [&](const Vec3& x) { return data.rhs(x); }, load_rule);
  });
  for (std::size_t e = 0; e < cut.elements.size(); ++e) {
    const auto& tet = mesh.tets[static_cast<std::size_t>(cut.elements[e].tet)];
    for (int i = 0; i < 4; ++i) {
      const int di = sys.dofs.dof_of_vertex[tet[i]];
      for (int j = 0; j < 4; ++j) slot(di, sys.dofs.dof_of_vertex[tet[j]]) += local_matrix[e](i, j);
      sys.b[static_cast<std::size_t>(di)] += local_load[e][i];
    }
  }

  if (params.c_F > 0.0) {
    for (std::size_t f = 0; f < cut.faces.size(); ++f) {
      const FaceJump& j = jumps[f];
      const double scale = params.c_F * params.h * cut.faces[f].area;
      for (int a = 0; a < j.count; ++a) {
        const int da = sys.dofs.dof_of_vertex[j.vertices[a]];
        for (int b = 0; b < j.count; ++b)
          slot(da, sys.dofs.dof_of_vertex[j.vertices[b]]) += scale * j.jump[a] * j.jump[b];
      }
    }
  }
  return sys;
}

AssumptionReport check_method_assumptions(const CutSurfaceMesh& cut, const ProblemData& data,
                                          CoefficientMode mode) {
  if (cut.empty()) throw GeometryError("assumption check requested for an empty cut surface");
  const BetaField beta(cut, data, mode);
  const TriangleRule& rule = triangle_rule(4);

  std::vector<double> coercivity(cut.elements.size());
  parallel_for(cut.elements.size(), [&](std::size_t e) {
    const CutElement& element = cut.elements[e];
    const double div = beta.linear(static_cast<int>(e)).divergence(element.normal);
    double lowest = std::numeric_limits<double>::infinity();
    for (int f = element.first_facet; f < element.first_facet + element.facet_count; ++f) {
      const CutFacet& facet = cut.facets[static_cast<std::size_t>(f)];
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec3 x = rule.map(q, facet.vertices[0], facet.vertices[1], facet.vertices[2]);
        lowest = std::min(lowest, data.alpha(x) - 0.5 * div);
      }
    }
    coercivity[e] = lowest;
  });

  std::vector<double> jumps(cut.edges.size());
  parallel_for(cut.edges.size(), [&](std::size_t k) {
    const FacetEdge& edge = cut.edges[k];
    double worst = 0.0;
    for (double s : {0.0, 0.5, 1.0}) {
      const Vec3 x = (1.0 - s) * edge.start + s * edge.end;
      const double jump = edge.conormal_a.dot(beta(edge.element_a, x)) +
                          edge.conormal_b.dot(beta(edge.element_b, x));
      worst = std::max(worst, std::abs(jump));
    }
    jumps[k] = worst;
  });

  AssumptionReport report;
  report.min_coercivity = *std::min_element(coercivity.begin(), coercivity.end());
  report.edges_applicable = !cut.edges.empty();
  for (double j : jumps) report.max_edge_jump = std::max(report.max_edge_jump, j);
  return report;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows << ' ' << A.cols << ' ' << A.nonzeros() << '\n';
  char line[96];
  for (int i = 0; i < A.rows; ++i)
    for (auto k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
      std::snprintf(line, sizeof line, "%d %d %.17g\n", i + 1, A.col[k] + 1, A.values[k]);
      out << line;
    }
}

void write_vector(std::ostream& out, std::span<const double> v) {
  char line[40];
  for (double x : v) {
    std::snprintf(line, sizeof line, "%.17g\n", x);
    out << line;
  }
}

}  // namespace surfcut
