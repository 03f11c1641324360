// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Stabilized cut finite element system
//
//   A_h(v, w) = (beta_h . grad_{Gamma_h} v, w)_{K_h} + (alpha_h v, w)_{K_h}
//             + c_F h ([n_F . grad v], [n_F . grad w])_{F_h}
//   l_h(v)    = (f_h, v)_{K_h}
//
// over the P1 space of the active tets.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "surfcut/geometry.hpp"
#include "surfcut/mesh.hpp"
#include "surfcut/quadrature.hpp"

namespace surfcut {

enum class CoefficientMode {
  pointwise,  ///< beta_h = P_h beta(p(x)) at each quadrature point
  piola_l2,   ///< beta_h = per-element linear L2 projection of |B| B^{-1} beta
};

[[nodiscard]] std::string_view to_string(CoefficientMode mode);
/// Accepts "pointwise" / "pointwise-projected" and "piola" / "piola-L2".
[[nodiscard]] CoefficientMode parse_coefficient_mode(std::string_view text);

struct AssemblyParams {
  double c_F = 1e-2;
  double h = 0.0;
  CoefficientMode mode = CoefficientMode::pointwise;
  int mass_degree = 3;  ///< convection and reaction terms
  int load_degree = 2;
};

struct DofMap {
  std::vector<int> vertex_of_dof;  ///< ascending background vertex ids
  std::vector<int> dof_of_vertex;  ///< -1 off the active mesh

  [[nodiscard]] std::size_t size() const { return vertex_of_dof.size(); }
};

[[nodiscard]] DofMap make_dof_map(const BackgroundMesh& mesh, const CutSurfaceMesh& cut);

/// Row-compressed sparse matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int32_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> values;

  [[nodiscard]] std::size_t nonzeros() const { return values.size(); }
  /// Zero when (i, j) is outside the pattern.
  [[nodiscard]] double coeff(int i, int j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  [[nodiscard]] CsrMatrix transpose() const;
};

struct LinearSystem {
  CsrMatrix A;
  std::vector<double> b;
  DofMap dofs;
};

/// Linear polynomial on the plane of one cut element: c + G (x - origin).
struct LinearTangentField {
  Vec3 origin;
  Vec3 value;
  Mat3 gradient;  ///< columns live in the element plane

  [[nodiscard]] Vec3 operator()(const Vec3& x) const { return value + gradient * (x - origin); }
  /// Surface divergence on the element plane with unit normal n.
  [[nodiscard]] double divergence(const Vec3& n) const;
};

/// Discrete convection field beta_h on the cut elements.
class BetaField {
public:
  BetaField(const CutSurfaceMesh& cut, const ProblemData& data, CoefficientMode mode);

  [[nodiscard]] CoefficientMode mode() const { return mode_; }
  /// beta_h at a point x of cut element `element`.
  [[nodiscard]] Vec3 operator()(int element, const Vec3& x) const;
  [[nodiscard]] Vec3 operator()(int element, const SurfaceFrame& frame) const;
  /// Per-element linear representation: the L2 projection in piola mode, the
  /// quadrature-weighted linear fit of the pointwise values otherwise.
  [[nodiscard]] LinearTangentField linear(int element) const;

private:
  const CutSurfaceMesh* cut_;
  const ProblemData* data_;
  CoefficientMode mode_;
  std::vector<LinearTangentField> projections_;  // piola mode only
};

/// Linear L2 projection on one element (all its facets) of a vector field,
/// computed with the degree-4 rule.
[[nodiscard]] LinearTangentField project_linear(
    const CutSurfaceMesh& cut, int element, const std::function<Vec3(const Vec3&)>& field);

/// Local 4x4 matrix of one cut element: entry (i, j) is
/// int_K (beta_h . grad_{Gamma_h} phi_j + alpha_h phi_j) phi_i.
[[nodiscard]] Eigen::Matrix4d element_matrix(const CutSurfaceMesh& cut, int element,
                                             const P1TetBasis& basis,
                                             const std::function<Vec3(const Vec3&)>& beta_h,
                                             const std::function<double(const Vec3&)>& alpha_h,
                                             const TriangleRule& rule);

/// Local load vector int_K f_h phi_i.
[[nodiscard]] Eigen::Vector4d element_load(const CutSurfaceMesh& cut, int element,
                                           const P1TetBasis& basis,
                                           const std::function<double(const Vec3&)>& f_h,
                                           const TriangleRule& rule);

/// Jump of n_F . grad phi across one face for the (up to five) distinct
/// vertices of the two tets. Returns vertex ids and jump coefficients.
struct FaceJump {
  std::array<int, 5> vertices{};
  std::array<double, 5> jump{};
  int count = 0;
};
[[nodiscard]] FaceJump face_jump(const BackgroundMesh& mesh, const StabilizationFace& face);

/// Throws GeometryError on an empty cut, ConfigError on c_F < 0 or h <= 0.
[[nodiscard]] LinearSystem assemble(const BackgroundMesh& mesh, const CutSurfaceMesh& cut,
                                    const ProblemData& data, const AssemblyParams& params);

struct AssumptionReport {
  double min_coercivity = 0.0;  ///< min of alpha_h - div_{Gamma_h} beta_h / 2
  bool edges_applicable = false;
  double max_edge_jump = 0.0;   ///< max |[n_E . beta_h]| over facet edges
};

[[nodiscard]] AssumptionReport check_method_assumptions(const CutSurfaceMesh& cut,
                                                        const ProblemData& data,
                                                        CoefficientMode mode);

/// MatrixMarket coordinate real general, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const CsrMatrix& A);
/// One value per line, 17 significant digits.
void write_vector(std::ostream& out, std::span<const double> v);

}  // namespace surfcut
