// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "surfcut/kernels.hpp"

namespace surfcut::kernels::detail {
namespace {

void torus_sdf_scalar(const double* x, const double* y, const double* z, std::size_t n,
                      double major, double minor, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sqrt(x[i] * x[i] + y[i] * y[i]);
    const double d = s - major;
    const double q = std::sqrt(z[i] * z[i] + d * d);
    out[i] = q - minor;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void csr_matvec_scalar(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                       const double* val, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) sum += val[k] * x[col[k]];
    y[i] = sum;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table{torus_sdf_scalar, dot_scalar, csr_matvec_scalar};
  return table;
}

}  // namespace surfcut::kernels::detail
