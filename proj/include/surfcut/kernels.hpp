// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants picked at runtime. Every variant must agree with the scalar one:
// bitwise for the element-wise kernels, to rounding for reductions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace surfcut::kernels {

enum class Isa { scalar, avx2 };

/// True if the variant was compiled in and the CPU supports it.
[[nodiscard]] bool available(Isa isa);

/// Widest available variant, unless SURFCUT_SIMD=scalar is set in the
/// environment. Resolved once per process.
[[nodiscard]] Isa active();

[[nodiscard]] const char* name(Isa isa);

/// Variants that can run on this machine, scalar first.
[[nodiscard]] std::vector<Isa> runnable();

/// Signed distance to the ring torus of radii (major, minor) about the z-axis,
/// evaluated for n points given in structure-of-arrays form.
void torus_sdf(Isa isa, std::span<const double> x, std::span<const double> y,
               std::span<const double> z, double major, double minor, std::span<double> out);

[[nodiscard]] double dot(Isa isa, std::span<const double> a, std::span<const double> b);

/// y = A x for a CSR matrix.
void csr_matvec(Isa isa, std::span<const std::int32_t> row_ptr, std::span<const std::int32_t> col,
                std::span<const double> val, std::span<const double> x, std::span<double> y);

inline void torus_sdf(std::span<const double> x, std::span<const double> y,
                      std::span<const double> z, double major, double minor,
                      std::span<double> out) {
  torus_sdf(active(), x, y, z, major, minor, out);
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return dot(active(), a, b);
}
inline void csr_matvec(std::span<const std::int32_t> row_ptr, std::span<const std::int32_t> col,
                       std::span<const double> val, std::span<const double> x,
                       std::span<double> y) {
  csr_matvec(active(), row_ptr, col, val, x, y);
}

namespace detail {

struct Table {
  void (*torus_sdf)(const double* x, const double* y, const double* z, std::size_t n, double major,
                    double minor, double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*csr_matvec)(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                     const double* val, const double* x, double* y);
};

const Table& scalar_table();
#if defined(SURFCUT_BUILD_AVX2)
const Table& avx2_table();
#endif

}  // namespace detail
}  // namespace surfcut::kernels
