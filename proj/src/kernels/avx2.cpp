// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <immintrin.h>

#include <cmath>

#include "surfcut/kernels.hpp"

namespace surfcut::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Same operation sequence as the scalar kernel, lane by lane; sqrt is
// correctly rounded in both, so results match bit for bit.
void torus_sdf_avx2(const double* x, const double* y, const double* z, std::size_t n,
                    double major, double minor, double* out) {
  const __m256d vmajor = _mm256_set1_pd(major);
  const __m256d vminor = _mm256_set1_pd(minor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vz = _mm256_loadu_pd(z + i);
    const __m256d s = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(vx, vx), _mm256_mul_pd(vy, vy)));
    const __m256d d = _mm256_sub_pd(s, vmajor);
    const __m256d q = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(vz, vz), _mm256_mul_pd(d, d)));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(q, vminor));
  }
  for (; i < n; ++i) {
    const double s = std::sqrt(x[i] * x[i] + y[i] * y[i]);
    const double d = s - major;
    const double q = std::sqrt(z[i] * z[i] + d * d);
    out[i] = q - minor;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void csr_matvec_avx2(std::size_t rows, const std::int32_t* row_ptr, const std::int32_t* col,
                     const double* val, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    std::int32_t k = row_ptr[i];
    const std::int32_t end = row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(val + k), xv));
    }
    double sum = hsum(acc);
    for (; k < end; ++k) sum += val[k] * x[col[k]];
    y[i] = sum;
  }
}

}  // namespace

const Table& avx2_table() {
  static const Table table{torus_sdf_avx2, dot_avx2, csr_matvec_avx2};
  return table;
}

}  // namespace surfcut::kernels::detail
