// Copyright surfcut contributors
// SPDX-License-Identifier: Apache-2.0
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "surfcut/kernels.hpp"

namespace surfcut::kernels {
namespace {

const detail::Table& table_for(Isa isa) {
#if defined(SURFCUT_BUILD_AVX2)
  if (isa == Isa::avx2 && available(Isa::avx2)) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

}  // namespace

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SURFCUT_BUILD_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active() {
  static const Isa isa = [] {
    if (const char* env = std::getenv("SURFCUT_SIMD"); env && std::string_view(env) == "scalar")
      return Isa::scalar;
    return available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return isa;
}

const char* name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

std::vector<Isa> runnable() {
  std::vector<Isa> out{Isa::scalar};
  if (available(Isa::avx2)) out.push_back(Isa::avx2);
  return out;
}

void torus_sdf(Isa isa, std::span<const double> x, std::span<const double> y,
               std::span<const double> z, double major, double minor, std::span<double> out) {
  assert(x.size() == y.size() && y.size() == z.size() && z.size() == out.size());
  table_for(isa).torus_sdf(x.data(), y.data(), z.data(), x.size(), major, minor, out.data());
}

double dot(Isa isa, std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return table_for(isa).dot(a.data(), b.data(), a.size());
}

void csr_matvec(Isa isa, std::span<const std::int32_t> row_ptr, std::span<const std::int32_t> col,
                std::span<const double> val, std::span<const double> x, std::span<double> y) {
  assert(!row_ptr.empty() && y.size() + 1 == row_ptr.size());
  table_for(isa).csr_matvec(y.size(), row_ptr.data(), col.data(), val.data(), x.data(), y.data());
}

}  // namespace surfcut::kernels
