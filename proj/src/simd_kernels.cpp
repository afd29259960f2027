#include "lieheat/simd_kernels.hpp"

#include <immintrin.h>

#include <atomic>
#include <stdexcept>

namespace lieheat::simd {

namespace {
std::atomic<bool> g_force_scalar{false};
constexpr int kMaxDim = 6;
}  // namespace

void heat_rhs_scalar(const HeatRhsArgs& a) {
  const int d = a.d, dd = d * d;
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("heat_rhs: unsupported matrix size");
  double cur[kMaxDim * kMaxDim], kg[kMaxDim * kMaxDim];
  for (int i = 1; i <= a.n; ++i) {
    for (int e = 0; e < dd; ++e) {
      const double* p = a.in + e * a.stride;
      cur[e] = p[i];
      kg[e] = a.k_entry[e] * (p[i + 1] - p[i - 1]) * a.inv_2h;
    }
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        const int e = p * d + q;
        const double* pl = a.in + e * a.stride;
        double v = a.k_entry[e] * (pl[i - 1] - 2.0 * pl[i] + pl[i + 1]) * a.inv_h2;
        for (int r = 0; r < d; ++r) v += cur[p * d + r] * kg[r * d + q] - kg[p * d + r] * cur[r * d + q];
        a.out[e * a.stride + i] = v;
      }
  }
}

__attribute__((target("avx2,fma"))) void heat_rhs_avx2(const HeatRhsArgs& a) {
  const int d = a.d, dd = d * d;
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("heat_rhs: unsupported matrix size");
  const __m256d ih2 = _mm256_set1_pd(a.inv_h2), i2h = _mm256_set1_pd(a.inv_2h), two = _mm256_set1_pd(2.0);
  __m256d cur[kMaxDim * kMaxDim], kg[kMaxDim * kMaxDim];
  int i = 1;
  for (; i + 3 <= a.n; i += 4) {
    for (int e = 0; e < dd; ++e) {
      const double* p = a.in + e * a.stride + i;
      const __m256d lo = _mm256_loadu_pd(p - 1), hi = _mm256_loadu_pd(p + 1);
      cur[e] = _mm256_loadu_pd(p);
      kg[e] = _mm256_mul_pd(_mm256_set1_pd(a.k_entry[e]), _mm256_mul_pd(_mm256_sub_pd(hi, lo), i2h));
    }
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        const int e = p * d + q;
        const double* pl = a.in + e * a.stride + i;
        const __m256d lap = _mm256_mul_pd(
            _mm256_add_pd(_mm256_loadu_pd(pl - 1), _mm256_fnmadd_pd(two, cur[e], _mm256_loadu_pd(pl + 1))), ih2);
        __m256d v = _mm256_mul_pd(_mm256_set1_pd(a.k_entry[e]), lap);
        for (int r = 0; r < d; ++r) {
          v = _mm256_fmadd_pd(cur[p * d + r], kg[r * d + q], v);
          v = _mm256_fnmadd_pd(kg[p * d + r], cur[r * d + q], v);
        }
        _mm256_storeu_pd(a.out + e * a.stride + i, v);
      }
  }
  if (i <= a.n) {
    // scalar tail over the remaining cells; ghost reads stay in range
    HeatRhsArgs tail = a;
    const int done = i - 1;
    tail.in = a.in + done;
    tail.out = a.out + done;
    tail.n = a.n - done;
    heat_rhs_scalar(tail);
  }
}

bool avx2_available() {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}

void set_force_scalar(bool on) { g_force_scalar = on; }

void heat_rhs(const HeatRhsArgs& a) {
  if (!g_force_scalar && avx2_available())
    heat_rhs_avx2(a);
  else
    heat_rhs_scalar(a);
}

}  // namespace lieheat::simd
