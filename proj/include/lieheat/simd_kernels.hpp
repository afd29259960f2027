#pragma once

#include <cstddef>

namespace lieheat::simd {

/// Matrix field in plane layout: entry (p, q) of cell i lives at in[(p*d + q)*stride + i].
/// Cells 1..n are interior; 0 and n+1 are ghost cells filled by the caller.
struct HeatRhsArgs {
  int d = 0;
  int n = 0;
  std::size_t stride = 0;
  const double* in = nullptr;
  double* out = nullptr;
  const double* k_entry = nullptr;  // d*d diffusion factors, one per matrix entry
  double inv_h2 = 0;
  double inv_2h = 0;
};

/// out = k lap(A) + [A, k grad(A)] on cells 1..n, central differences.
void heat_rhs_scalar(const HeatRhsArgs& a);
/// AVX2/FMA variant; only call when avx2_available().
void heat_rhs_avx2(const HeatRhsArgs& a);
/// Runtime dispatch between the two.
void heat_rhs(const HeatRhsArgs& a);

bool avx2_available();
/// Force the scalar path (tests and benchmarks).
void set_force_scalar(bool on);

}  // namespace lieheat::simd
