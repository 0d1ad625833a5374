// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a runtime CPU check, so nothing here may be called unconditionally.

#include <immintrin.h>

#include "fcmm/kernels.hpp"

namespace fcmm::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  std::size_t k = 0;
  double acc = 0.0;
  if (len >= 4) {
    __m256d vacc = _mm256_setzero_pd();
    for (; k + 4 <= len; k += 4) {
      vacc = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k),
                             vacc);
    }
    acc = hsum(vacc);
  }
  for (; k < len; ++k) acc += a[k] * b[k];
  return acc;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t len) {
  std::size_t k = 0;
  double acc = 0.0;
  if (len >= 4) {
    __m256d vacc = _mm256_setzero_pd();
    for (; k + 4 <= len; k += 4) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
      vacc = _mm256_fmadd_pd(diff, diff, vacc);
    }
    acc = hsum(vacc);
  }
  for (; k < len; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t len) {
  const __m256d valpha = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(valpha, _mm256_loadu_pd(x + k),
                                            _mm256_loadu_pd(y + k)));
  }
  for (; k < len; ++k) y[k] += alpha * x[k];
}

void row_dots_avx2(const double* rows, std::size_t n, std::size_t d,
                   const double* v, double* out) {
  if (d >= 4) {
    for (std::size_t i = 0; i < n; ++i) out[i] = dot_avx2(rows + i * d, v, d);
    return;
  }
  // Short rows: vectorize across points instead, four rows per step.
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      const __m256d col =
          _mm256_set_pd(rows[(i + 3) * d + k], rows[(i + 2) * d + k],
                        rows[(i + 1) * d + k], rows[i * d + k]);
      acc = _mm256_fmadd_pd(col, _mm256_set1_pd(v[k]), acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += rows[i * d + k] * v[k];
    out[i] = acc;
  }
}

void affine_bracket_avx2(const double* base, const double* cross,
                         double offset, double scale, double* out,
                         std::size_t n) {
  const __m256d voffset = _mm256_set1_pd(offset);
  const __m256d vscale = _mm256_set1_pd(2.0 * scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d shifted = _mm256_add_pd(_mm256_loadu_pd(base + i), voffset);
    _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(vscale,
                                               _mm256_loadu_pd(cross + i),
                                               shifted));
  }
  for (; i < n; ++i) out[i] = base[i] + offset - 2.0 * scale * cross[i];
}

}  // namespace

const KernelTable avx2_table{
    dot_avx2, sq_dist_avx2, axpy_avx2, row_dots_avx2, affine_bracket_avx2,
};

}  // namespace fcmm::kernels::detail
