#include <arm_neon.h>

#include "fcmm/kernels.hpp"

namespace fcmm::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t len) {
  std::size_t k = 0;
  double acc = 0.0;
  if (len >= 2) {
    float64x2_t vacc = vdupq_n_f64(0.0);
    for (; k + 2 <= len; k += 2) {
      vacc = vfmaq_f64(vacc, vld1q_f64(a + k), vld1q_f64(b + k));
    }
    acc = vaddvq_f64(vacc);
  }
  for (; k < len; ++k) acc += a[k] * b[k];
  return acc;
}

double sq_dist_neon(const double* a, const double* b, std::size_t len) {
  std::size_t k = 0;
  double acc = 0.0;
  if (len >= 2) {
    float64x2_t vacc = vdupq_n_f64(0.0);
    for (; k + 2 <= len; k += 2) {
      const float64x2_t diff = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
      vacc = vfmaq_f64(vacc, diff, diff);
    }
    acc = vaddvq_f64(vacc);
  }
  for (; k < len; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t len) {
  const float64x2_t valpha = vdupq_n_f64(alpha);
  std::size_t k = 0;
  for (; k + 2 <= len; k += 2) {
    vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), valpha, vld1q_f64(x + k)));
  }
  for (; k < len; ++k) y[k] += alpha * x[k];
}

void row_dots_neon(const double* rows, std::size_t n, std::size_t d,
                   const double* v, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_neon(rows + i * d, v, d);
}

void affine_bracket_neon(const double* base, const double* cross,
                         double offset, double scale, double* out,
                         std::size_t n) {
  const float64x2_t voffset = vdupq_n_f64(offset);
  const float64x2_t vscale = vdupq_n_f64(2.0 * scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t shifted = vaddq_f64(vld1q_f64(base + i), voffset);
    vst1q_f64(out + i, vfmsq_f64(shifted, vscale, vld1q_f64(cross + i)));
  }
  for (; i < n; ++i) out[i] = base[i] + offset - 2.0 * scale * cross[i];
}

}  // namespace

const KernelTable neon_table{
    dot_neon, sq_dist_neon, axpy_neon, row_dots_neon, affine_bracket_neon,
};

}  // namespace fcmm::kernels::detail
