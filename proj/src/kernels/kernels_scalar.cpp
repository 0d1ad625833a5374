#include "fcmm/kernels.hpp"

namespace fcmm::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) acc += a[k] * b[k];
  return acc;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) y[k] += alpha * x[k];
}

void row_dots_scalar(const double* rows, std::size_t n, std::size_t d,
                     const double* v, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_scalar(rows + i * d, v, d);
}

void affine_bracket_scalar(const double* base, const double* cross,
                           double offset, double scale, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = base[i] + offset - 2.0 * scale * cross[i];
  }
}

}  // namespace

const KernelTable scalar_table{
    dot_scalar, sq_dist_scalar, axpy_scalar, row_dots_scalar,
    affine_bracket_scalar,
};

}  // namespace fcmm::kernels::detail
