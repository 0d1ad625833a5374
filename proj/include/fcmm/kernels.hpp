#ifndef FCMM_KERNELS_HPP
#define FCMM_KERNELS_HPP

// Data-parallel inner loops shared by the objective and solver code.
//
// Every kernel has a scalar reference version plus optional SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64). The variant is chosen once at
// startup from the CPU's capabilities; FCMM_KERNELS=scalar|avx2|neon in the
// environment overrides the choice. All variants keep the summation order
// over points fixed (ascending index); they only differ in how the short
// d-dimensional dot products are reduced.

#include <cstddef>
#include <span>
#include <string_view>

namespace fcmm::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  // a . b
  double (*dot)(const double* a, const double* b, std::size_t len);
  // |a - b|^2
  double (*sq_dist)(const double* a, const double* b, std::size_t len);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t len);
  // out[i] = rows[i*d .. i*d+d) . v  for i in [0, n)
  void (*row_dots)(const double* rows, std::size_t n, std::size_t d,
                   const double* v, double* out);
  // out[i] = base[i] + offset - 2 * scale * cross[i]
  void (*affine_bracket)(const double* base, const double* cross,
                         double offset, double scale, double* out,
                         std::size_t n);
};

const KernelTable& table(Backend backend);
bool supported(Backend backend);

// The backend used by the library. Selected lazily on first use.
Backend active_backend();
const KernelTable& active();

// Forces a backend for the rest of the process. Throws std::invalid_argument
// when the CPU or build does not support it.
void select(Backend backend);

std::string_view name(Backend backend);
Backend parse_backend(std::string_view text);

// Span conveniences over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  return active().sq_dist(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(FCMM_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif
#if defined(FCMM_HAVE_NEON_KERNELS)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace fcmm::kernels

#endif  // FCMM_KERNELS_HPP
