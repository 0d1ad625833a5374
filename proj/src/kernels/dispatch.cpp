#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fcmm/kernels.hpp"

namespace fcmm::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(FCMM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* forced = std::getenv("FCMM_KERNELS");
      forced != nullptr && *forced != '\0') {
    try {
      const Backend wanted = parse_backend(forced);
      if (supported(wanted)) return wanted;
    } catch (const std::invalid_argument&) {
      // unknown names fall through to auto-detection
    }
  }
  if (supported(Backend::avx2)) return Backend::avx2;
  if (supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct Selection {
  std::atomic<int> backend;
  std::atomic<const KernelTable*> kernels;
};

Selection& current() {
  static Selection selection = [] {
    const Backend backend = detect();
    return Selection{static_cast<int>(backend), &table(backend)};
  }();
  return selection;
}

}  // namespace

bool supported(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
    case Backend::neon:
#if defined(FCMM_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend backend) {
  if (!supported(backend)) {
    throw std::invalid_argument("kernel backend '" + std::string(name(backend)) +
                                "' is not available on this machine");
  }
  switch (backend) {
#if defined(FCMM_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return detail::avx2_table;
#endif
#if defined(FCMM_HAVE_NEON_KERNELS)
    case Backend::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

Backend active_backend() {
  return static_cast<Backend>(current().backend.load(std::memory_order_acquire));
}

const KernelTable& active() {
  return *current().kernels.load(std::memory_order_acquire);
}

void select(Backend backend) {
  const KernelTable& kernels = table(backend);
  current().kernels.store(&kernels, std::memory_order_release);
  current().backend.store(static_cast<int>(backend), std::memory_order_release);
}

std::string_view name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view text) {
  if (text == "scalar") return Backend::scalar;
  if (text == "avx2") return Backend::avx2;
  if (text == "neon") return Backend::neon;
  throw std::invalid_argument("unknown kernel backend '" + std::string(text) +
                              "'");
}

}  // namespace fcmm::kernels
