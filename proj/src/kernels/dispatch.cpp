#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "rgmshift/kernels/simd.hpp"

namespace rgmshift::simd {
namespace {

Backend g_backend = Backend::scalar;
bool g_initialized = false;

Backend pick_backend() {
  if (const char* env = std::getenv("RGMSHIFT_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2())
        throw std::runtime_error("RGMSHIFT_SIMD=avx2 but CPU lacks AVX2");
      return Backend::avx2;
    }
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

void ensure_init() {
  if (!g_initialized) {
    g_backend = pick_backend();
    g_initialized = true;
  }
}

}  // namespace

bool cpu_has_avx2() {
#if defined(RGMSHIFT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() {
  ensure_init();
#if defined(RGMSHIFT_HAVE_AVX2)
  if (g_backend == Backend::avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

Backend active_backend() {
  ensure_init();
  return g_backend;
}

std::string backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2())
    throw std::runtime_error("force_backend: AVX2 unavailable on this CPU");
  g_backend = b;
  g_initialized = true;
}

double logsumexp(const double* x, std::size_t n) {
  double m = active().max(x, n);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

void matvec(const double* w, const double* x, double* y, std::size_t rows,
            std::size_t cols) {
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) y[r] = k.dot(w + r * cols, x, cols);
}

}  // namespace rgmshift::simd
