#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the numeric modules. Every kernel has a
// scalar reference implementation and an AVX2 variant; the active backend is
// picked once at startup from CPU features (override with RGMSHIFT_SIMD or
// force_backend). SIMD variants must agree with the scalar reference to
// floating-point reassociation tolerance; tests/test_kernels.cpp enforces it.

namespace rgmshift::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);  // y += a*x
  void (*scale)(double, double*, std::size_t);                // x *= a
  double (*sqdist)(const double*, const double*, std::size_t);
  // log sum_j exp((g[j] - c[j]) * inv_eps); the Sinkhorn row update.
  double (*lse_shifted)(const double*, const double*, double, std::size_t);
};

const KernelTable& active();
Backend active_backend();
std::string backend_name();

/// Force a backend (tests); throws if unsupported on this CPU.
void force_backend(Backend b);

bool cpu_has_avx2();

extern const KernelTable kScalarTable;
#if defined(RGMSHIFT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

// Convenience forwarding wrappers.
inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double max(const double* a, std::size_t n) { return active().max(a, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void scale(double a, double* x, std::size_t n) { active().scale(a, x, n); }
inline double sqdist(const double* a, const double* b, std::size_t n) {
  return active().sqdist(a, b, n);
}
inline double lse_shifted(const double* g, const double* c, double inv_eps,
                          std::size_t n) {
  return active().lse_shifted(g, c, inv_eps, n);
}
/// log sum exp(x_j), max-shifted.
double logsumexp(const double* x, std::size_t n);

/// y = W x for row-major W (rows x cols).
void matvec(const double* w, const double* x, double* y, std::size_t rows,
            std::size_t cols);

}  // namespace rgmshift::simd
