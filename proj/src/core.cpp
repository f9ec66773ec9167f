#include "rgmshift/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>

namespace rgmshift {

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
  return std::sqrt(s);
}

double max_abs_asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // Rejection sampling keeps the draw unbiased.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

Rng Rng::split(std::uint64_t tag) const {
  std::uint64_t sm = seed_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1));
  return Rng(splitmix64(sm));
}

unsigned thread_cap() {
  if (const char* env = std::getenv("RGMSHIFT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned workers = std::min<std::size_t>(thread_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mu;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EigenResult jacobi_eigen(const Matrix& a, double tol_scale, std::size_t max_sweeps) {
  if (a.rows() != a.cols()) throw std::invalid_argument("jacobi_eigen: square matrix required");
  const std::size_t n = a.rows();
  Matrix m = a;
  Matrix q = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * m(i, j) * m(i, j);
    return std::sqrt(s);
  };

  const double tol = tol_scale * std::max(frobenius_norm(a), 1e-300);
  std::size_t sweep = 0;
  double off = off_norm();
  while (off > tol && sweep < max_sweeps) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        double apq = m(p, r);
        if (apq == 0.0) continue;
        double app = m(p, p), aqq = m(r, r);
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, r);
          m(k, p) = c * mkp - s * mkq;
          m(k, r) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double mpk = m(p, k), mqk = m(r, k);
          m(p, k) = c * mpk - s * mqk;
          m(r, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double qkp = q(k, p), qkq = q(k, r);
          q(k, p) = c * qkp - s * qkq;
          q(k, r) = s * qkp + c * qkq;
        }
      }
    }
    ++sweep;
    off = off_norm();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });

  EigenResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = m(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = q(i, order[j]);
  }
  out.sweeps = sweep;
  out.off_diagonal = off;
  return out;
}

SvdResult jacobi_svd(const Matrix& a, std::size_t max_sweeps) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix u = a;                    // columns orthogonalized in place
  Matrix v = Matrix::identity(n);

  auto col_dot = [&](const Matrix& x, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * x(r, j);
    return s;
  };

  const double eps = 1e-14;
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = col_dot(u, p, p), aqq = col_dot(u, q, q), apq = col_dot(u, p, q);
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) + 1e-300) continue;
        converged = false;
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t r = 0; r < m; ++r) {
          double urp = u(r, p), urq = u(r, q);
          u(r, p) = c * urp - s * urq;
          u(r, q) = s * urp + c * urq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
    if (converged) break;
  }

  SvdResult out;
  out.singular.resize(n);
  out.u = Matrix(m, n);
  out.v = Matrix(n, n);
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) {
    order[j] = j;
    out.singular[j] = std::sqrt(std::max(0.0, col_dot(u, j, j)));
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return out.singular[i] > out.singular[j];
  });
  Vector sorted(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    sorted[j] = out.singular[src];
    double inv = out.singular[src] > 1e-300 ? 1.0 / out.singular[src] : 0.0;
    for (std::size_t r = 0; r < m; ++r) out.u(r, j) = u(r, src) * inv;
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
  }
  out.singular = std::move(sorted);
  return out;
}

}  // namespace rgmshift
