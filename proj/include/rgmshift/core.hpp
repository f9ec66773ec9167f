#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgmshift {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  bool operator==(const Matrix& o) const = default;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

double frobenius_norm(const Matrix& m);
double max_abs_asymmetry(const Matrix& m);

/// Counter-based deterministic RNG: splitmix64-seeded xoshiro256++.
/// Streams derived by split() are statistically independent, so sweeps can
/// hand one stream per (seed, task) pair.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal via polar Box-Muller (exact same stream on every platform).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

  /// Derive an independent child stream; deterministic in (parent seed, tag).
  Rng split(std::uint64_t tag) const;

private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Neumaier compensated accumulator for long sum-product chains.
class KahanSum {
public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Thread cap from RGMSHIFT_THREADS (defaults to hardware concurrency).
unsigned thread_cap();

/// Run fn(i) for i in [0, n) on up to thread_cap() workers. Results must be
/// written to preallocated independent slots to stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct EigenResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns match eigenvalues
  std::size_t sweeps = 0;
  double off_diagonal = 0.0;  // final off-diagonal Frobenius mass
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Stops when the off-diagonal Frobenius norm drops below
/// tol_scale * ||A||_F, or after max_sweeps.
EigenResult jacobi_eigen(const Matrix& a, double tol_scale = 1e-10,
                         std::size_t max_sweeps = 64);

struct SvdResult {
  Matrix u;         // m x k
  Vector singular;  // k, descending, nonnegative
  Matrix v;         // n x k
};

/// One-sided Jacobi SVD for small dense matrices.
SvdResult jacobi_svd(const Matrix& a, std::size_t max_sweeps = 64);

/// Numeric failure inside a forward/backward pass; carries the layer tag.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, const std::string& where)
      : std::runtime_error(what + " at " + where), where_(where) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

class DegenerateGraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class TrainingFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rgmshift
