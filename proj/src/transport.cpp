#include "rgmshift/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgmshift/kernels/simd.hpp"

namespace rgmshift::transport {

Vector PointCloud::effective_weights() const {
  if (!weights.empty()) return weights;
  return Vector(points.rows(), 1.0 / static_cast<double>(points.rows()));
}

void PointCloud::validate() const {
  if (points.rows() == 0) throw std::invalid_argument("PointCloud: empty");
  if (weights.empty()) return;
  if (weights.size() != points.rows())
    throw std::invalid_argument("PointCloud: weights size mismatch");
  double s = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("PointCloud: negative weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("PointCloud: weights must sum to 1");
}

std::vector<std::size_t> min_cost_assignment(const Matrix& cost, double* total) {
  const std::size_t n = cost.rows();
  if (cost.cols() != n) throw std::invalid_argument("min_cost_assignment: square matrix required");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials-based shortest augmenting path, 1-indexed internally.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  double c = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[p[j] - 1] = j - 1;
    c += cost(p[j] - 1, j - 1);
  }
  if (total) *total = c;
  return row_to_col;
}

namespace {

Matrix pairwise_sqdist(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      c(i, j) = simd::sqdist(a.row(i), b.row(j), a.cols());
  return c;
}

void require_uniform_equal(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("exact_w2: clouds must have equal sizes");
  if (!a.weights.empty() || !b.weights.empty())
    throw std::invalid_argument("exact_w2: only uniform weights supported");
  if (a.points.cols() != b.points.cols())
    throw std::invalid_argument("exact_w2: dimension mismatch");
}

}  // namespace

double exact_w2(const PointCloud& a, const PointCloud& b, ExactMode mode) {
  a.validate();
  b.validate();
  require_uniform_equal(a, b);
  const std::size_t n = a.size();
  if (mode == ExactMode::automatic)
    mode = n <= 8 ? ExactMode::permutation : ExactMode::assignment;

  Matrix cost = pairwise_sqdist(a.points, b.points);
  double best = 0.0;
  if (mode == ExactMode::permutation) {
    if (n > 8) throw std::invalid_argument("exact_w2: permutation mode capped at n = 8");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t i = 0; i < n; ++i) c += cost(perm[i], i);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    if (n > 200) throw std::invalid_argument("exact_w2: assignment mode capped at n = 200");
    min_cost_assignment(cost, &best);
  }
  return std::sqrt(best / static_cast<double>(n));
}

SinkhornResult sinkhorn_w2(const PointCloud& a, const PointCloud& b, double reg_eps,
                           std::size_t iters) {
  a.validate();
  b.validate();
  if (a.points.cols() != b.points.cols())
    throw std::invalid_argument("sinkhorn_w2: dimension mismatch");
  if (reg_eps <= 0.0) throw std::invalid_argument("sinkhorn_w2: reg_eps must be > 0");
  if (iters < 1) throw std::invalid_argument("sinkhorn_w2: iters must be >= 1");

  const std::size_t n = a.size(), m = b.size();
  Vector wa = a.effective_weights(), wb = b.effective_weights();
  Vector log_wa(n), log_wb(m);
  for (std::size_t i = 0; i < n; ++i)
    log_wa[i] = wa[i] > 0.0 ? std::log(wa[i]) : -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j)
    log_wb[j] = wb[j] > 0.0 ? std::log(wb[j]) : -std::numeric_limits<double>::infinity();

  Matrix cost = pairwise_sqdist(a.points, b.points);
  Matrix cost_t(m, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cost_t(j, i) = cost(i, j);

  // Dual potentials in the log domain: f_i, g_j.
  Vector f(n, 0.0), g(m, 0.0);
  const double inv_eps = 1.0 / reg_eps;
  Vector fg(std::max(n, m));
  std::size_t done = 0;
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < n; ++i)
      f[i] = reg_eps * (log_wa[i] - simd::lse_shifted(g.data(), cost.row(i), inv_eps, m));
    for (std::size_t j = 0; j < m; ++j)
      g[j] = reg_eps * (log_wb[j] - simd::lse_shifted(f.data(), cost_t.row(j), inv_eps, n));
    done = it + 1;
  }

  // Plan pi_ij = exp((f_i + g_j - c_ij)/eps); accumulate cost and marginals.
  SinkhornResult out;
  out.iters = done;
  KahanSum total_cost;
  Vector row_mass(n, 0.0), col_mass(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ci = cost.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      double pij = std::exp((f[i] + g[j] - ci[j]) * inv_eps);
      total_cost.add(pij * ci[j]);
      row_mass[i] += pij;
      col_mass[j] += pij;
    }
  }
  double viol = 0.0;
  for (std::size_t i = 0; i < n; ++i) viol += std::abs(row_mass[i] - wa[i]);
  for (std::size_t j = 0; j < m; ++j) viol += std::abs(col_mass[j] - wb[j]);
  out.residual = viol;
  out.distance = std::sqrt(std::max(0.0, total_cost.value()));
  return out;
}

double gaussian_w2(const Vector& m1, const Vector& cov1, const Vector& m2,
                   const Vector& cov2) {
  if (m1.size() != m2.size() || cov1.size() != m1.size() || cov2.size() != m2.size())
    throw std::invalid_argument("gaussian_w2: dimension mismatch");
  for (std::size_t k = 0; k < cov1.size(); ++k)
    if (!(cov1[k] > 0.0) || !(cov2[k] > 0.0))
      throw std::invalid_argument("gaussian_w2: covariances must be positive");
  double s = 0.0;
  for (std::size_t k = 0; k < m1.size(); ++k) {
    double dm = m1[k] - m2[k];
    double ds = std::sqrt(cov1[k]) - std::sqrt(cov2[k]);
    s += dm * dm + ds * ds;
  }
  return std::sqrt(s);
}

double pseudo_metric_dsigma(const Matrix& z1, const Matrix& z2) {
  if (z1.rows() != z2.rows())
    throw std::invalid_argument("pseudo_metric_dsigma: row count mismatch");
  if (z1.cols() != z2.cols())
    throw std::invalid_argument("pseudo_metric_dsigma: column mismatch");
  const std::size_t n = z1.rows();
  if (n == 1) return std::sqrt(simd::sqdist(z1.row(0), z2.row(0), z1.cols()));
  Matrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost(i, j) = std::sqrt(simd::sqdist(z1.row(i), z2.row(j), z1.cols()));
  double total = 0.0;
  min_cost_assignment(cost, &total);
  return total / static_cast<double>(n);
}

void fit_diagonal_gaussian(const PointCloud& cloud, Vector& mean, Vector& cov_diag) {
  const std::size_t n = cloud.size(), d = cloud.points.cols();
  Vector w = cloud.effective_weights();
  mean.assign(d, 0.0);
  cov_diag.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) mean[k] += w[i] * cloud.points(i, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      double c = cloud.points(i, k) - mean[k];
      cov_diag[k] += w[i] * c * c;
    }
  for (double& v : cov_diag) v = std::max(v, 1e-12);
}

namespace {

double one_class_w2(const PointCloud& a, const PointCloud& b, W2Estimator est,
                    const SinkhornParams& params) {
  switch (est) {
    case W2Estimator::exact:
      return exact_w2(a, b);
    case W2Estimator::sinkhorn:
      return sinkhorn_w2(a, b, params.reg_eps, params.iters).distance;
    case W2Estimator::gaussian_fit: {
      Vector ma, ca, mb, cb;
      fit_diagonal_gaussian(a, ma, ca);
      fit_diagonal_gaussian(b, mb, cb);
      return gaussian_w2(ma, ca, mb, cb);
    }
  }
  throw std::logic_error("one_class_w2: unknown estimator");
}

}  // namespace

double classwise_latent_wd(const std::vector<PointCloud>& source,
                           const std::vector<PointCloud>& target,
                           W2Estimator estimator, ClasswiseAggregate aggregate,
                           const SinkhornParams& params) {
  if (source.size() != target.size() || source.empty())
    throw std::invalid_argument("classwise_latent_wd: class lists must align");
  double acc = aggregate == ClasswiseAggregate::sum ? 0.0
                                                    : -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < source.size(); ++c) {
    double w = one_class_w2(source[c], target[c], estimator, params);
    if (aggregate == ClasswiseAggregate::sum)
      acc += w;
    else
      acc = std::max(acc, w);
  }
  return acc;
}

void DivergenceInputs::validate() const {
  if (rho <= 0.0 || rho >= 1.0) throw std::invalid_argument("DivergenceInputs: rho outside (0,1)");
  if (class_count < 1) throw std::invalid_argument("DivergenceInputs: class_count < 1");
  if (source_clouds.size() != class_count || target_clouds.size() != class_count)
    throw std::invalid_argument("DivergenceInputs: cloud lists must have class_count entries");
  if (m_per_class_source.size() != class_count || m_per_class_target.size() != class_count)
    throw std::invalid_argument("DivergenceInputs: per-class counts must align");
  if (n_nodes_source < 1 || n_nodes_target < 1)
    throw std::invalid_argument("DivergenceInputs: node counts must be >= 1");
  for (std::size_t j = 0; j < class_count; ++j)
    if (m_per_class_source[j] < 1 || m_per_class_target[j] < 1)
      throw std::invalid_argument("DivergenceInputs: graph counts must be >= 1");
}

double delta_d_from_w2(const Vector& w2_per_class, std::size_t class_count,
                       double l2_kernel, double lip_f, double holder_alpha,
                       double c_x, double d_x_cover, double rho,
                       std::size_t n_nodes_source, std::size_t n_nodes_target,
                       const std::vector<std::size_t>& m_source,
                       const std::vector<std::size_t>& m_target) {
  if (d_x_cover <= 0.0)
    throw std::invalid_argument("delta_d: D_X must be positive for the finite-sample terms");
  const double b = std::max(1.0, std::pow(c_x, -d_x_cover));
  const double log_rho = std::pow(std::log(1.0 / rho), 0.25);
  KahanSum sum;
  for (std::size_t j = 0; j < class_count; ++j) {
    double ns = static_cast<double>(n_nodes_source * m_source[j]);
    double nt = static_cast<double>(n_nodes_target * m_target[j]);
    double term = w2_per_class[j] +
                  b * (std::pow(ns, -1.0 / d_x_cover) + std::pow(nt, -1.0 / d_x_cover)) +
                  2.0 * b * std::pow(27.0, d_x_cover / 4.0) +
                  b * log_rho * (std::pow(ns, -0.25) + std::pow(nt, -0.25));
    sum.add(std::pow(term, 2.0 * holder_alpha));
  }
  return 2.0 * static_cast<double>(class_count) * l2_kernel * lip_f * lip_f * sum.value();
}

DeltaDReport delta_d(const DivergenceInputs& inputs, W2Estimator estimator,
                     const SinkhornParams& params, std::optional<double> l_prime) {
  inputs.validate();
  DeltaDReport out;
  out.per_class_w2.resize(inputs.class_count);
  out.per_class_term.resize(inputs.class_count);
  for (std::size_t j = 0; j < inputs.class_count; ++j)
    out.per_class_w2[j] =
        one_class_w2(inputs.source_clouds[j], inputs.target_clouds[j], estimator, params);

  const double b = std::max(1.0, std::pow(inputs.c_x, -inputs.d_x_cover));
  const double log_rho = std::pow(std::log(1.0 / inputs.rho), 0.25);
  for (std::size_t j = 0; j < inputs.class_count; ++j) {
    double ns = static_cast<double>(inputs.n_nodes_source * inputs.m_per_class_source[j]);
    double nt = static_cast<double>(inputs.n_nodes_target * inputs.m_per_class_target[j]);
    double term =
        out.per_class_w2[j] +
        b * (std::pow(ns, -1.0 / inputs.d_x_cover) + std::pow(nt, -1.0 / inputs.d_x_cover)) +
        2.0 * b * std::pow(27.0, inputs.d_x_cover / 4.0) +
        b * log_rho * (std::pow(ns, -0.25) + std::pow(nt, -0.25));
    out.per_class_term[j] = std::pow(term, 2.0 * inputs.holder_alpha);
  }
  out.value = delta_d_from_w2(out.per_class_w2, inputs.class_count, inputs.l2_kernel,
                              inputs.lip_f, inputs.holder_alpha, inputs.c_x,
                              inputs.d_x_cover, inputs.rho, inputs.n_nodes_source,
                              inputs.n_nodes_target, inputs.m_per_class_source,
                              inputs.m_per_class_target);
  if (l_prime) {
    double wmax = *std::max_element(out.per_class_w2.begin(), out.per_class_w2.end());
    double c = static_cast<double>(inputs.class_count);
    out.main_text_variant = 2.0 * c * c * (*l_prime) * wmax;
    out.has_main_text = true;
  }
  return out;
}

}  // namespace rgmshift::transport
