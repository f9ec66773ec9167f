#pragma once

#include <vector>

#include "rgmshift/core.hpp"

namespace rgmshift::transport {

struct PointCloud {
  Matrix points;   // n x d
  Vector weights;  // empty => uniform 1/n

  std::size_t size() const { return points.rows(); }
  Vector effective_weights() const;
  void validate() const;
};

/// Min-cost perfect matching on a square cost matrix (Jonker-Volgenant style
/// shortest augmenting paths). Returns row -> column assignment.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost, double* total = nullptr);

enum class ExactMode { automatic, permutation, assignment };

/// Exact W2 (squared-Euclidean cost, square-rooted) for equal-size uniform
/// clouds: brute-force permutations up to n = 8, assignment solver up to 200.
double exact_w2(const PointCloud& a, const PointCloud& b,
                ExactMode mode = ExactMode::automatic);

struct SinkhornResult {
  double distance = 0.0;  // sqrt of the entropic transport cost
  double residual = 0.0;  // L1 marginal violation of the returned plan
  std::size_t iters = 0;
};

/// Log-domain entropic OT under squared-Euclidean ground cost.
SinkhornResult sinkhorn_w2(const PointCloud& a, const PointCloud& b, double reg_eps,
                           std::size_t iters);

/// Commuting-covariance Bures form for diagonal Gaussians.
double gaussian_w2(const Vector& m1, const Vector& cov1, const Vector& m2,
                   const Vector& cov2);

/// d_Sigma: (1/N) min over row permutations of the summed row-wise Euclidean
/// distance; exact via assignment.
double pseudo_metric_dsigma(const Matrix& z1, const Matrix& z2);

enum class W2Estimator { exact, sinkhorn, gaussian_fit };
enum class ClasswiseAggregate { sum, max };

struct SinkhornParams {
  double reg_eps = 0.1;
  std::size_t iters = 1000;
};

double classwise_latent_wd(const std::vector<PointCloud>& source,
                           const std::vector<PointCloud>& target,
                           W2Estimator estimator, ClasswiseAggregate aggregate,
                           const SinkhornParams& params = {});

struct DivergenceInputs {
  std::vector<PointCloud> source_clouds;  // one per class
  std::vector<PointCloud> target_clouds;
  std::size_t class_count = 0;
  double l2_kernel = 1.0;  // L_2 of the vRKHS kernel smoothness assumption
  double lip_f = 1.0;
  double holder_alpha = 1.0;
  double c_x = 1.0;
  double d_x_cover = 1.0;
  double rho = 0.1;
  std::size_t n_nodes_source = 1;  // N_S
  std::size_t n_nodes_target = 1;  // N_T
  std::vector<std::size_t> m_per_class_source;
  std::vector<std::size_t> m_per_class_target;

  void validate() const;
};

struct DeltaDReport {
  double value = 0.0;            // appendix sum form
  Vector per_class_w2;           // estimated class-wise W2 hats
  Vector per_class_term;         // bracketed term^(2 alpha) per class
  double main_text_variant = 0.0;  // 2 C^2 L' max_j W2, if l_prime given
  bool has_main_text = false;
};

/// Domain divergence Delta_D. Per-class W2-hat values come from the chosen
/// estimator on the provided clouds; pass l_prime to also report the
/// main-text max-aggregated variant.
DeltaDReport delta_d(const DivergenceInputs& inputs, W2Estimator estimator,
                     const SinkhornParams& params = {},
                     std::optional<double> l_prime = std::nullopt);

/// Same formula with externally supplied per-class W2 values (used by bound
/// sweeps that never touch clouds).
double delta_d_from_w2(const Vector& w2_per_class, std::size_t class_count,
                       double l2_kernel, double lip_f, double holder_alpha,
                       double c_x, double d_x_cover, double rho,
                       std::size_t n_nodes_source, std::size_t n_nodes_target,
                       const std::vector<std::size_t>& m_source,
                       const std::vector<std::size_t>& m_target);

/// Diagonal-Gaussian moment fit of a cloud (used by the gaussian_fit path).
void fit_diagonal_gaussian(const PointCloud& cloud, Vector& mean, Vector& cov_diag);

}  // namespace rgmshift::transport
