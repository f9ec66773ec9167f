#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rgmshift/core.hpp"

namespace rgmshift::rgm {

struct KernelRegularities {
  double w_max = 1.0;      // W_max, upper bound on kernel values
  double d_min = 1e-3;     // lower bound on the kernel degree
  double lip_w_inf = 0.0;  // L_W^inf
  double c_grad_w = 0.0;   // C_grad_w for translation-invariant kernels
};

struct ConstantKernel {
  double p = 0.5;
};

// Linear ramp of width `smoothing` between hi (inside the ball) and lo.
// smoothing = 0 is the hard indicator, which is not Lipschitz.
struct EpsilonBallKernel {
  double eps = 1.0;
  double hi = 1.0;
  double lo = 0.0;
  double smoothing = 0.0;
};

// Translation invariant: W(x, y) = scale * exp(-|x-y|^2 / (2 sigma^2)).
struct GaussianTiKernel {
  double sigma = 1.0;
  double scale = 1.0;
};

struct KernelSpec {
  std::variant<ConstantKernel, EpsilonBallKernel, GaussianTiKernel> kind;
  KernelRegularities reg;

  void validate() const;
};

struct SpaceConstants {
  double c_x = 1.0;        // covering constant C_X
  double d_x_cover = 1.0;  // covering dimension D_X
};

struct GaussianLatent {
  Vector mean;
  Vector cov_diag;
};

struct LatentSpec {
  std::size_t dim = 1;
  GaussianLatent dist;
  SpaceConstants space;

  void validate() const;
};

struct FeatureRegularities {
  double lip_f = 1.0;
  double holder_alpha = 1.0;  // in (0, 1]
  double f_inf = 1.0;
};

struct ZeroPadFeature {
  std::size_t out_dim = 1;
};

struct LinearFeature {
  Matrix matrix;  // out_dim x latent_dim
};

struct FeatureMapSpec {
  std::variant<ZeroPadFeature, LinearFeature> kind;
  FeatureRegularities reg;

  std::size_t out_dim(std::size_t latent_dim) const;
  void apply(const double* x, std::size_t latent_dim, double* out) const;
  void validate(std::size_t latent_dim) const;
};

struct RgmSpec {
  KernelSpec kernel;
  LatentSpec latent;
  FeatureMapSpec feature;
  int class_label = 0;

  void validate() const;
};

struct Graph {
  std::size_t n = 0;
  Matrix adjacency;               // n x n symmetric
  Matrix signals;                 // n x F
  std::optional<Matrix> latents;  // n x D
  int label = 0;
  bool binary = false;
};

struct AffineDeformation {
  double scale = 0.0;  // tau(x) = scale * x + shift
  Vector shift;
};

struct DeformationRegularities {
  double grad_tau_inf = 0.0;  // must stay <= 1/2
  double n_p_tau = 0.0;       // N_{P_tau}
  double c_p_tau = 1.0;       // C_{P_tau} >= 1
};

struct DeformationSpec {
  AffineDeformation affine;
  DeformationRegularities reg;

  static DeformationSpec make_affine(double scale, Vector shift,
                                     double n_p_tau = 0.0, double c_p_tau = 1.0) {
    DeformationSpec d;
    d.affine = {scale, std::move(shift)};
    d.reg = {std::abs(scale), n_p_tau, c_p_tau};
    return d;
  }

  void validate() const;
};

/// Graph-size law: a fixed N or a uniform integer range [lo, hi].
struct GraphSize {
  std::size_t lo = 1;
  std::size_t hi = 1;
  static GraphSize fixed(std::size_t n) { return {n, n}; }
  static GraphSize uniform(std::size_t lo, std::size_t hi) { return {lo, hi}; }
  std::size_t draw(Rng& rng) const;
};

Matrix sample_latents(const LatentSpec& latent, std::size_t n, std::uint64_t seed);

double eval_kernel(const KernelSpec& kernel, std::span<const double> x,
                   std::span<const double> y);

Graph sample_graph(const RgmSpec& rgm, std::size_t n, bool realize_bernoulli,
                   std::uint64_t seed);

std::vector<Graph> generate_dataset(const std::vector<RgmSpec>& class_rgms,
                                    const GraphSize& n_per_graph,
                                    const std::vector<std::size_t>& m_per_class,
                                    std::uint64_t seed,
                                    bool realize_bernoulli = false);

double discrete_kernel_degree(const KernelSpec& kernel, std::span<const double> x,
                              const Matrix& points);

struct MonteCarloEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

MonteCarloEstimate continuous_kernel_degree(const KernelSpec& kernel,
                                            std::span<const double> x,
                                            const LatentSpec& latent,
                                            std::size_t mc_samples,
                                            std::uint64_t seed);

/// Deformed RGM: kernel W_tau(x,y) = W(x - tau(x), y - tau(y)) and latent
/// pushforward (Id - tau)#P. For affine tau both stay in closed form.
RgmSpec apply_deformation(const RgmSpec& rgm, const DeformationSpec& tau);

}  // namespace rgmshift::rgm
