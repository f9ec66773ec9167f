#include "rgmshift/rgm.hpp"

#include <algorithm>
#include <cmath>

#include "rgmshift/kernels/simd.hpp"

namespace rgmshift::rgm {

void KernelSpec::validate() const {
  if (!(reg.d_min > 0.0) || reg.d_min > reg.w_max)
    throw std::invalid_argument("KernelSpec: need 0 < d_min <= w_max");
  if (reg.lip_w_inf < 0.0) throw std::invalid_argument("KernelSpec: lip_w_inf < 0");
  if (const auto* e = std::get_if<EpsilonBallKernel>(&kind)) {
    if (e->eps <= 0.0 || e->smoothing < 0.0 || e->hi < e->lo || e->lo < 0.0)
      throw std::invalid_argument("KernelSpec: bad epsilon_ball parameters");
  } else if (const auto* g = std::get_if<GaussianTiKernel>(&kind)) {
    if (g->sigma <= 0.0 || g->scale < 0.0)
      throw std::invalid_argument("KernelSpec: bad gaussian_ti parameters");
  } else {
    const auto& c = std::get<ConstantKernel>(kind);
    if (c.p < 0.0 || c.p > 1.0)
      throw std::invalid_argument("KernelSpec: constant p outside [0, 1]");
  }
}

void LatentSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("LatentSpec: dim must be >= 1");
  if (dist.mean.size() != dim || dist.cov_diag.size() != dim)
    throw std::invalid_argument("LatentSpec: mean/cov_diag dim mismatch");
  for (double v : dist.cov_diag)
    if (!(v > 0.0)) throw std::invalid_argument("LatentSpec: cov_diag entries must be > 0");
  if (!(space.c_x > 0.0) || space.d_x_cover < 0.0)
    throw std::invalid_argument("LatentSpec: bad covering constants");
}

std::size_t FeatureMapSpec::out_dim(std::size_t latent_dim) const {
  if (const auto* z = std::get_if<ZeroPadFeature>(&kind)) return z->out_dim;
  return std::get<LinearFeature>(kind).matrix.rows();
}

void FeatureMapSpec::apply(const double* x, std::size_t latent_dim, double* out) const {
  if (const auto* z = std::get_if<ZeroPadFeature>(&kind)) {
    for (std::size_t k = 0; k < z->out_dim; ++k) out[k] = k < latent_dim ? x[k] : 0.0;
    return;
  }
  const Matrix& m = std::get<LinearFeature>(kind).matrix;
  simd::matvec(m.data(), x, out, m.rows(), m.cols());
}

void FeatureMapSpec::validate(std::size_t latent_dim) const {
  if (reg.holder_alpha <= 0.0 || reg.holder_alpha > 1.0)
    throw std::invalid_argument("FeatureMapSpec: holder_alpha outside (0, 1]");
  if (reg.lip_f < 0.0) throw std::invalid_argument("FeatureMapSpec: lip_f < 0");
  if (const auto* z = std::get_if<ZeroPadFeature>(&kind)) {
    if (z->out_dim < latent_dim)
      throw std::invalid_argument("FeatureMapSpec: zero_pad out_dim < latent dim");
  } else if (std::get<LinearFeature>(kind).matrix.cols() != latent_dim) {
    throw std::invalid_argument("FeatureMapSpec: linear matrix cols != latent dim");
  }
}

void RgmSpec::validate() const {
  kernel.validate();
  latent.validate();
  feature.validate(latent.dim);
}

void DeformationSpec::validate() const {
  if (std::abs(affine.scale) != reg.grad_tau_inf)
    throw std::invalid_argument("DeformationSpec: grad_tau_inf must equal |scale|");
  if (reg.grad_tau_inf > 0.5)
    throw std::invalid_argument("DeformationSpec: |grad tau| must stay <= 1/2");
  if (reg.n_p_tau < 0.0 || reg.c_p_tau < 1.0)
    throw std::invalid_argument("DeformationSpec: bad distribution constants");
}

std::size_t GraphSize::draw(Rng& rng) const {
  if (lo < 1 || hi < lo) throw std::invalid_argument("GraphSize: bad range");
  if (lo == hi) return lo;
  return lo + rng.uniform_int(hi - lo + 1);
}

Matrix sample_latents(const LatentSpec& latent, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_latents: n must be >= 1");
  latent.validate();
  Rng rng(seed);
  Matrix x(n, latent.dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < latent.dim; ++k)
      x(i, k) = latent.dist.mean[k] + std::sqrt(latent.dist.cov_diag[k]) * rng.normal();
  return x;
}

double eval_kernel(const KernelSpec& kernel, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("eval_kernel: latent dimension mismatch");
  if (const auto* c = std::get_if<ConstantKernel>(&kernel.kind)) return c->p;
  double r2 = simd::sqdist(x.data(), y.data(), x.size());
  if (const auto* g = std::get_if<GaussianTiKernel>(&kernel.kind))
    return g->scale * std::exp(-r2 / (2.0 * g->sigma * g->sigma));
  const auto& e = std::get<EpsilonBallKernel>(kernel.kind);
  double r = std::sqrt(r2);
  if (r <= e.eps) return e.hi;
  if (e.smoothing <= 0.0 || r >= e.eps + e.smoothing) return e.lo;
  double t = (r - e.eps) / e.smoothing;
  return e.hi + t * (e.lo - e.hi);
}

Graph sample_graph(const RgmSpec& rgm, std::size_t n, bool realize_bernoulli,
                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_graph: n must be >= 1");
  rgm.validate();
  Graph g;
  g.n = n;
  g.label = rgm.class_label;
  g.binary = realize_bernoulli;
  g.latents = sample_latents(rgm.latent, n, seed);
  const Matrix& x = *g.latents;

  g.adjacency = Matrix(n, n);
  Rng edge_rng = Rng(seed).split(0x9edaULL);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {  // self-loop a_ii included
      double w = eval_kernel(rgm.kernel, x.row_span(i), x.row_span(j));
      if (realize_bernoulli) w = edge_rng.bernoulli(std::clamp(w, 0.0, 1.0)) ? 1.0 : 0.0;
      g.adjacency(i, j) = w;
      g.adjacency(j, i) = w;
    }
  }

  std::size_t f = rgm.feature.out_dim(rgm.latent.dim);
  g.signals = Matrix(n, f);
  for (std::size_t i = 0; i < n; ++i)
    rgm.feature.apply(x.row(i), rgm.latent.dim, g.signals.row(i));
  return g;
}

std::vector<Graph> generate_dataset(const std::vector<RgmSpec>& class_rgms,
                                    const GraphSize& n_per_graph,
                                    const std::vector<std::size_t>& m_per_class,
                                    std::uint64_t seed, bool realize_bernoulli) {
  if (class_rgms.empty())
    throw std::invalid_argument("generate_dataset: empty class list");
  if (m_per_class.size() != class_rgms.size())
    throw std::invalid_argument("generate_dataset: m_per_class size mismatch");
  std::size_t dim = class_rgms.front().latent.dim;
  for (const auto& r : class_rgms)
    if (r.latent.dim != dim)
      throw std::invalid_argument("generate_dataset: classes must share latent dim");

  Rng root(seed);
  std::vector<Graph> out;
  for (std::size_t j = 0; j < class_rgms.size(); ++j) {
    for (std::size_t i = 0; i < m_per_class[j]; ++i) {
      Rng task = root.split(j * 1000003ULL + i);
      std::size_t n = n_per_graph.draw(task);
      out.push_back(sample_graph(class_rgms[j], n, realize_bernoulli, task.next_u64()));
    }
  }
  return out;
}

double discrete_kernel_degree(const KernelSpec& kernel, std::span<const double> x,
                              const Matrix& points) {
  if (points.rows() == 0)
    throw std::invalid_argument("discrete_kernel_degree: empty point set");
  KahanSum s;
  for (std::size_t i = 0; i < points.rows(); ++i)
    s.add(eval_kernel(kernel, x, points.row_span(i)));
  return s.value() / static_cast<double>(points.rows());
}

MonteCarloEstimate continuous_kernel_degree(const KernelSpec& kernel,
                                            std::span<const double> x,
                                            const LatentSpec& latent,
                                            std::size_t mc_samples,
                                            std::uint64_t seed) {
  if (mc_samples < 1)
    throw std::invalid_argument("continuous_kernel_degree: mc_samples must be >= 1");
  Matrix y = sample_latents(latent, mc_samples, seed);
  KahanSum sum, sumsq;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    double w = eval_kernel(kernel, x, y.row_span(i));
    sum.add(w);
    sumsq.add(w * w);
  }
  double n = static_cast<double>(mc_samples);
  double mean = sum.value() / n;
  double var = std::max(0.0, sumsq.value() / n - mean * mean);
  MonteCarloEstimate est;
  est.value = mean;
  est.stderr_ = mc_samples > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return est;
}

RgmSpec apply_deformation(const RgmSpec& rgm, const DeformationSpec& tau) {
  tau.validate();
  rgm.validate();
  if (tau.affine.shift.size() != rgm.latent.dim)
    throw std::invalid_argument("apply_deformation: shift dim mismatch");

  // (Id - tau)(x) = a x - b with a = 1 - scale, b = shift.
  double a = 1.0 - tau.affine.scale;
  RgmSpec out = rgm;

  // Pushforward of N(m, S) under x -> a x - b is N(a m - b, a^2 S).
  for (std::size_t k = 0; k < rgm.latent.dim; ++k) {
    out.latent.dist.mean[k] = a * rgm.latent.dist.mean[k] - tau.affine.shift[k];
    out.latent.dist.cov_diag[k] = a * a * rgm.latent.dist.cov_diag[k];
  }

  // All kernel kinds depend on x - y only, so W_tau(x,y) = W(a(x-y)) stays
  // in-family: distances rescale by |a|, the shift cancels.
  double aa = std::abs(a);
  if (auto* e = std::get_if<EpsilonBallKernel>(&out.kernel.kind)) {
    if (aa > 0.0) {
      e->eps /= aa;
      e->smoothing /= aa;
    }
  } else if (auto* g = std::get_if<GaussianTiKernel>(&out.kernel.kind)) {
    if (aa > 0.0) g->sigma /= aa;
  }
  out.kernel.reg.lip_w_inf = rgm.kernel.reg.lip_w_inf * aa;
  return out;
}

}  // namespace rgmshift::rgm
