#include "rgmshift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgmshift/kernels/simd.hpp"

namespace rgmshift::spectral {

int WlLabeler::compress(const std::string& key) {
  auto [it, inserted] = table_.try_emplace(key, static_cast<int>(table_.size()));
  return it->second;
}

namespace {

std::vector<std::vector<std::size_t>> neighbor_lists(const rgm::Graph& g,
                                                     double threshold) {
  std::vector<std::vector<std::size_t>> nbr(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      if (i != j && g.adjacency(i, j) > threshold) nbr[i].push_back(j);
  return nbr;
}

std::vector<int> initial_labels(const rgm::Graph& g, WlLabeler& labeler,
                                const WlOptions& opts,
                                const std::vector<std::vector<std::size_t>>& nbr) {
  std::vector<int> labels(g.n);
  if (!opts.initial_labels.empty()) {
    if (opts.initial_labels.size() != g.n)
      throw std::invalid_argument("wl_features: initial_labels size mismatch");
    for (std::size_t i = 0; i < g.n; ++i) {
      std::ostringstream key;
      key << "raw:" << opts.initial_labels[i];
      labels[i] = labeler.compress(key.str());
    }
    return labels;
  }
  // Degree binning: equal-width bins over the observed degree range.
  std::size_t max_deg = 0;
  for (const auto& v : nbr) max_deg = std::max(max_deg, v.size());
  std::size_t bins = std::max<std::size_t>(1, opts.degree_bins);
  for (std::size_t i = 0; i < g.n; ++i) {
    std::size_t bin =
        max_deg == 0 ? 0 : std::min(bins - 1, nbr[i].size() * bins / (max_deg + 1));
    std::ostringstream key;
    key << "deg:" << bin;
    labels[i] = labeler.compress(key.str());
  }
  return labels;
}

}  // namespace

WlFeatures wl_features(const rgm::Graph& graph, std::size_t h, WlLabeler& labeler,
                       const WlOptions& opts) {
  auto nbr = neighbor_lists(graph, opts.edge_threshold);
  std::vector<int> labels = initial_labels(graph, labeler, opts, nbr);

  WlFeatures out;
  out.counts.resize(h + 1);
  for (std::size_t i = 0; i < graph.n; ++i) ++out.counts[0][labels[i]];

  for (std::size_t it = 1; it <= h; ++it) {
    std::vector<int> next(graph.n);
    for (std::size_t i = 0; i < graph.n; ++i) {
      std::vector<int> multiset;
      multiset.reserve(nbr[i].size());
      for (std::size_t j : nbr[i]) multiset.push_back(labels[j]);
      std::sort(multiset.begin(), multiset.end());
      std::ostringstream key;
      key << labels[i] << '|';
      for (int l : multiset) key << l << ',';
      next[i] = labeler.compress(key.str());
    }
    labels = std::move(next);
    for (std::size_t i = 0; i < graph.n; ++i) ++out.counts[it][labels[i]];
  }
  return out;
}

double wl_kernel(const WlFeatures& a, const WlFeatures& b) {
  double s = 0.0;
  std::size_t h = std::min(a.counts.size(), b.counts.size());
  for (std::size_t it = 0; it < h; ++it) {
    const auto& ca = a.counts[it];
    const auto& cb = b.counts[it];
    for (const auto& [label, count] : ca) {
      auto f = cb.find(label);
      if (f != cb.end())
        s += static_cast<double>(count) * static_cast<double>(f->second);
    }
  }
  return s;
}

Matrix dot_product_gram(const Matrix& embeddings) {
  if (embeddings.rows() == 0)
    throw std::invalid_argument("dot_product_gram: empty embedding matrix");
  const std::size_t n = embeddings.rows(), d = embeddings.cols();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = simd::dot(embeddings.row(i), embeddings.row(j), d);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix normalize_gram(const Matrix& k) {
  const std::size_t n = k.rows();
  for (std::size_t i = 0; i < n; ++i)
    if (!(k(i, i) > 0.0))
      throw std::invalid_argument("normalize_gram: nonpositive diagonal entry");
  Matrix out(n, n);
  Vector inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(k(i, i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = k(i, j) * inv_sqrt[i] * inv_sqrt[j];
    out(i, i) = 1.0;
  }
  return out;
}

Spectrum empirical_spectrum(const Matrix& k, std::size_t n) {
  if (k.rows() != k.cols()) throw std::invalid_argument("empirical_spectrum: square required");
  if (max_abs_asymmetry(k) > 1e-8)
    throw std::invalid_argument("empirical_spectrum: input is not symmetric");
  Matrix sym = k;
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = i + 1; j < k.cols(); ++j) {
      double v = 0.5 * (k(i, j) + k(j, i));
      sym(i, j) = v;
      sym(j, i) = v;
    }
  EigenResult eig = jacobi_eigen(sym, 1e-10);
  Spectrum spec;
  spec.n = n;
  spec.eigenvalues = eig.eigenvalues;
  double scale = 1.0 / static_cast<double>(n);
  double neg = 0.0;
  for (double& v : spec.eigenvalues) {
    v *= scale;
    if (v < 0.0) neg += -v;
  }
  spec.negative_mass = neg;
  return spec;
}

std::size_t truncation_rank(const Spectrum& spec, double eps) {
  Vector lam = spec.eigenvalues;
  for (double& v : lam) v = std::max(v, 0.0);
  double total = 0.0;
  for (double v : lam) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("truncation_rank: all-zero spectrum");
  double tail = total;
  for (std::size_t r = 0; r < lam.size(); ++r) {
    tail -= lam[r];
    if (tail / total <= eps) return r + 1;
  }
  return lam.size();
}

SpectrumReport spectrum_report(
    const std::vector<rgm::Graph>& graphs, const SpectrumReportConfig& config,
    const std::vector<std::uint64_t>& seeds,
    const std::function<std::vector<rgm::Graph>(std::uint64_t)>& regenerate) {
  if (graphs.size() < 2 && !regenerate)
    throw std::invalid_argument("spectrum_report: need at least 2 graphs");

  SpectrumReport report;
  std::vector<std::vector<std::size_t>> ranks(config.eps_list.size());
  std::size_t batch_size = 0;
  for (std::uint64_t seed : seeds) {
    std::vector<rgm::Graph> batch = regenerate ? regenerate(seed) : graphs;
    if (batch.size() < 2)
      throw std::invalid_argument("spectrum_report: need at least 2 graphs");
    WlLabeler labeler;
    std::vector<WlFeatures> feats;
    feats.reserve(batch.size());
    for (const auto& g : batch)
      feats.push_back(wl_features(g, config.wl_depth, labeler, config.wl));
    const std::size_t n = batch.size();
    batch_size = n;
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double v = wl_kernel(feats[i], feats[j]);
        k(i, j) = v;
        k(j, i) = v;
      }
    Spectrum spec = empirical_spectrum(normalize_gram(k), n);
    for (std::size_t e = 0; e < config.eps_list.size(); ++e)
      ranks[e].push_back(truncation_rank(spec, config.eps_list[e]));
    for (std::size_t r = 0; r < spec.eigenvalues.size(); ++r)
      report.curves.emplace_back(seed, r + 1, spec.eigenvalues[r]);
  }

  for (std::size_t e = 0; e < config.eps_list.size(); ++e) {
    SpectrumReportRow row;
    row.method = "wl";
    row.depth = config.wl_depth;
    row.eps = config.eps_list[e];
    double mean = 0.0;
    for (std::size_t r : ranks[e]) mean += static_cast<double>(r);
    mean /= static_cast<double>(ranks[e].size());
    double var = 0.0;
    for (std::size_t r : ranks[e]) {
      double d = static_cast<double>(r) - mean;
      var += d * d;
    }
    var /= static_cast<double>(ranks[e].size());
    row.mean = mean;
    row.stddev = std::sqrt(var);
    row.n = batch_size;
    row.seed_count = seeds.size();
    report.table.push_back(row);
  }
  return report;
}

}  // namespace rgmshift::spectral
