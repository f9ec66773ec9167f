#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rgmshift/core.hpp"
#include "rgmshift/rgm.hpp"

namespace rgmshift::spectral {

/// Shared label-compression dictionary. One instance spans a whole graph
/// collection so cross-graph count vectors line up.
class WlLabeler {
public:
  int compress(const std::string& key);
  std::size_t size() const { return table_.size(); }

private:
  std::map<std::string, int> table_;
};

struct WlFeatures {
  // counts[h] maps compressed label id -> multiplicity at iteration h.
  std::vector<std::map<int, std::size_t>> counts;
};

struct WlOptions {
  // Edge rule for weighted adjacencies; self-loops never count as neighbors.
  double edge_threshold = 0.0;  // neighbor iff a_ij > edge_threshold
  // Initial labels: degree binning over the graph's own degree range.
  std::size_t degree_bins = 8;
  // Optional explicit initial labels (one per node) overriding degree bins.
  std::vector<int> initial_labels;
};

WlFeatures wl_features(const rgm::Graph& graph, std::size_t h, WlLabeler& labeler,
                       const WlOptions& opts = {});

double wl_kernel(const WlFeatures& a, const WlFeatures& b);

Matrix dot_product_gram(const Matrix& embeddings);

Matrix normalize_gram(const Matrix& k);

struct Spectrum {
  Vector eigenvalues;        // descending, of (1/n) K
  std::size_t n = 0;
  double negative_mass = 0.0;  // |sum of clipped negative eigenvalues|
};

Spectrum empirical_spectrum(const Matrix& k, std::size_t n);

std::size_t truncation_rank(const Spectrum& spec, double eps);

struct SpectrumReportRow {
  std::string method;
  std::size_t depth = 0;
  double eps = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
  std::size_t seed_count = 0;
};

struct SpectrumReport {
  std::vector<SpectrumReportRow> table;
  // One decay curve per seed: (seed, rank, eigenvalue) triples flattened.
  std::vector<std::tuple<std::uint64_t, std::size_t, double>> curves;
};

struct SpectrumReportConfig {
  std::size_t wl_depth = 3;
  Vector eps_list = {0.1, 0.01, 0.001};
  WlOptions wl;
};

/// WL-kernel spectrum pipeline over a graph collection: Gram -> diagonal
/// normalization -> eigenvalues of (1/n)K -> r_eps rows per eps.
SpectrumReport spectrum_report(const std::vector<rgm::Graph>& graphs,
                               const SpectrumReportConfig& config,
                               const std::vector<std::uint64_t>& seeds,
                               const std::function<std::vector<rgm::Graph>(std::uint64_t)>&
                                   regenerate = nullptr);

}  // namespace rgmshift::spectral
