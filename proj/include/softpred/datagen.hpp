#pragma once

#include <cstdint>
#include <vector>

#include "softpred/core.hpp"

namespace softpred {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Synthetic linear data: per-column Gaussian features with parameters
/// drawn from the given ranges, latent cluster structure induced by
/// shifting cluster means, y = X*beta + noise.
struct SynthSpec {
  int train_rows = 100;
  int test_rows = 30;
  int features = 5;
  int k_true = 1;                 ///< latent clusters
  bool beta_per_cluster = false;  ///< distinct coefficients per cluster
  double noise_sigma = 1.0;
  Range mu_range{-2.0, 2.0};      ///< per-feature mean
  Range sigma_range{0.5, 1.5};    ///< per-feature spread
  double cluster_shift = 4.0;     ///< scale of per-cluster mean offsets
  std::uint64_t seed = 0;
};

struct MaskSpec {
  double m_rate = 0.0;            ///< missing rate, in [0,1]
  double noise_flip_rate = 0.02;  ///< independent per-entry flips on top of the cluster pattern
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset dataset;                 ///< fully observed; beta_true set when a single beta was used
  std::vector<int> train_clusters; ///< latent label per training row
  std::vector<int> test_clusters;
  Matrix betas;                    ///< k_true x n; rows identical when !beta_per_cluster
};

/// Deterministic per seed. With noise_sigma = 0 and a single beta, OLS on
/// the training rows recovers beta exactly.
SynthData gen_linear(const SynthSpec& spec);

/// Cluster-correlated observation mask: each cluster draws one uniform
/// vector r and shares the pattern r >= max(r) * m_rate, then independent
/// noise flips are superimposed; any row left with zero observed entries
/// gets one uniformly chosen entry restored.
Mask gen_cluster_mask(const std::vector<int>& idx, Index n, const MaskSpec& spec);

}  // namespace softpred
