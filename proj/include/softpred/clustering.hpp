#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "softpred/core.hpp"

namespace softpred {

struct KmeansConfig {
  int k = 1;
  int replicates = 1;      ///< restarts; best fit by objective wins
  int max_iter = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9;       ///< relative objective-change stop
};

struct ScopConfig {
  KmeansConfig base;
  /// Cost multiplier for constraint violations. Defaults to the mean
  /// pairwise squared distance of the data, which makes distance and
  /// violation costs commensurable.
  std::optional<double> penalty_scale;
};

struct MissingScopConfig {
  ScopConfig scop;
  double w = 0.5;             ///< mask-similarity vs co-observed-distance blend, in [0,1]
  /// Blend the raw Algorithm-2 distances instead: no per-pair co-observed
  /// count division and no max-normalization before mixing.
  bool paper_literal = false;
};

/// Lloyd's algorithm, squared Euclidean distance, centroids initialized at
/// k distinct rows sampled per replicate seed. Empty clusters are re-seeded
/// at the point farthest from its centroid. Deterministic for a fixed seed.
Clustering kmeans(const Matrix& x, const KmeansConfig& cfg);

/// Soft-constrained k-means. The assignment step for point i minimizes
///   d^2(x_i, c_j) + penalty_scale * sum over assigned i' of v(s(i,i'), j)
/// where v = s when s > 0 and i' sits in a different cluster than j, and
/// v = |s| when s < 0 and i' sits in cluster j. Points are reassigned in
/// fixed row order each sweep; the update step is plain k-means.
/// With s identically zero the result is bit-identical to kmeans.
Clustering scop_kmeans(const Matrix& x, const ConstraintMatrix& s, const ScopConfig& cfg);

/// Pairwise soft constraints from missingness structure:
///   D_miss = Hamming distance of observation masks,
///   D_dist = squared distance over co-observed features,
///   D = w * D_miss + (1-w) * D_dist   (both max-normalized unless literal),
///   S = 1 - 2*sqrt(D / max D).
/// Pairs with no co-observed features take the worst observed D_dist.
ConstraintMatrix missing_scop_constraints(const MaskedMatrix& x, double w,
                                          bool paper_literal = false);

/// Constraint construction plus scop_kmeans on the mean-imputed matrix.
/// When all rows are identical in data and mask (max D = 0) the result is
/// a single cluster carrying a warning.
Clustering missing_scop(const MaskedMatrix& x, const MissingScopConfig& cfg);

struct SilhouetteResult {
  Vector per_point;
  double mean = 0.0;
};

/// Silhouette values s(i) = (b - a) / max(a, b) with Euclidean distances;
/// a = mean intra-cluster distance, b = min mean distance to another
/// cluster. Singletons score 0. Requires at least two clusters.
SilhouetteResult silhouette(const Matrix& x, const std::vector<int>& idx);

/// Mean pairwise squared Euclidean distance; the default penalty scale.
double mean_pairwise_sqdist(const Matrix& x);

}  // namespace softpred
