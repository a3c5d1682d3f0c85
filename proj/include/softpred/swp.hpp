#pragma once

#include "softpred/core.hpp"
#include "softpred/regression.hpp"

namespace softpred {

/// Tuning for the exponential distance filter. `w` is the exponent scale:
/// weights are exp(-normalized_sqdist / 2^w), so large w disables the
/// filter (all weights -> 1) and small w concentrates weight on the
/// nearest training rows.
struct SwpConfig {
  double w = 6.0;
  double epsilon = 1e-12;      ///< guard for the min-distance normalization
  LeastSquaresOptions solve;   ///< heavily filtered systems may need the pinv fallback
};

/// Per-training-row weights for one test point: squared distances,
/// normalized by max(min distance, epsilon), mapped through exp(-d/2^w).
Vector swp_weights(const Matrix& x_train, const RowVector& test_point, const SwpConfig& cfg);

/// Soft weighted prediction: one weighted least-squares fit per test row,
/// weighted by swp_weights against that row. Requires fully observed
/// features and responses. Singular systems are reported with the
/// offending test-row index.
Vector swp_predict(const Dataset& ds, const SwpConfig& cfg);

/// Hard-clustering baseline: nearest centroid (ties -> lowest cluster
/// index), then an OLS fit restricted to that cluster's training rows.
Vector cluster_predict(const Dataset& ds, const Clustering& clustering,
                       const LeastSquaresOptions& opts = {});

/// k-nearest-neighbor baseline: mean response of the k nearest training
/// rows (squared Euclidean distance, ties -> lowest row index).
Vector knn_predict(const Dataset& ds, int k);

}  // namespace softpred
