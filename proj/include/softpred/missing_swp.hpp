#pragma once

#include "softpred/clustering.hpp"
#include "softpred/core.hpp"
#include "softpred/imputation.hpp"
#include "softpred/regression.hpp"

namespace softpred {

/// Cluster-membership scores for test rows: u(i,j) = min_j' d2(i,j') /
/// d2(i,j) with squared centroid distances and an epsilon guard, so the
/// nearest centroid scores exactly 1 and every entry lies in (0, 1].
Matrix membership(const Matrix& x_test, const Matrix& centroids, double epsilon = 1e-12);

/// Masked variant: distances restricted to each test row's observed
/// features (the membership ratio is invariant to the per-row feature
/// count, so no further normalization is needed).
Matrix membership(const MaskedMatrix& x_test, const Matrix& centroids, double epsilon = 1e-12);

/// Per-training-row weights from one membership row:
/// W_clusters(j) = exp(-(1/u_j) / 2^w), row r gets W_clusters(idx[r]).
/// Members of the same cluster share the same weight.
Vector cluster_weights(const RowVector& u_row, const std::vector<int>& idx, double w);

enum class Completion { Mean, SoftImpute };

struct MissingSwpConfig {
  MissingScopConfig cluster;
  double w = 6.0;                     ///< SWP exponent scale (weight tuning parameter)
  Completion completion = Completion::Mean;
  SoftImputeConfig soft_impute;       ///< used when completion == SoftImpute
  double epsilon = 1e-12;
  LeastSquaresOptions solve;
};

/// SWP adapted to missing training data:
///   (1) cluster x_train with missing_scop,
///   (2) complete x_train (mean or soft-impute),
///   (3) per test row: membership against the centroids, cluster weights,
///       weighted least squares on the completed matrix, predict.
/// Solver and clustering failures carry their pipeline stage and test row.
Vector missing_swp_predict(const Dataset& ds, const MissingSwpConfig& cfg);

/// Stages (2)-(3) against an externally supplied clustering.
Vector missing_swp_predict(const Dataset& ds, const Clustering& clustering,
                           const MissingSwpConfig& cfg);

}  // namespace softpred
