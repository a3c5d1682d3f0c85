#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace softpred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Dense matrix plus a same-shape observation mask (true = observed).
/// Masked-out entries are ignored by all distance and solver code
/// regardless of their stored value.
struct MaskedMatrix {
  Matrix data;
  Mask mask;

  MaskedMatrix() = default;
  MaskedMatrix(Matrix d, Mask m);

  /// Wrap a complete matrix with an all-true mask.
  static MaskedMatrix fully_observed(Matrix d);

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }

  bool is_fully_observed() const { return mask.all(); }
  Index observed_count() const { return mask.count(); }

  /// Throws ValidationError if some row has no observed entry.
  void require_observed_rows() const;
};

/// Train/test split with responses. Feature matrices may carry masks;
/// responses are always fully observed.
struct Dataset {
  MaskedMatrix x_train;
  Vector y_train;
  MaskedMatrix x_test;
  std::optional<Vector> y_test;
  std::optional<Vector> beta_true;

  /// Throws ValidationError on shape mismatches.
  void validate() const;
};

/// Result of a (possibly constrained) k-means fit.
/// Labels are 0-based: idx[r] in [0, k).
struct Clustering {
  int k = 0;
  std::vector<int> idx;
  Matrix centroids;        ///< k x n
  double inertia = 0.0;    ///< within-cluster sum of squared distances
  double objective = 0.0;  ///< inertia + constraint penalty (== inertia when unconstrained)
  int iterations = 0;
  bool converged = true;
  std::string warning;     ///< non-empty for degenerate fits
};

/// Symmetric pairwise soft constraints: s(i,j) in [-1,1], +1 pulls a pair
/// into the same cluster, -1 pushes it apart. The diagonal is ignored.
struct ConstraintMatrix {
  Matrix s;

  ConstraintMatrix() = default;
  explicit ConstraintMatrix(Matrix values);

  Index size() const { return s.rows(); }
};

/// Mask out exact zeros: mask(i,j) = false iff x(i,j) == 0.
MaskedMatrix mask_of_zeros(const Matrix& x);

/// Deterministic shuffled train/test split on a raw table. `response_col`
/// must be fully observed and becomes y; remaining columns become x.
Dataset split(const MaskedMatrix& data, Index response_col, double test_fraction,
              std::uint64_t seed);

}  // namespace softpred
