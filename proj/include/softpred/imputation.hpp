#pragma once

#include <optional>
#include <vector>

#include "softpred/core.hpp"

namespace softpred {

struct SoftImputeConfig {
  double lambda = 0.0;          ///< nuclear-norm penalty
  double tol = 1e-5;            ///< relative Frobenius-change stop
  int max_iter = 300;
  std::optional<int> rank_cap;  ///< truncate the SVD for speed
};

struct SoftImputeResult {
  Matrix completed;
  bool converged = false;
  int iterations = 0;
  /// 0.5*||P_obs(X - Z)||_F^2 + lambda*||Z||_* after each iteration;
  /// nonincreasing.
  std::vector<double> objective;
  double observed_residual = 0.0;  ///< ||P_obs(X - Z)||_F at exit
};

/// Replace missing entries by their column's observed mean (global
/// observed mean for fully missing columns). Observed entries untouched.
Matrix mean_impute(const MaskedMatrix& x);

/// U * diag(max(sigma_i - lambda, 0)) * V' for the SVD of x.
Matrix svd_soft_threshold(const Matrix& x, double lambda);

/// Iterative SVD soft-thresholding: Z <- S_lambda(P_obs(X) + P_miss(Z))
/// starting from the mean-imputed matrix, until the relative Frobenius
/// change drops below tol or max_iter is reached.
SoftImputeResult soft_impute(const MaskedMatrix& x, const SoftImputeConfig& cfg);

/// Sum of singular values.
double nuclear_norm(const Matrix& x);

}  // namespace softpred
