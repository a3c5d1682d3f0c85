#pragma once

#include "softpred/core.hpp"

namespace softpred {

enum class SolverKind { Ols, Wls, Lasso };

struct RegressionModel {
  Vector b;
  SolverKind solver = SolverKind::Ols;
  double lambda = 0.0;
  bool converged = true;            ///< false when lasso hit max_iter
  bool used_pseudo_inverse = false;
};

struct LeastSquaresOptions {
  /// When the system is rank deficient, fall back to the minimum-norm
  /// pseudo-inverse solution instead of throwing SingularSystemError.
  bool allow_pseudo_inverse = false;
};

/// Ordinary least squares: b solves (X'X) b = X'y.
/// Rank deficiency (threshold eps * max(m,n) * sigma_max) raises
/// SingularSystemError unless opts.allow_pseudo_inverse is set.
RegressionModel ols_fit(const Matrix& x, const Vector& y, const LeastSquaresOptions& opts = {});

/// Weighted least squares with diagonal weights w >= 0:
/// b solves (X'WX) b = X'Wy. Fewer than n strictly positive weights is a
/// singular system.
RegressionModel wls_fit(const Matrix& x, const Vector& y, const Vector& w,
                        const LeastSquaresOptions& opts = {});

/// Lasso via cyclic coordinate descent with soft-thresholding:
/// minimizes 0.5*||y - Xb||^2 + lambda*||b||_1 starting from b = 0.
/// Stops when the objective decrease over a full sweep drops below tol.
RegressionModel lasso_fit(const Matrix& x, const Vector& y, double lambda,
                          double tol = 1e-10, int max_iter = 10000);

/// x * b. Column count must match the coefficient length.
Vector predict(const RegressionModel& model, const Matrix& x);

/// 0.5*||y - Xb||^2 + lambda*||b||_1; shared by the solver and its tests.
double lasso_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda);

}  // namespace softpred
