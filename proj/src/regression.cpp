#include "softpred/regression.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "softpred/errors.hpp"

namespace softpred {
namespace {

void check_xy(const Matrix& x, const Vector& y) {
  if (x.rows() < 1 || x.cols() < 1) throw ValidationError("design matrix must be nonempty");
  if (y.size() != x.rows()) throw ValidationError("response length does not match row count");
}

/// Minimum-norm solve of the (possibly row-scaled) system via SVD.
/// Singularity threshold: eps * max(m,n) * sigma_max.
Vector svd_solve(const Matrix& a, const Vector& rhs, bool allow_pinv, bool& used_pinv) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double threshold = std::numeric_limits<double>::epsilon() *
                           static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max;

  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold) ++rank;
  }
  if (rank < a.cols()) {
    if (!allow_pinv) {
      throw SingularSystemError("rank-deficient least-squares system (rank " +
                                    std::to_string(rank) + " of " + std::to_string(a.cols()) +
                                    " needed)",
                                rank, a.cols());
    }
    used_pinv = true;
  }

  Vector c = svd.matrixU().transpose() * rhs;
  for (Index i = 0; i < sigma.size(); ++i) {
    c(i) = sigma(i) > threshold ? c(i) / sigma(i) : 0.0;
  }
  return svd.matrixV() * c;
}

}  // namespace

RegressionModel ols_fit(const Matrix& x, const Vector& y, const LeastSquaresOptions& opts) {
  check_xy(x, y);
  RegressionModel model;
  model.solver = SolverKind::Ols;
  model.b = svd_solve(x, y, opts.allow_pseudo_inverse, model.used_pseudo_inverse);
  return model;
}

RegressionModel wls_fit(const Matrix& x, const Vector& y, const Vector& w,
                        const LeastSquaresOptions& opts) {
  check_xy(x, y);
  if (w.size() != x.rows()) throw ValidationError("weight length does not match row count");
  Index positive = 0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0 || !std::isfinite(w(i))) {
      throw ValidationError("weights must be finite and nonnegative");
    }
    if (w(i) > 0.0) ++positive;
  }
  if (positive < x.cols() && !opts.allow_pseudo_inverse) {
    throw SingularSystemError("only " + std::to_string(positive) +
                                  " positive weights for " + std::to_string(x.cols()) +
                                  " coefficients",
                              positive, x.cols());
  }

  // Solve the sqrt(W)-scaled system; identical normal equations (X'WX)b = X'Wy.
  Vector sw = w.array().sqrt();
  Matrix xs = sw.asDiagonal() * x;
  Vector ys = sw.asDiagonal() * y;

  RegressionModel model;
  model.solver = SolverKind::Wls;
  model.b = svd_solve(xs, ys, opts.allow_pseudo_inverse, model.used_pseudo_inverse);
  return model;
}

RegressionModel lasso_fit(const Matrix& x, const Vector& y, double lambda, double tol,
                          int max_iter) {
  check_xy(x, y);
  if (lambda < 0.0) throw ValidationError("lambda must be nonnegative");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");

  const Index n = x.cols();
  Vector col_sq(n);
  for (Index j = 0; j < n; ++j) col_sq(j) = x.col(j).squaredNorm();

  Vector b = Vector::Zero(n);
  Vector residual = y;  // y - X b
  double obj = lasso_objective(x, y, b, lambda);

  RegressionModel model;
  model.solver = SolverKind::Lasso;
  model.lambda = lambda;
  model.converged = false;

  for (int sweep = 0; sweep < max_iter; ++sweep) {
    for (Index j = 0; j < n; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double rho = x.col(j).dot(residual) + col_sq(j) * b(j);
      const double shrunk = std::abs(rho) > lambda ? std::copysign(std::abs(rho) - lambda, rho) : 0.0;
      const double bj_new = shrunk / col_sq(j);
      if (bj_new != b(j)) {
        residual -= x.col(j) * (bj_new - b(j));
        b(j) = bj_new;
      }
    }
    const double obj_new = lasso_objective(x, y, b, lambda);
    if (obj - obj_new < tol) {
      model.converged = true;
      obj = obj_new;
      break;
    }
    obj = obj_new;
  }

  model.b = std::move(b);
  return model;
}

Vector predict(const RegressionModel& model, const Matrix& x) {
  if (x.cols() != model.b.size()) {
    throw ValidationError("feature count " + std::to_string(x.cols()) +
                          " does not match coefficient length " + std::to_string(model.b.size()));
  }
  return x * model.b;
}

double lasso_objective(const Matrix& x, const Vector& y, const Vector& b, double lambda) {
  return 0.5 * (y - x * b).squaredNorm() + lambda * b.lpNorm<1>();
}

}  // namespace softpred
