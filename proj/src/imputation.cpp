#include "softpred/imputation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "softpred/errors.hpp"

namespace softpred {
namespace {

double observed_residual_sq(const MaskedMatrix& x, const Matrix& z) {
  double sum = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (x.mask(i, j)) {
        const double d = x.data(i, j) - z(i, j);
        sum += d * d;
      }
    }
  }
  return sum;
}

}  // namespace

Matrix mean_impute(const MaskedMatrix& x) {
  const Index m = x.rows();
  const Index n = x.cols();
  double global_sum = 0.0;
  Index global_count = 0;
  Vector col_mean(n);
  std::vector<bool> col_has(static_cast<std::size_t>(n), false);
  for (Index j = 0; j < n; ++j) {
    double sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < m; ++i) {
      if (x.mask(i, j)) {
        sum += x.data(i, j);
        ++count;
      }
    }
    global_sum += sum;
    global_count += count;
    col_has[static_cast<std::size_t>(j)] = count > 0;
    col_mean(j) = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
  const double global_mean = global_count > 0 ? global_sum / static_cast<double>(global_count) : 0.0;

  Matrix out = x.data;
  for (Index j = 0; j < n; ++j) {
    const double fill = col_has[static_cast<std::size_t>(j)] ? col_mean(j) : global_mean;
    for (Index i = 0; i < m; ++i) {
      if (!x.mask(i, j)) out(i, j) = fill;
    }
  }
  return out;
}

Matrix svd_soft_threshold(const Matrix& x, double lambda) {
  if (lambda < 0.0) throw ValidationError("lambda must be nonnegative");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sigma = svd.singularValues();
  for (Index i = 0; i < sigma.size(); ++i) sigma(i) = std::max(sigma(i) - lambda, 0.0);
  return svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

SoftImputeResult soft_impute(const MaskedMatrix& x, const SoftImputeConfig& cfg) {
  if (cfg.tol <= 0.0) throw ValidationError("tol must be positive");
  if (cfg.max_iter < 1) throw ValidationError("max_iter must be at least 1");

  SoftImputeResult res;
  Matrix z = mean_impute(x);
  res.objective.reserve(static_cast<std::size_t>(cfg.max_iter));

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    // observed entries from X, missing entries from the current estimate
    Matrix filled = z;
    for (Index i = 0; i < x.rows(); ++i) {
      for (Index j = 0; j < x.cols(); ++j) {
        if (x.mask(i, j)) filled(i, j) = x.data(i, j);
      }
    }

    Eigen::BDCSVD<Matrix> svd(filled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sigma = svd.singularValues();
    Index keep = sigma.size();
    if (cfg.rank_cap && *cfg.rank_cap < keep) keep = *cfg.rank_cap;
    double nuc = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) {
      sigma(i) = i < keep ? std::max(sigma(i) - cfg.lambda, 0.0) : 0.0;
      nuc += sigma(i);
    }
    Matrix z_new = svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();

    res.objective.push_back(0.5 * observed_residual_sq(x, z_new) + cfg.lambda * nuc);
    res.iterations = iter;

    const double change = (z_new - z).norm() / std::max(z.norm(), 1.0);
    z = std::move(z_new);
    if (change < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  res.observed_residual = std::sqrt(observed_residual_sq(x, z));
  res.completed = std::move(z);
  return res;
}

double nuclear_norm(const Matrix& x) {
  return Eigen::BDCSVD<Matrix>(x).singularValues().sum();
}

}  // namespace softpred
