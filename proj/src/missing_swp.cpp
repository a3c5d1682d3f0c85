#include "softpred/missing_swp.hpp"

#include <algorithm>
#include <cmath>

#include "softpred/errors.hpp"

namespace softpred {
namespace {

Matrix membership_impl(const Matrix& x_test, const Mask* mask, const Matrix& centroids,
                       double epsilon) {
  if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
  if (x_test.cols() != centroids.cols()) {
    throw ValidationError("test and centroid feature counts differ");
  }
  const Index p = x_test.rows();
  const Index k = centroids.rows();
  if (k < 1) throw ValidationError("need at least one centroid");

  Matrix u(p, k);
  Vector d2(k);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (mask == nullptr) {
        d2(j) = (x_test.row(i) - centroids.row(j)).squaredNorm();
      } else {
        double sq = 0.0;
        for (Index f = 0; f < x_test.cols(); ++f) {
          if ((*mask)(i, f)) {
            const double d = x_test(i, f) - centroids(j, f);
            sq += d * d;
          }
        }
        d2(j) = sq;
      }
    }
    const double nearest = std::max(d2.minCoeff(), epsilon);
    for (Index j = 0; j < k; ++j) {
      u(i, j) = nearest / std::max(d2(j), epsilon);
    }
  }
  return u;
}

}  // namespace

Matrix membership(const Matrix& x_test, const Matrix& centroids, double epsilon) {
  return membership_impl(x_test, nullptr, centroids, epsilon);
}

Matrix membership(const MaskedMatrix& x_test, const Matrix& centroids, double epsilon) {
  if (x_test.is_fully_observed()) {
    return membership_impl(x_test.data, nullptr, centroids, epsilon);
  }
  x_test.require_observed_rows();
  return membership_impl(x_test.data, &x_test.mask, centroids, epsilon);
}

Vector cluster_weights(const RowVector& u_row, const std::vector<int>& idx, double w) {
  const Index k = u_row.size();
  Vector per_cluster(k);
  const double scale = std::exp2(w);
  for (Index j = 0; j < k; ++j) {
    if (!(u_row(j) > 0.0)) throw ValidationError("membership entries must be positive");
    per_cluster(j) = std::exp(-(1.0 / u_row(j)) / scale);
  }
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const int c = idx[r];
    if (c < 0 || c >= k) throw ValidationError("cluster label out of range");
    out(static_cast<Index>(r)) = per_cluster(c);
  }
  return out;
}

Vector missing_swp_predict(const Dataset& ds, const MissingSwpConfig& cfg) {
  ds.validate();
  Clustering clustering;
  try {
    clustering = missing_scop(ds.x_train, cfg.cluster);
  } catch (const Error& e) {
    throw ValidationError(std::string("clustering stage: ") + e.what());
  }
  return missing_swp_predict(ds, clustering, cfg);
}

Vector missing_swp_predict(const Dataset& ds, const Clustering& clustering,
                           const MissingSwpConfig& cfg) {
  ds.validate();
  if (static_cast<Index>(clustering.idx.size()) != ds.x_train.rows()) {
    throw ValidationError("clustering does not cover the training rows");
  }

  Matrix completed;
  if (cfg.completion == Completion::Mean) {
    completed = mean_impute(ds.x_train);
  } else {
    completed = soft_impute(ds.x_train, cfg.soft_impute).completed;
  }

  const Matrix u = membership(ds.x_test, clustering.centroids, cfg.epsilon);

  // prediction needs full test rows; fill any masked test entry from the
  // completed training columns
  Matrix x_test = ds.x_test.data;
  if (!ds.x_test.is_fully_observed()) {
    const RowVector col_mean = completed.colwise().mean();
    for (Index i = 0; i < x_test.rows(); ++i) {
      for (Index f = 0; f < x_test.cols(); ++f) {
        if (!ds.x_test.mask(i, f)) x_test(i, f) = col_mean(f);
      }
    }
  }

  const Index p = x_test.rows();
  Vector out(p);
  for (Index i = 0; i < p; ++i) {
    const Vector wdiag = cluster_weights(u.row(i), clustering.idx, cfg.w);
    try {
      const RegressionModel model = wls_fit(completed, ds.y_train, wdiag, cfg.solve);
      out(i) = x_test.row(i) * model.b;
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("prediction stage, test row " + std::to_string(i) + ": " +
                                    e.what(),
                                e.rank, e.needed);
    }
  }
  return out;
}

}  // namespace softpred
