#include "softpred/swp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "softpred/errors.hpp"

namespace softpred {
namespace {

void require_fully_observed(const Dataset& ds) {
  if (!ds.x_train.is_fully_observed() || !ds.x_test.is_fully_observed()) {
    throw ValidationError("SWP and its baselines require fully observed features");
  }
}

}  // namespace

Vector swp_weights(const Matrix& x_train, const RowVector& test_point, const SwpConfig& cfg) {
  if (cfg.epsilon <= 0.0) throw ValidationError("epsilon must be positive");
  if (x_train.cols() != test_point.size()) {
    throw ValidationError("test point length does not match feature count");
  }
  const Index m = x_train.rows();
  Vector diff(m);
  for (Index j = 0; j < m; ++j) {
    diff(j) = (x_train.row(j) - test_point).squaredNorm();
  }
  const double denom = std::max(diff.minCoeff(), cfg.epsilon);
  const double scale = std::exp2(cfg.w);
  return (-(diff.array() / denom) / scale).exp().matrix();
}

Vector swp_predict(const Dataset& ds, const SwpConfig& cfg) {
  ds.validate();
  require_fully_observed(ds);
  const Index p = ds.x_test.rows();
  Vector out(p);
  for (Index i = 0; i < p; ++i) {
    const Vector w = swp_weights(ds.x_train.data, ds.x_test.data.row(i), cfg);
    try {
      const RegressionModel model = wls_fit(ds.x_train.data, ds.y_train, w, cfg.solve);
      out(i) = ds.x_test.data.row(i) * model.b;
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("test row " + std::to_string(i) + ": " + e.what(), e.rank,
                                e.needed);
    }
  }
  return out;
}

Vector cluster_predict(const Dataset& ds, const Clustering& clustering,
                       const LeastSquaresOptions& opts) {
  ds.validate();
  require_fully_observed(ds);
  const Index m = ds.x_train.rows();
  if (static_cast<Index>(clustering.idx.size()) != m) {
    throw ValidationError("clustering does not cover the training rows");
  }

  std::map<int, RegressionModel> fits;  // lazy per-cluster OLS
  auto fit_cluster = [&](int c) -> const RegressionModel& {
    auto it = fits.find(c);
    if (it != fits.end()) return it->second;
    std::vector<Index> rows;
    for (Index r = 0; r < m; ++r) {
      if (clustering.idx[static_cast<std::size_t>(r)] == c) rows.push_back(r);
    }
    if (rows.empty()) {
      throw SingularSystemError("cluster " + std::to_string(c) + " is empty", 0,
                                ds.x_train.cols());
    }
    Matrix xc(static_cast<Index>(rows.size()), ds.x_train.cols());
    Vector yc(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      xc.row(static_cast<Index>(r)) = ds.x_train.data.row(rows[r]);
      yc(static_cast<Index>(r)) = ds.y_train(rows[r]);
    }
    try {
      return fits.emplace(c, ols_fit(xc, yc, opts)).first->second;
    } catch (const SingularSystemError& e) {
      throw SingularSystemError("cluster " + std::to_string(c) + ": " + e.what(), e.rank,
                                e.needed);
    }
  };

  const Index p = ds.x_test.rows();
  Vector out(p);
  for (Index i = 0; i < p; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < clustering.k; ++c) {
      const double d = (ds.x_test.data.row(i) - clustering.centroids.row(c)).squaredNorm();
      if (d < best_d) {  // ties keep the lowest cluster index
        best_d = d;
        best = c;
      }
    }
    out(i) = ds.x_test.data.row(i) * fit_cluster(best).b;
  }
  return out;
}

Vector knn_predict(const Dataset& ds, int k) {
  ds.validate();
  require_fully_observed(ds);
  const Index m = ds.x_train.rows();
  if (k < 1 || static_cast<Index>(k) > m) {
    throw ValidationError("k must lie in [1, " + std::to_string(m) + "]");
  }

  const Index p = ds.x_test.rows();
  Vector out(p);
  std::vector<Index> order(static_cast<std::size_t>(m));
  for (Index i = 0; i < p; ++i) {
    Vector d(m);
    for (Index j = 0; j < m; ++j) {
      d(j) = (ds.x_test.data.row(i) - ds.x_train.data.row(j)).squaredNorm();
    }
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Index a, Index b) { return d(a) != d(b) ? d(a) < d(b) : a < b; });
    double sum = 0.0;
    for (int r = 0; r < k; ++r) sum += ds.y_train(order[static_cast<std::size_t>(r)]);
    out(i) = sum / static_cast<double>(k);
  }
  return out;
}

}  // namespace softpred
