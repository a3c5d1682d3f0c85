#include "softpred/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "softpred/errors.hpp"
#include "softpred/imputation.hpp"
#include "softpred/rng.hpp"

namespace softpred {
namespace {

struct LloydOutcome {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

double constraint_violations(const Matrix& s, const std::vector<int>& labels) {
  double total = 0.0;
  const Index m = s.rows();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const double v = s(i, j);
      const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
      if (v > 0.0 && !same) total += v;
      if (v < 0.0 && same) total -= v;
    }
  }
  return total;
}

/// One replicate of (optionally constrained) Lloyd. `s` may be null.
LloydOutcome lloyd_once(const Matrix& x, const Matrix* s, double penalty,
                        const KmeansConfig& cfg, std::uint64_t seed) {
  const Index m = x.rows();
  const Index n = x.cols();
  const int k = cfg.k;

  // init: k distinct rows, partial Fisher-Yates
  auto eng = make_engine(seed);
  std::vector<Index> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), Index{0});
  Matrix centroids(k, n);
  for (int c = 0; c < k; ++c) {
    std::uniform_int_distribution<Index> pick(c, m - 1);
    std::swap(pool[static_cast<std::size_t>(c)], pool[static_cast<std::size_t>(pick(eng))]);
    centroids.row(c) = x.row(pool[static_cast<std::size_t>(c)]);
  }

  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  std::vector<bool> assigned(static_cast<std::size_t>(m), false);
  std::vector<Index> members(static_cast<std::size_t>(k), 0);
  Vector pos_adjust(k);

  LloydOutcome out;
  double prev_objective = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    // assignment sweep, fixed row order; constraint terms see the current
    // labels of every already-assigned point
    bool changed = false;
    for (Index i = 0; i < m; ++i) {
      double total_pos = 0.0;
      pos_adjust.setZero();
      if (s != nullptr) {
        for (Index o = 0; o < m; ++o) {
          if (o == i || !assigned[static_cast<std::size_t>(o)]) continue;
          const double v = (*s)(i, o);
          const int lo = labels[static_cast<std::size_t>(o)];
          if (v > 0.0) {
            total_pos += v;
            pos_adjust(lo) -= v;
          } else if (v < 0.0) {
            pos_adjust(lo) -= v;  // adds |v| when candidate cluster == lo
          }
        }
      }
      int best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double cost = (x.row(i) - centroids.row(c)).squaredNorm();
        if (s != nullptr) cost += penalty * (total_pos + pos_adjust(c));
        if (cost < best_cost) {  // ties keep the lowest cluster index
          best_cost = cost;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) changed = true;
      labels[static_cast<std::size_t>(i)] = best;
      assigned[static_cast<std::size_t>(i)] = true;
    }

    // re-seed empty clusters at the point farthest from its centroid
    std::fill(members.begin(), members.end(), Index{0});
    for (Index i = 0; i < m; ++i) ++members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    for (int c = 0; c < k; ++c) {
      if (members[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < m; ++i) {
        const int li = labels[static_cast<std::size_t>(i)];
        if (members[static_cast<std::size_t>(li)] < 2) continue;  // do not empty another cluster
        const double d = (x.row(i) - centroids.row(li)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;  // m == k edge, nothing to steal
      --members[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      members[static_cast<std::size_t>(c)] = 1;
      centroids.row(c) = x.row(far);
      changed = true;
    }

    // update step: centroids at cluster means
    Matrix sums = Matrix::Zero(k, n);
    for (Index i = 0; i < m; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
    }
    for (int c = 0; c < k; ++c) {
      if (members[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / static_cast<double>(members[static_cast<std::size_t>(c)]);
      }
    }

    double inertia = 0.0;
    for (Index i = 0; i < m; ++i) {
      inertia += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    double objective = inertia;
    if (s != nullptr) objective += penalty * constraint_violations(*s, labels);

    out.iterations = iter;
    out.inertia = inertia;
    out.objective = objective;
    if (!changed) {
      out.converged = true;
      break;
    }
    if (std::abs(prev_objective - objective) <= cfg.tol * std::max(1.0, std::abs(prev_objective))) {
      out.converged = true;
      break;
    }
    prev_objective = objective;
  }

  out.labels = std::move(labels);
  out.centroids = std::move(centroids);
  return out;
}

Clustering run_replicated(const Matrix& x, const Matrix* s, double penalty,
                          const KmeansConfig& cfg) {
  if (cfg.k < 1) throw ValidationError("k must be at least 1");
  if (cfg.replicates < 1) throw ValidationError("replicates must be at least 1");
  if (cfg.max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (x.rows() < cfg.k) {
    throw ValidationError("need at least k rows (" + std::to_string(x.rows()) + " < " +
                          std::to_string(cfg.k) + ")");
  }

  LloydOutcome best;
  bool have = false;
  for (int r = 0; r < cfg.replicates; ++r) {
    LloydOutcome run = lloyd_once(x, s, penalty, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    if (!have || run.objective < best.objective) {
      best = std::move(run);
      have = true;
    }
  }

  Clustering result;
  result.k = cfg.k;
  result.idx = std::move(best.labels);
  result.centroids = std::move(best.centroids);
  result.inertia = best.inertia;
  result.objective = best.objective;
  result.iterations = best.iterations;
  result.converged = best.converged;
  return result;
}

}  // namespace

Clustering kmeans(const Matrix& x, const KmeansConfig& cfg) {
  return run_replicated(x, nullptr, 0.0, cfg);
}

Clustering scop_kmeans(const Matrix& x, const ConstraintMatrix& s, const ScopConfig& cfg) {
  if (s.size() != x.rows()) {
    throw ValidationError("constraint matrix size does not match row count");
  }
  double penalty = cfg.penalty_scale ? *cfg.penalty_scale : mean_pairwise_sqdist(x);
  if (penalty < 0.0) throw ValidationError("penalty_scale must be nonnegative");
  return run_replicated(x, &s.s, penalty, cfg.base);
}

namespace {

struct ConstraintBuild {
  Matrix s;
  bool degenerate = false;
};

ConstraintBuild build_constraints(const MaskedMatrix& x, double w, bool paper_literal) {
  if (w < 0.0 || w > 1.0) throw ValidationError("w must lie in [0, 1]");
  const Index m = x.rows();
  const Index n = x.cols();

  Matrix dmiss = Matrix::Zero(m, m);
  Matrix ddist = Matrix::Zero(m, m);
  std::vector<std::pair<Index, Index>> no_co;
  double max_ddist = 0.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      Index hamming = 0;
      Index co = 0;
      double sq = 0.0;
      for (Index f = 0; f < n; ++f) {
        const bool mi = x.mask(i, f);
        const bool mj = x.mask(j, f);
        if (mi != mj) ++hamming;
        if (mi && mj) {
          ++co;
          const double d = x.data(i, f) - x.data(j, f);
          sq += d * d;
        }
      }
      dmiss(i, j) = static_cast<double>(hamming);
      if (co > 0) {
        const double d = paper_literal ? sq : sq / static_cast<double>(co);
        ddist(i, j) = d;
        max_ddist = std::max(max_ddist, d);
      } else {
        no_co.emplace_back(i, j);
      }
    }
  }
  // no shared features: no evidence of similarity, treat as most dissimilar
  for (const auto& [i, j] : no_co) ddist(i, j) = max_ddist;

  if (!paper_literal) {
    const double dm_max = dmiss.maxCoeff();
    const double dd_max = ddist.maxCoeff();
    if (dm_max > 0.0) dmiss /= dm_max;
    if (dd_max > 0.0) ddist /= dd_max;
  }

  Matrix d = w * dmiss + (1.0 - w) * ddist;
  double max_d = 0.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) max_d = std::max(max_d, d(i, j));
  }

  ConstraintBuild out;
  out.s = Matrix::Constant(m, m, 1.0);
  if (max_d <= 0.0) {
    out.degenerate = true;
    return out;
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const double v = 1.0 - 2.0 * std::sqrt(d(i, j) / max_d);
      out.s(i, j) = v;
      out.s(j, i) = v;
    }
  }
  return out;
}

}  // namespace

ConstraintMatrix missing_scop_constraints(const MaskedMatrix& x, double w, bool paper_literal) {
  return ConstraintMatrix(build_constraints(x, w, paper_literal).s);
}

Clustering missing_scop(const MaskedMatrix& x, const MissingScopConfig& cfg) {
  ConstraintBuild build = build_constraints(x, cfg.w, cfg.paper_literal);
  const Matrix completed = mean_impute(x);

  if (build.degenerate) {
    Clustering c;
    c.k = 1;
    c.idx.assign(static_cast<std::size_t>(x.rows()), 0);
    c.centroids = completed.colwise().mean();
    c.inertia = 0.0;
    for (Index i = 0; i < completed.rows(); ++i) {
      c.inertia += (completed.row(i) - c.centroids.row(0)).squaredNorm();
    }
    c.objective = c.inertia;
    c.warning = "all rows identical in data and mask; returning a single cluster";
    return c;
  }
  return scop_kmeans(completed, ConstraintMatrix(std::move(build.s)), cfg.scop);
}

SilhouetteResult silhouette(const Matrix& x, const std::vector<int>& idx) {
  const Index m = x.rows();
  if (static_cast<Index>(idx.size()) != m) {
    throw ValidationError("label count does not match row count");
  }
  int k = 0;
  for (int label : idx) {
    if (label < 0) throw ValidationError("labels must be nonnegative");
    k = std::max(k, label + 1);
  }
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int label : idx) ++counts[static_cast<std::size_t>(label)];
  int nonempty = 0;
  for (Index c : counts) nonempty += c > 0 ? 1 : 0;
  if (nonempty < 2) throw ValidationError("silhouette needs at least two clusters");

  Matrix dist(m, m);
  for (Index i = 0; i < m; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < m; ++j) {
      const double d = (x.row(i) - x.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }

  SilhouetteResult res;
  res.per_point.resize(m);
  Vector cluster_sum(k);
  for (Index i = 0; i < m; ++i) {
    const int own = idx[static_cast<std::size_t>(i)];
    if (counts[static_cast<std::size_t>(own)] == 1) {
      res.per_point(i) = 0.0;  // singleton convention
      continue;
    }
    cluster_sum.setZero();
    for (Index j = 0; j < m; ++j) {
      cluster_sum(idx[static_cast<std::size_t>(j)]) += dist(i, j);
    }
    const double a = cluster_sum(own) / static_cast<double>(counts[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || counts[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, cluster_sum(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]));
    }
    const double denom = std::max(a, b);
    res.per_point(i) = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  res.mean = res.per_point.mean();
  return res;
}

double mean_pairwise_sqdist(const Matrix& x) {
  const Index m = x.rows();
  if (m < 2) return 0.0;
  const RowVector center = x.colwise().mean();
  double scatter = 0.0;
  for (Index i = 0; i < m; ++i) scatter += (x.row(i) - center).squaredNorm();
  // sum over unordered pairs of ||xi - xj||^2 equals m * scatter
  return 2.0 * scatter / static_cast<double>(m - 1);
}

}  // namespace softpred
