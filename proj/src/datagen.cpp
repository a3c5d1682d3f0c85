#include "softpred/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "softpred/errors.hpp"
#include "softpred/rng.hpp"

namespace softpred {
namespace {

void check_spec(const SynthSpec& spec) {
  if (spec.train_rows < 1 || spec.test_rows < 1 || spec.features < 1 || spec.k_true < 1) {
    throw ValidationError("all counts must be at least 1");
  }
  if (spec.noise_sigma < 0.0) throw ValidationError("noise_sigma must be nonnegative");
  if (spec.mu_range.lo > spec.mu_range.hi || spec.sigma_range.lo > spec.sigma_range.hi) {
    throw ValidationError("parameter ranges must satisfy lo <= hi");
  }
  if (spec.sigma_range.lo < 0.0) throw ValidationError("feature sigma must be nonnegative");
}

std::vector<int> balanced_labels(int rows, int k, std::mt19937_64& eng) {
  std::vector<int> labels(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) labels[static_cast<std::size_t>(r)] = r % k;
  std::shuffle(labels.begin(), labels.end(), eng);
  return labels;
}

}  // namespace

SynthData gen_linear(const SynthSpec& spec) {
  check_spec(spec);
  auto eng = make_engine(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n = spec.features;
  const int k = spec.k_true;

  SynthData out;
  out.train_clusters = balanced_labels(spec.train_rows, k, eng);
  out.test_clusters = balanced_labels(spec.test_rows, k, eng);

  // per-feature parameters and per-cluster mean offsets
  Vector mu(n), sigma(n);
  for (int f = 0; f < n; ++f) {
    mu(f) = spec.mu_range.lo + (spec.mu_range.hi - spec.mu_range.lo) * unit(eng);
    sigma(f) = spec.sigma_range.lo + (spec.sigma_range.hi - spec.sigma_range.lo) * unit(eng);
  }
  Matrix shift(k, n);
  for (int c = 0; c < k; ++c) {
    for (int f = 0; f < n; ++f) {
      shift(c, f) = spec.cluster_shift * (2.0 * unit(eng) - 1.0);
    }
  }

  out.betas.resize(k, n);
  if (spec.beta_per_cluster) {
    for (int c = 0; c < k; ++c) {
      for (int f = 0; f < n; ++f) out.betas(c, f) = gauss(eng);
    }
  } else {
    RowVector beta(n);
    for (int f = 0; f < n; ++f) beta(f) = gauss(eng);
    for (int c = 0; c < k; ++c) out.betas.row(c) = beta;
  }

  auto draw_block = [&](int rows, const std::vector<int>& labels, Matrix& x, Vector& y) {
    x.resize(rows, n);
    y.resize(rows);
    for (int r = 0; r < rows; ++r) {
      const int c = labels[static_cast<std::size_t>(r)];
      for (int f = 0; f < n; ++f) {
        x(r, f) = mu(f) + shift(c, f) + sigma(f) * gauss(eng);
      }
      y(r) = x.row(r).dot(out.betas.row(c)) + spec.noise_sigma * gauss(eng);
    }
  };

  Matrix x_train, x_test;
  Vector y_train, y_test;
  draw_block(spec.train_rows, out.train_clusters, x_train, y_train);
  draw_block(spec.test_rows, out.test_clusters, x_test, y_test);

  out.dataset.x_train = MaskedMatrix::fully_observed(std::move(x_train));
  out.dataset.y_train = std::move(y_train);
  out.dataset.x_test = MaskedMatrix::fully_observed(std::move(x_test));
  out.dataset.y_test = std::move(y_test);
  if (!spec.beta_per_cluster) out.dataset.beta_true = out.betas.row(0).transpose();
  return out;
}

Mask gen_cluster_mask(const std::vector<int>& idx, Index n, const MaskSpec& spec) {
  if (spec.m_rate < 0.0 || spec.m_rate > 1.0) throw ValidationError("m_rate must lie in [0, 1]");
  if (spec.noise_flip_rate < 0.0 || spec.noise_flip_rate > 1.0) {
    throw ValidationError("noise_flip_rate must lie in [0, 1]");
  }
  if (n < 1) throw ValidationError("need at least one feature");
  const Index m = static_cast<Index>(idx.size());
  int k = 0;
  for (int label : idx) {
    if (label < 0) throw ValidationError("labels must be nonnegative");
    k = std::max(k, label + 1);
  }

  auto eng = make_engine(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // one shared observation pattern per cluster: r >= max(r) * m_rate
  Mask patterns(k, n);
  for (int c = 0; c < k; ++c) {
    Vector r(n);
    for (Index f = 0; f < n; ++f) r(f) = unit(eng);
    const double cutoff = r.maxCoeff() * spec.m_rate;
    for (Index f = 0; f < n; ++f) patterns(c, f) = r(f) >= cutoff;
  }

  Mask mask(m, n);
  for (Index i = 0; i < m; ++i) {
    mask.row(i) = patterns.row(idx[static_cast<std::size_t>(i)]);
  }

  // irregularity on top of the cluster pattern
  if (spec.noise_flip_rate > 0.0) {
    for (Index i = 0; i < m; ++i) {
      for (Index f = 0; f < n; ++f) {
        if (unit(eng) < spec.noise_flip_rate) mask(i, f) = !mask(i, f);
      }
    }
  }

  // keep the every-row-observed invariant
  for (Index i = 0; i < m; ++i) {
    if (!mask.row(i).any()) {
      std::uniform_int_distribution<Index> pick(0, n - 1);
      mask(i, pick(eng)) = true;
    }
  }
  return mask;
}

}  // namespace softpred
