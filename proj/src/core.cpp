#include "softpred/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "softpred/errors.hpp"
#include "softpred/rng.hpp"

namespace softpred {

MaskedMatrix::MaskedMatrix(Matrix d, Mask m) : data(std::move(d)), mask(std::move(m)) {
  if (data.rows() != mask.rows() || data.cols() != mask.cols()) {
    throw ValidationError("mask shape " + std::to_string(mask.rows()) + "x" +
                          std::to_string(mask.cols()) + " does not match data shape " +
                          std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
}

MaskedMatrix MaskedMatrix::fully_observed(Matrix d) {
  Mask m = Mask::Constant(d.rows(), d.cols(), true);
  return MaskedMatrix(std::move(d), std::move(m));
}

void MaskedMatrix::require_observed_rows() const {
  for (Index i = 0; i < mask.rows(); ++i) {
    if (!mask.row(i).any()) {
      throw ValidationError("row " + std::to_string(i) + " has no observed entries");
    }
  }
}

void Dataset::validate() const {
  if (x_train.cols() != x_test.cols()) {
    throw ValidationError("x_train and x_test column counts differ");
  }
  if (y_train.size() != x_train.rows()) {
    throw ValidationError("y_train length does not match x_train rows");
  }
  if (y_test && y_test->size() != x_test.rows()) {
    throw ValidationError("y_test length does not match x_test rows");
  }
  if (beta_true && beta_true->size() != x_train.cols()) {
    throw ValidationError("beta_true length does not match feature count");
  }
}

ConstraintMatrix::ConstraintMatrix(Matrix values) : s(std::move(values)) {
  if (s.rows() != s.cols()) {
    throw ValidationError("constraint matrix must be square");
  }
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = i + 1; j < s.cols(); ++j) {
      if (s(i, j) != s(j, i)) {
        throw ValidationError("constraint matrix must be symmetric");
      }
      if (s(i, j) < -1.0 || s(i, j) > 1.0 || !std::isfinite(s(i, j))) {
        throw ValidationError("constraint entries must lie in [-1, 1]");
      }
    }
  }
}

MaskedMatrix mask_of_zeros(const Matrix& x) {
  Mask m(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      m(i, j) = x(i, j) != 0.0;
    }
  }
  return MaskedMatrix(x, std::move(m));
}

Dataset split(const MaskedMatrix& data, Index response_col, double test_fraction,
              std::uint64_t seed) {
  const Index m = data.rows();
  const Index n = data.cols();
  if (response_col < 0 || response_col >= n) {
    throw ValidationError("response column out of range");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie strictly between 0 and 1");
  }
  if (m < 2) {
    throw ValidationError("need at least 2 rows to split");
  }
  for (Index i = 0; i < m; ++i) {
    if (!data.mask(i, response_col)) {
      throw ValidationError("response column contains missing entries (row " +
                            std::to_string(i) + ")");
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  auto eng = make_engine(seed);
  std::shuffle(order.begin(), order.end(), eng);

  Index test_count = static_cast<Index>(std::llround(test_fraction * static_cast<double>(m)));
  test_count = std::clamp<Index>(test_count, 1, m - 1);
  const Index train_count = m - test_count;

  std::vector<Index> test_rows(order.begin(), order.begin() + test_count);
  std::vector<Index> train_rows(order.begin() + test_count, order.end());
  // keep original row order within each side
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  const Index nf = n - 1;
  auto take = [&](const std::vector<Index>& rows, Matrix& xd, Mask& xm, Vector& y) {
    xd.resize(static_cast<Index>(rows.size()), nf);
    xm.resize(static_cast<Index>(rows.size()), nf);
    y.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Index c = 0;
      for (Index j = 0; j < n; ++j) {
        if (j == response_col) continue;
        xd(static_cast<Index>(r), c) = data.data(rows[r], j);
        xm(static_cast<Index>(r), c) = data.mask(rows[r], j);
        ++c;
      }
      y(static_cast<Index>(r)) = data.data(rows[r], response_col);
    }
  };

  Dataset ds;
  Matrix xd;
  Mask xm;
  Vector y;
  take(train_rows, xd, xm, y);
  ds.x_train = MaskedMatrix(std::move(xd), std::move(xm));
  ds.y_train = std::move(y);
  take(test_rows, xd, xm, y);
  ds.x_test = MaskedMatrix(std::move(xd), std::move(xm));
  ds.y_test = std::move(y);
  (void)train_count;
  return ds;
}

}  // namespace softpred
