// Copyright 2026 The shiftacc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHIFTACC_CORE_HPP
#define SHIFTACC_CORE_HPP

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shiftacc/error.hpp"

namespace shiftacc {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Labels = Eigen::VectorXi;

/// Row sums must land within this distance of 1.
inline constexpr double kRowSumTolerance = 1e-4;
/// Entries outside [0, 1] by at most this much are clamped silently.
inline constexpr double kClampDust = 1e-9;

struct ValidateOptions {
  /// Divide each row by its sum instead of rejecting rows off the simplex.
  bool renormalize = false;
};

namespace detail {

inline std::string at(Index r, Index c) {
  return "(row " + std::to_string(r) + ", col " + std::to_string(c) + ")";
}

template <typename Derived>
void check_shape(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() < 1 || m.cols() < 2) {
    throw Error(ErrorCode::kBadShape,
                "need n >= 1 rows and K >= 2 columns, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(static_cast<double>(m(r, c)))) {
        throw Error(ErrorCode::kNonFiniteValue, "non-finite value at " + at(r, c));
      }
    }
  }
}

}  // namespace detail

/// n x K class probabilities, every row on the simplex. Only obtainable
/// through validation, so holding one is proof of the invariants.
template <typename Scalar>
class ScoreMatrix {
 public:
  using Dense = RowMatrix<Scalar>;

  static ScoreMatrix validate(Dense raw, const ValidateOptions& opts = {}) {
    detail::check_shape(raw);
    detail::check_finite(raw);
    for (Index r = 0; r < raw.rows(); ++r) {
      for (Index c = 0; c < raw.cols(); ++c) {
        Scalar& v = raw(r, c);
        if (v < Scalar(0)) {
          if (v < Scalar(-kClampDust)) {
            throw Error(ErrorCode::kValueOutOfRange,
                        "negative probability at " + detail::at(r, c));
          }
          v = Scalar(0);
        } else if (v > Scalar(1)) {
          if (v > Scalar(1 + kClampDust) && !opts.renormalize) {
            throw Error(ErrorCode::kValueOutOfRange,
                        "probability above 1 at " + detail::at(r, c));
          }
          if (v <= Scalar(1 + kClampDust)) v = Scalar(1);
        }
      }
      double sum = 0.0;
      for (Index c = 0; c < raw.cols(); ++c) sum += static_cast<double>(raw(r, c));
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        if (!opts.renormalize || !(sum > 0.0)) {
          throw Error(ErrorCode::kRowSumViolation,
                      "row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
        for (Index c = 0; c < raw.cols(); ++c) {
          raw(r, c) = static_cast<Scalar>(static_cast<double>(raw(r, c)) / sum);
        }
      }
    }
    return ScoreMatrix(std::move(raw));
  }

  const Dense& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  auto row(Index i) const { return values_.row(i); }
  Scalar operator()(Index r, Index c) const { return values_(r, c); }

  friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  explicit ScoreMatrix(Dense v) : values_(std::move(v)) {}
  Dense values_;
};

/// n x K raw pre-softmax scores.
template <typename Scalar>
class LogitMatrix {
 public:
  using Dense = RowMatrix<Scalar>;

  static LogitMatrix validate(Dense raw) {
    detail::check_shape(raw);
    detail::check_finite(raw);
    return LogitMatrix(std::move(raw));
  }

  const Dense& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  auto row(Index i) const { return values_.row(i); }
  Scalar operator()(Index r, Index c) const { return values_(r, c); }

 private:
  explicit LogitMatrix(Dense v) : values_(std::move(v)) {}
  Dense values_;
};

template <typename Scalar>
ScoreMatrix<Scalar> validate_scores(RowMatrix<Scalar> raw,
                                    const ValidateOptions& opts = {}) {
  return ScoreMatrix<Scalar>::validate(std::move(raw), opts);
}

template <typename Derived>
ScoreMatrix<typename Derived::Scalar> validate_scores(const Eigen::MatrixBase<Derived>& raw,
                                                      const ValidateOptions& opts = {}) {
  return ScoreMatrix<typename Derived::Scalar>::validate(raw, opts);
}

/// A score or logit matrix paired with one class label per row.
template <typename Matrix>
class LabeledDataset {
 public:
  using Scalar = typename Matrix::Dense::Scalar;

  LabeledDataset(Matrix scores, Labels labels)
      : scores_(std::move(scores)), labels_(std::move(labels)) {
    if (labels_.size() != scores_.rows()) {
      throw Error(ErrorCode::kBadShape,
                  "label count " + std::to_string(labels_.size()) +
                      " does not match row count " + std::to_string(scores_.rows()));
    }
    for (Index i = 0; i < labels_.size(); ++i) {
      if (labels_[i] < 0 || labels_[i] >= scores_.cols()) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    "label " + std::to_string(labels_[i]) + " at row " +
                        std::to_string(i) + " outside [0, " +
                        std::to_string(scores_.cols()) + ")");
      }
    }
  }

  const Matrix& scores() const noexcept { return scores_; }
  const Labels& labels() const noexcept { return labels_; }
  Index size() const noexcept { return scores_.rows(); }
  Index classes() const noexcept { return scores_.cols(); }

 private:
  Matrix scores_;
  Labels labels_;
};

template <typename Scalar>
using LabeledScores = LabeledDataset<ScoreMatrix<Scalar>>;
template <typename Scalar>
using LabeledLogits = LabeledDataset<LogitMatrix<Scalar>>;

/// Index of the largest entry; ties go to the lowest index.
template <typename Derived>
Index argmax(const Eigen::DenseBase<Derived>& row) {
  Index best = 0;
  for (Index j = 1; j < row.size(); ++j) {
    if (row(j) > row(best)) best = j;
  }
  return best;
}

/// Left-to-right sum in double, independent of Eigen's reduction order.
template <typename Derived>
double sequential_sum(const Eigen::DenseBase<Derived>& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += static_cast<double>(v(i));
  return s;
}

template <typename Derived>
double sequential_mean(const Eigen::DenseBase<Derived>& v) {
  return sequential_sum(v) / static_cast<double>(v.size());
}

template <typename Matrix>
double accuracy(const LabeledDataset<Matrix>& data) {
  Index hits = 0;
  for (Index i = 0; i < data.size(); ++i) {
    if (argmax(data.scores().row(i)) == data.labels()[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

template <typename Scalar>
Vector<Scalar> max_confidence(const ScoreMatrix<Scalar>& scores) {
  Vector<Scalar> out(scores.rows());
  for (Index i = 0; i < scores.rows(); ++i) out[i] = scores.row(i).maxCoeff();
  return out;
}

/// Per-row sum of p log p (natural log, 0 log 0 = 0). Higher is more confident.
template <typename Scalar>
Vector<Scalar> neg_entropy(const ScoreMatrix<Scalar>& scores) {
  Vector<Scalar> out(scores.rows());
  for (Index i = 0; i < scores.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < scores.cols(); ++j) {
      const double p = static_cast<double>(scores(i, j));
      if (p > 0.0) s += p * std::log(p);
    }
    out[i] = static_cast<Scalar>(s);
  }
  return out;
}

/// Copies the given rows, in order.
template <typename Scalar>
RowMatrix<Scalar> take_rows(const RowMatrix<Scalar>& m, std::span<const Index> rows) {
  RowMatrix<Scalar> out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

inline Labels take_labels(const Labels& l, std::span<const Index> rows) {
  Labels out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = l[rows[i]];
  return out;
}

template <typename Scalar>
LabeledScores<Scalar> take_rows(const LabeledScores<Scalar>& d, std::span<const Index> rows) {
  return {ScoreMatrix<Scalar>::validate(take_rows(d.scores().values(), rows)),
          take_labels(d.labels(), rows)};
}

}  // namespace shiftacc

#endif  // SHIFTACC_CORE_HPP
