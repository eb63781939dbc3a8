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

#ifndef SHIFTACC_IO_HPP
#define SHIFTACC_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "shiftacc/core.hpp"

namespace shiftacc {

enum class ScoreKind { kProbabilities, kLogits };

/// Contents of one prediction file. Probability files are already validated
/// (and renormalized when requested) by the time a caller sees them.
struct PredictionData {
  ScoreKind kind = ScoreKind::kProbabilities;
  RowMatrix<double> values;
  std::optional<Labels> labels;

  Index rows() const { return values.rows(); }
  Index classes() const { return values.cols(); }
  bool has_labels() const { return labels.has_value(); }

  ScoreMatrix<double> scores() const;
  LogitMatrix<double> logits() const;
};

struct ReadOptions {
  /// Reject files whose header declares the other kind.
  std::optional<ScoreKind> expected_kind;
  ValidateOptions validate;
};

/// CSV with a header row: optional leading "label" column, then p0..p{K-1}
/// (probabilities) or l0..l{K-1} (logits). Errors carry 1-based line and
/// column numbers.
PredictionData read_predictions(std::istream& in, const ReadOptions& opts = {},
                                const std::string& source_name = "<stream>");
PredictionData read_predictions(const std::filesystem::path& path, const ReadOptions& opts = {});

/// Values are written in shortest round-trip form, so a read reproduces
/// them bit for bit.
void write_predictions(std::ostream& out, const RowMatrix<double>& values, ScoreKind kind,
                       const Labels* labels = nullptr);
void write_predictions(const std::filesystem::path& path, const RowMatrix<double>& values,
                       ScoreKind kind, const Labels* labels = nullptr);

std::string format_double(double v);

}  // namespace shiftacc

#endif  // SHIFTACC_IO_HPP
