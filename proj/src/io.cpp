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

#include "shiftacc/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace shiftacc {
namespace {

std::string where(const std::string& name, std::size_t line, std::size_t col) {
  return name + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

ScoreMatrix<double> PredictionData::scores() const {
  if (kind != ScoreKind::kProbabilities) {
    throw Error(ErrorCode::kInvalidConfig, "file holds logits, not probabilities");
  }
  return ScoreMatrix<double>::validate(values);
}

LogitMatrix<double> PredictionData::logits() const {
  if (kind != ScoreKind::kLogits) {
    throw Error(ErrorCode::kInvalidConfig, "file holds probabilities, not logits");
  }
  return LogitMatrix<double>::validate(values);
}

PredictionData read_predictions(std::istream& in, const ReadOptions& opts,
                                const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  // Header.
  bool got_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty()) {
      got_header = true;
      break;
    }
  }
  if (!got_header) throw Error(ErrorCode::kParseError, name + ": missing header");

  const auto header = split(line);
  std::size_t first_score = 0;
  bool labeled = false;
  if (header.front() == "label") {
    labeled = true;
    first_score = 1;
  }
  const std::size_t k = header.size() - first_score;
  if (k < 2) throw Error(ErrorCode::kBadShape, name + ": header declares fewer than 2 score columns");
  const char prefix = header[first_score].empty() ? '\0' : header[first_score].front();
  if (prefix != 'p' && prefix != 'l') {
    throw Error(ErrorCode::kParseError,
                where(name, line_no, first_score + 1) + ": score columns must be named p0.. or l0..");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (header[first_score + c] != std::string(1, prefix) + std::to_string(c)) {
      throw Error(ErrorCode::kParseError, where(name, line_no, first_score + c + 1) +
                                              ": expected column '" + prefix + std::to_string(c) +
                                              "', got '" + std::string(header[first_score + c]) + "'");
    }
  }
  const ScoreKind kind = prefix == 'p' ? ScoreKind::kProbabilities : ScoreKind::kLogits;
  if (opts.expected_kind && *opts.expected_kind != kind) {
    throw Error(ErrorCode::kInvalidConfig, name + ": file holds " +
                                               (kind == ScoreKind::kLogits ? "logits" : "probabilities"));
  }

  std::vector<double> values;
  std::vector<int> labels;
  Index rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError, where(name, line_no, 1) + ": expected " +
                                              std::to_string(header.size()) + " fields, got " +
                                              std::to_string(fields.size()));
    }
    if (labeled) {
      int y = 0;
      if (!parse_number(fields[0], y)) {
        throw Error(ErrorCode::kParseError,
                    where(name, line_no, 1) + ": bad label '" + std::string(fields[0]) + "'");
      }
      if (y < 0 || static_cast<std::size_t>(y) >= k) {
        throw Error(ErrorCode::kLabelOutOfRange, where(name, line_no, 1) + ": label " +
                                                     std::to_string(y) + " outside [0, " +
                                                     std::to_string(k) + ")");
      }
      labels.push_back(y);
    }
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      if (!parse_number(fields[first_score + c], v)) {
        throw Error(ErrorCode::kParseError, where(name, line_no, first_score + c + 1) +
                                                ": bad number '" +
                                                std::string(fields[first_score + c]) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::kBadShape, name + ": no data rows");

  PredictionData out;
  out.kind = kind;
  out.values = Eigen::Map<const RowMatrix<double>>(values.data(), rows, static_cast<Index>(k));
  if (labeled) out.labels = Eigen::Map<const Labels>(labels.data(), rows);
  try {
    if (kind == ScoreKind::kProbabilities) {
      out.values = ScoreMatrix<double>::validate(std::move(out.values), opts.validate).values();
    } else {
      (void)LogitMatrix<double>::validate(out.values);
    }
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.detail());
  }
  return out;
}

PredictionData read_predictions(const std::filesystem::path& path, const ReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_predictions(in, opts, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_predictions(std::ostream& out, const RowMatrix<double>& values, ScoreKind kind,
                       const Labels* labels) {
  const char prefix = kind == ScoreKind::kProbabilities ? 'p' : 'l';
  if (labels) out << "label,";
  for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << prefix << c;
  out << '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    if (labels) out << (*labels)[r] << ',';
    for (Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
    out << '\n';
  }
}

void write_predictions(const std::filesystem::path& path, const RowMatrix<double>& values,
                       ScoreKind kind, const Labels* labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  write_predictions(out, values, kind, labels);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace shiftacc
