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

#include "shiftacc/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace shiftacc {
namespace {

using nlohmann::json;

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

double read_number(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw Error(ErrorCode::kParseError, "unexpected string '" + s + "' where a number belongs");
  }
  return j.get<double>();
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read_number(j.at(key));
}

Method read_method(const json& j) {
  const auto m = parse_method(j.get<std::string>());
  if (!m) throw Error(ErrorCode::kParseError, "unknown method '" + j.get<std::string>() + "'");
  return *m;
}

std::string fixed(double v, int precision = 4) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int precision = 4) {
  return v ? fixed(*v, precision) : "-";
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

json to_json(const EvaluationReport& report) {
  json results = json::array();
  for (const auto& r : report.results) {
    const auto& o = r.output;
    results.push_back({{"method", std::string(method_name(o.method))},
                       {"estimate", number(o.estimate)},
                       {"threshold", optional_number(o.threshold)},
                       {"alpha", optional_number(o.alpha)},
                       {"temperature", optional_number(o.temperature)},
                       {"source_accuracy", optional_number(o.source_accuracy)},
                       {"clamped", o.clamped},
                       {"empty_set_fallbacks", o.empty_set_fallbacks},
                       {"absolute_error", optional_number(r.absolute_error)}});
  }
  const auto& m = report.meta;
  return {{"results", results},
          {"true_target_accuracy", optional_number(report.true_target_accuracy)},
          {"meta",
           {{"seed", m.seed},
            {"temperature", optional_number(m.temperature)},
            {"cal_fraction", number(m.cal_fraction)},
            {"doc_signed", m.doc_signed},
            {"empty_set_fallbacks", m.empty_set_fallbacks},
            {"source_rows", m.source_rows},
            {"target_rows", m.target_rows},
            {"classes", m.classes},
            {"warnings", m.warnings}}}};
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport report;
  try {
    for (const auto& r : j.at("results")) {
      MethodResult mr;
      mr.output.method = read_method(r.at("method"));
      mr.output.estimate = read_number(r.at("estimate"));
      mr.output.threshold = read_optional(r, "threshold");
      mr.output.alpha = read_optional(r, "alpha");
      mr.output.temperature = read_optional(r, "temperature");
      mr.output.source_accuracy = read_optional(r, "source_accuracy");
      mr.output.clamped = r.at("clamped").get<bool>();
      mr.output.empty_set_fallbacks = r.at("empty_set_fallbacks").get<Index>();
      mr.absolute_error = read_optional(r, "absolute_error");
      report.results.push_back(mr);
    }
    report.true_target_accuracy = read_optional(j, "true_target_accuracy");
    const auto& m = j.at("meta");
    report.meta.seed = m.at("seed").get<std::uint64_t>();
    report.meta.temperature = read_optional(m, "temperature");
    report.meta.cal_fraction = read_number(m.at("cal_fraction"));
    report.meta.doc_signed = m.at("doc_signed").get<bool>();
    report.meta.empty_set_fallbacks = m.at("empty_set_fallbacks").get<Index>();
    report.meta.source_rows = m.at("source_rows").get<Index>();
    report.meta.target_rows = m.at("target_rows").get<Index>();
    report.meta.classes = m.at("classes").get<Index>();
    report.meta.warnings = m.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed report: ") + e.what());
  }
  return report;
}

json to_json(const AggregateReport& report) {
  json methods = json::array();
  for (const auto& s : report.methods) {
    methods.push_back({{"method", std::string(method_name(s.method))},
                       {"mean_estimate", number(s.mean_estimate)},
                       {"mean_absolute_error", number(s.mean_absolute_error)},
                       {"std_absolute_error", number(s.std_absolute_error)}});
  }
  json runs = json::array();
  for (const auto& r : report.per_run) runs.push_back(to_json(r));
  return {{"runs", report.runs},
          {"base_seed", report.base_seed},
          {"temperature_scaled", report.temperature_scaled},
          {"mean_true_source_accuracy", number(report.mean_true_source_accuracy)},
          {"mean_true_target_accuracy", number(report.mean_true_target_accuracy)},
          {"methods", methods},
          {"per_run", runs}};
}

std::string format_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << pad("method", 10) << pad("estimate", 10) << pad("truth", 10) << pad("abs_error", 11)
      << pad("threshold", 11) << pad("alpha", 8) << "\n";
  for (const auto& r : report.results) {
    const auto& o = r.output;
    out << pad(std::string(method_name(o.method)), 10) << pad(fixed(o.estimate), 10)
        << pad(fixed(report.true_target_accuracy), 10) << pad(fixed(r.absolute_error), 11)
        << pad(fixed(o.threshold), 11) << pad(fixed(o.alpha), 8) << "\n";
  }
  const auto& m = report.meta;
  out << "\nsource rows " << m.source_rows << ", target rows " << m.target_rows << ", classes "
      << m.classes << ", temperature " << fixed(m.temperature) << ", cal-fraction "
      << fixed(m.cal_fraction, 3) << ", empty-set fallbacks " << m.empty_set_fallbacks << "\n";
  return out.str();
}

std::string format_table(const AggregateReport& report) {
  std::ostringstream out;
  out << "runs " << report.runs << " (seeds " << report.base_seed << ".."
      << report.base_seed + static_cast<std::uint64_t>(report.runs - 1) << "), temperature scaling "
      << (report.temperature_scaled ? "on" : "off") << "\n"
      << "source accuracy " << fixed(report.mean_true_source_accuracy) << " -> target accuracy "
      << fixed(report.mean_true_target_accuracy) << "\n\n";
  out << pad("method", 10) << pad("estimate", 10) << "absolute target error (mean +- std)\n";
  for (const auto& s : report.methods) {
    out << pad(std::string(method_name(s.method)), 10) << pad(fixed(s.mean_estimate), 10)
        << fixed(100.0 * s.mean_absolute_error, 1) << "% +- " << fixed(100.0 * s.std_absolute_error, 1)
        << "%\n";
  }
  return out.str();
}

std::string format_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "method,estimate,truth,absolute_error\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.results) {
    out << method_name(r.output.method) << ',' << format_double(r.output.estimate) << ','
        << opt(report.true_target_accuracy) << ',' << opt(r.absolute_error) << '\n';
  }
  return out.str();
}

std::string format_csv(const AggregateReport& report) {
  std::ostringstream out;
  out << "method,mean_estimate,mean_truth,mean_absolute_error,std_absolute_error,runs\n";
  for (const auto& s : report.methods) {
    out << method_name(s.method) << ',' << format_double(s.mean_estimate) << ','
        << format_double(report.mean_true_target_accuracy) << ','
        << format_double(s.mean_absolute_error) << ',' << format_double(s.std_absolute_error) << ','
        << report.runs << '\n';
  }
  return out.str();
}

}  // namespace shiftacc
