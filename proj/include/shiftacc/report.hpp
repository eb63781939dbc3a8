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

#ifndef SHIFTACC_REPORT_HPP
#define SHIFTACC_REPORT_HPP

#include <string>

#include "json.hpp"
#include "shiftacc/pipeline.hpp"

namespace shiftacc {

// Non-finite doubles (an ATC threshold of -inf) are written as the strings
// "inf", "-inf" or "nan" so they survive a JSON round trip.

nlohmann::json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AggregateReport& report);

/// Fixed-width human table, one row per method.
std::string format_table(const EvaluationReport& report);
std::string format_table(const AggregateReport& report);

/// method,estimate,truth,absolute_error
std::string format_csv(const EvaluationReport& report);
/// method,mean_estimate,mean_truth,mean_absolute_error,std_absolute_error,runs
std::string format_csv(const AggregateReport& report);

}  // namespace shiftacc

#endif  // SHIFTACC_REPORT_HPP
