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

// shiftacc: estimate a classifier's accuracy on an unlabeled target set from
// its prediction scores.
//
//   shiftacc estimate --source src.csv --target tgt.csv [--method all] ...
//   shiftacc estimate --runs 5 [synth options] ...
//   shiftacc synth --out-dir DIR [synth options]
//   shiftacc calibrate --source src.csv [--recover-logits]
//
// Exit codes: 0 success, 1 input error, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shiftacc/calibration.hpp"
#include "shiftacc/io.hpp"
#include "shiftacc/pipeline.hpp"
#include "shiftacc/report.hpp"
#include "shiftacc/synth.hpp"

namespace {

using namespace shiftacc;

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct SynthFlags {
  SynthConfig cfg;

  void attach(CLI::App* app) {
    app->add_option("--k", cfg.k, "Number of classes")->capture_default_str();
    app->add_option("--n-source", cfg.n_source, "Source rows")->capture_default_str();
    app->add_option("--n-target", cfg.n_target, "Target rows")->capture_default_str();
    app->add_option("--prior-source", cfg.prior_source, "Source class prior (K values; default uniform)");
    app->add_option("--prior-target", cfg.prior_target, "Target class prior (K values; default uniform)");
    app->add_option("--margin-source", cfg.margin_source, "Correct-class logit boost, source")->capture_default_str();
    app->add_option("--margin-target", cfg.margin_target, "Correct-class logit boost, target")->capture_default_str();
    app->add_option("--noise-source", cfg.noise_source, "Logit noise sigma, source")->capture_default_str();
    app->add_option("--noise-target", cfg.noise_target, "Logit noise sigma, target")->capture_default_str();
    app->add_option("--label-noise-source", cfg.label_noise_source, "Label flip rate, source")->capture_default_str();
    app->add_option("--label-noise-target", cfg.label_noise_target, "Label flip rate, target")->capture_default_str();
    app->add_option("--gen-temperature", cfg.gen_temperature, "Logits are multiplied by this factor (the temperature a fit recovers)")->capture_default_str();
  }
};

nlohmann::json config_json(const SynthConfig& c) {
  return {{"k", c.k},
          {"n_source", c.n_source},
          {"n_target", c.n_target},
          {"prior_source", c.prior_source},
          {"prior_target", c.prior_target},
          {"margin_source", c.margin_source},
          {"margin_target", c.margin_target},
          {"noise_source", c.noise_source},
          {"noise_target", c.noise_target},
          {"label_noise_source", c.label_noise_source},
          {"label_noise_target", c.label_noise_target},
          {"gen_temperature", c.gen_temperature},
          {"seed", c.seed}};
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& name : names) {
    if (name == "all") return {kAllMethods.begin(), kAllMethods.end()};
    const auto m = parse_method(name);
    if (!m) throw Error(ErrorCode::kInvalidConfig, "unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Estimate classifier accuracy on unlabeled target data from prediction scores"};
  app.require_subcommand(1);

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Run accuracy estimators over prediction files");
  std::string source_path;
  std::string target_path;
  std::vector<std::string> method_names{"all"};
  EstimateOptions opts;
  bool renormalize = false;
  std::string output = "table";
  int runs = 0;
  SynthFlags estimate_synth;
  estimate->add_option("--source", source_path, "Labeled source predictions (CSV)");
  estimate->add_option("--target", target_path, "Target predictions (CSV; labels optional)");
  estimate->add_option("--method", method_names,
                       "atc-mc, atc-ne, ac, doc, cpc-acc, cpc-ac or all (repeatable)")
      ->capture_default_str();
  estimate->add_flag("--temperature-scale", opts.temperature_scale,
                     "Fit a temperature on the source and apply it to both sides");
  estimate->add_flag("--doc-signed", opts.doc_signed, "Signed confidence difference for DOC");
  estimate->add_option("--cal-fraction", opts.cal_fraction,
                       "Share of source rows used for calibration")
      ->capture_default_str();
  estimate->add_flag("--renormalize", renormalize, "Renormalize probability rows off the simplex");
  estimate->add_option("--seed", opts.seed, "Seed for the calibration split and synthetic runs")
      ->capture_default_str();
  estimate->add_option("--output", output, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  estimate->add_option("--runs", runs,
                       "Evaluate over N synthetic datasets instead of files (mean +- std)");
  estimate_synth.attach(estimate);

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled source/target pair");
  std::string out_dir;
  SynthFlags synth_flags;
  synth->add_option("--out-dir", out_dir, "Output directory")->required();
  synth->add_option("--seed", synth_flags.cfg.seed, "Generator seed")->capture_default_str();
  synth_flags.attach(synth);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Fit a temperature on labeled source predictions");
  std::string cal_path;
  bool recover_flag = false;
  std::string cal_output = "table";
  calibrate->add_option("--source", cal_path, "Labeled source predictions (CSV)")->required();
  calibrate->add_flag("--recover-logits", recover_flag,
                      "Accept probabilities, using log(p + 1e-12) as logits");
  calibrate->add_option("--output", cal_output, "table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (estimate->parsed()) {
    opts.methods = parse_methods(method_names);
    const ReadOptions read{std::nullopt, {renormalize}};
    const bool have_files = !source_path.empty() || !target_path.empty();
    if (runs > 0) {
      if (have_files) throw Error(ErrorCode::kInvalidConfig, "--runs generates data; drop --source/--target");
      SynthConfig cfg = estimate_synth.cfg;
      cfg.seed = opts.seed;
      const AggregateReport agg = run_synth_evaluation(cfg, runs, opts);
      if (output == "json") std::cout << to_json(agg).dump(2) << "\n";
      else if (output == "csv") std::cout << format_csv(agg);
      else std::cout << format_table(agg);
      return 0;
    }
    if (runs < 0) throw Error(ErrorCode::kInvalidConfig, "--runs must be positive");
    if (source_path.empty() || target_path.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "estimate needs --source and --target (or --runs)");
    }
    const PredictionData source = read_predictions(std::filesystem::path(source_path), read);
    const PredictionData target = read_predictions(std::filesystem::path(target_path), read);
    const EvaluationReport report = run_estimate(source, target, opts);
    for (const auto& w : report.meta.warnings) std::cerr << "warning: " << w << "\n";
    if (output == "json") std::cout << to_json(report).dump(2) << "\n";
    else if (output == "csv") std::cout << format_csv(report);
    else std::cout << format_table(report);
    return 0;
  }

  if (synth->parsed()) {
    const SynthOutput data = generate(synth_flags.cfg);
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
    write_predictions(dir / "source.csv", data.source.scores().values(), ScoreKind::kLogits,
                      &data.source.labels());
    write_predictions(dir / "target.csv", data.target.scores().values(), ScoreKind::kLogits,
                      &data.target.labels());
    const nlohmann::json truth = {{"seed", synth_flags.cfg.seed},
                                  {"config", config_json(synth_flags.cfg)},
                                  {"true_source_accuracy", data.true_source_accuracy},
                                  {"true_target_accuracy", data.true_target_accuracy}};
    std::ofstream out(dir / "truth.json", std::ios::binary);
    if (!(out << truth.dump(2) << "\n")) throw Error(ErrorCode::kIoError, "cannot write truth.json");
    std::cout << "wrote " << (dir / "source.csv").string() << ", " << (dir / "target.csv").string()
              << ", " << (dir / "truth.json").string() << "\n";
    return 0;
  }

  // calibrate
  const PredictionData data = read_predictions(std::filesystem::path(cal_path));
  if (data.kind == ScoreKind::kProbabilities && !recover_flag) {
    throw Error(ErrorCode::kInvalidConfig,
                cal_path + " holds probabilities; pass --recover-logits to fit on log(p)");
  }
  if (!data.has_labels()) throw Error(ErrorCode::kMissingLabels, cal_path + " has no label column");
  const LogitMatrix<double> logits =
      data.kind == ScoreKind::kLogits ? data.logits() : recover_logits(data.scores());
  const TemperatureFit fit = fit_temperature(LabeledLogits<double>(logits, *data.labels));
  if (fit.degenerate) std::cerr << "warning: constant logits in every row; temperature left at 1\n";
  if (cal_output == "json") {
    std::cout << nlohmann::json{{"temperature", fit.temperature},
                                {"nll", fit.nll},
                                {"grid_best", fit.grid_best},
                                {"degenerate", fit.degenerate}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "temperature " << format_double(fit.temperature) << "\n"
              << "nll " << format_double(fit.nll) << "\n"
              << "grid_best " << format_double(fit.grid_best) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const shiftacc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == shiftacc::ErrorCode::kInvalidConfig ? kExitConfig : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
