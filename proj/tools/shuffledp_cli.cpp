// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line experiment runner.
//
//   shuffledp run --query count --protocol ohsdp --n 16384 --k 1 --attack flood
//   shuffledp sweep --axis lambda --values 16,64,256 --query count --n 16384

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shuffledp/shuffledp.hpp"

namespace {

using shuffledp::ExperimentConfig;

// Raw flag values; only flags given on the command line are applied.
struct Flags {
  std::string config;
  std::optional<std::string> query, protocol, base, eps, lambda, attack, dist,
      data, col, out, format;
  std::optional<std::int64_t> n, u, k, khat, attack_msgs, cap;
  std::optional<double> delta, beta;
  std::optional<int> trials, workers;
  std::optional<std::uint64_t> seed;
};

void AddFlags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override it");
  app->add_option("--query", f.query, "count|sum|hist|range");
  app->add_option("--protocol", f.protocol, "base|susdp|bsdp|hsdp|ohsdp");
  app->add_option("--base", f.base, "dlap-count|splitmix-sum|perbin-hist");
  app->add_option("--n", f.n, "number of users");
  app->add_option("--u", f.u, "input domain bound U");
  app->add_option("--eps", f.eps, "privacy budget epsilon (inf: noiseless)");
  app->add_option("--delta", f.delta, "privacy budget delta (default n^-2)");
  app->add_option("--beta", f.beta, "failure probability");
  app->add_option("--lambda", f.lambda, "bottom group size, INT or auto");
  app->add_option("--k", f.k, "corrupted users");
  app->add_option("--khat", f.khat, "public bound on corrupted users");
  app->add_option("--attack", f.attack,
                  "none|flood|drop|alter|impersonate");
  app->add_option("--attack-msgs", f.attack_msgs,
                  "malicious messages per level (per bin for histograms)");
  app->add_option("--dist", f.dist, "unif|zipf|gauss");
  app->add_option("--data", f.data, "CSV file to read inputs from");
  app->add_option("--col", f.col, "CSV column name or 0-based index");
  app->add_option("--cap", f.cap, "clamp loaded values to [0, cap]");
  app->add_option("--trials", f.trials, "trials per point");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--out", f.out, "output path (default stdout)");
  app->add_option("--format", f.format, "csv|json");
  app->add_option("--workers", f.workers, "worker threads (0: all cores)");
}

ExperimentConfig BuildConfig(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in)
      throw shuffledp::IoError("cannot open config file '" + f.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw shuffledp::ParameterError("bad config file '" + f.config +
                                      "': " + e.what());
    }
    shuffledp::from_json(j, c);
  }
  if (f.query) c.query = shuffledp::ParseQueryKind(*f.query);
  if (f.protocol) c.protocol = shuffledp::ParseVariant(*f.protocol);
  if (f.base) c.base = shuffledp::ParseBaseKind(*f.base);
  if (f.n) c.n = *f.n;
  if (f.u) c.domain = *f.u;
  if (f.eps) c.epsilon = shuffledp::ParseEpsilon(*f.eps);
  if (f.delta) c.delta = *f.delta;
  if (f.beta) c.beta = *f.beta;
  if (f.lambda) {
    if (*f.lambda == "auto")
      c.lambda.reset();
    else
      c.lambda = shuffledp::internal::ParseInt(*f.lambda, "lambda");
  }
  if (f.k) c.k = *f.k;
  if (f.khat) c.k_hat = *f.khat;
  if (f.attack) c.attack = shuffledp::ParseAttackKind(*f.attack);
  if (f.attack_msgs) c.attack_msgs = *f.attack_msgs;
  if (f.dist) c.dist = shuffledp::ParseDistKind(*f.dist);
  if (f.data) c.data_path = *f.data;
  if (f.col) c.data_column = *f.col;
  if (f.cap) c.cap = *f.cap;
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.format) c.format = *f.format;
  if (f.workers) c.workers = *f.workers;
  return c;
}

void PrintWarnings(const ExperimentConfig& c) {
  if (c.data_path.empty()) return;
  const auto loaded = shuffledp::LoadCsv(c.data_path, c.data_column, c.cap);
  for (const std::string& w : loaded.warnings)
    std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shuffle-model DP simulation with poisoning defenses"};
  app.require_subcommand(1);

  Flags run_flags;
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  AddFlags(run, run_flags);

  Flags sweep_flags;
  std::string axis;
  std::vector<std::string> values;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter");
  AddFlags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "lambda|k|eps|n")->required();
  sweep->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<shuffledp::Summary> rows;
    ExperimentConfig config;
    if (run->parsed()) {
      config = BuildConfig(run_flags);
      PrintWarnings(config);
      rows.push_back(shuffledp::RunExperiment(config));
    } else {
      config = BuildConfig(sweep_flags);
      PrintWarnings(config);
      rows = shuffledp::Sweep(config, shuffledp::ParseSweepAxis(axis), values);
    }
    shuffledp::Emit(rows, config.format, config.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
