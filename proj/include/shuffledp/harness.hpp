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

#ifndef SHUFFLEDP_HARNESS_HPP_
#define SHUFFLEDP_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "shuffledp/adversary.hpp"
#include "shuffledp/base_protocol.hpp"
#include "shuffledp/dataset.hpp"
#include "shuffledp/defense.hpp"
#include "shuffledp/errors.hpp"
#include "shuffledp/query.hpp"
#include "shuffledp/random.hpp"
#include "shuffledp/shuffle.hpp"
#include "shuffledp/tree_plan.hpp"

namespace shuffledp {

enum class AttackKind { kNone, kFlood, kDrop, kAlter, kImpersonate };

inline std::string ToString(AttackKind a) {
  switch (a) {
    case AttackKind::kNone:
      return "none";
    case AttackKind::kFlood:
      return "flood";
    case AttackKind::kDrop:
      return "drop";
    case AttackKind::kAlter:
      return "alter";
    case AttackKind::kImpersonate:
      return "impersonate";
  }
  return "?";
}

namespace internal {

template <typename Enum, std::size_t N>
Enum ParseEnum(const std::string& text, const Enum (&options)[N],
               const char* what) {
  for (Enum e : options)
    if (ToString(e) == text) return e;
  std::string allowed;
  for (Enum e : options) allowed += (allowed.empty() ? "" : "|") + ToString(e);
  throw ParameterError("unknown " + std::string(what) + " '" + text +
                       "' (expected " + allowed + ")");
}

}  // namespace internal

inline QueryKind ParseQueryKind(const std::string& s) {
  static const QueryKind kAll[] = {QueryKind::kCount, QueryKind::kSum,
                                   QueryKind::kHistogram,
                                   QueryKind::kRangeTree};
  return internal::ParseEnum(s, kAll, "query");
}

inline Variant ParseVariant(const std::string& s) {
  static const Variant kAll[] = {Variant::kBase, Variant::kSusdp,
                                 Variant::kBsdp, Variant::kHsdp,
                                 Variant::kOhsdp};
  return internal::ParseEnum(s, kAll, "protocol");
}

inline BaseKind ParseBaseKind(const std::string& s) {
  static const BaseKind kAll[] = {BaseKind::kDlapCount, BaseKind::kSplitMixSum,
                                  BaseKind::kPerBinHist};
  return internal::ParseEnum(s, kAll, "base protocol");
}

inline AttackKind ParseAttackKind(const std::string& s) {
  static const AttackKind kAll[] = {AttackKind::kNone, AttackKind::kFlood,
                                    AttackKind::kDrop, AttackKind::kAlter,
                                    AttackKind::kImpersonate};
  return internal::ParseEnum(s, kAll, "attack");
}

inline DistKind ParseDistKind(const std::string& s) {
  static const DistKind kAll[] = {DistKind::kUniform, DistKind::kZipf,
                                  DistKind::kGauss};
  return internal::ParseEnum(s, kAll, "distribution");
}

// Accepts "inf" for the noiseless limit.
inline double ParseEpsilon(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ParameterError("bad epsilon '" + s + "'");
  return v;
}

struct ExperimentConfig {
  QueryKind query = QueryKind::kCount;
  std::int64_t domain = 1;
  Variant protocol = Variant::kOhsdp;
  std::optional<BaseKind> base;
  std::int64_t n = 1024;
  std::optional<double> epsilon;
  std::optional<double> delta;
  double beta = 0.1;
  std::optional<std::int64_t> lambda;  // nullopt selects the automatic size
  std::int64_t k = 0;
  std::optional<std::int64_t> k_hat;
  AttackKind attack = AttackKind::kNone;
  std::optional<std::int64_t> attack_msgs;
  DistKind dist = DistKind::kUniform;
  std::string data_path;
  std::string data_column = "0";
  std::optional<std::int64_t> cap;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  // 0 uses every hardware thread.
  int workers = 0;

  double Epsilon() const {
    return epsilon.value_or(query == QueryKind::kHistogram ? 4.0 : 1.0);
  }
  double Delta() const {
    if (delta.has_value()) return *delta;
    const double nn = static_cast<double>(std::max<std::int64_t>(n, 2));
    return 1.0 / (nn * nn);
  }
  std::int64_t KHat() const {
    return k_hat.value_or(std::max<std::int64_t>(1, k));
  }
  std::int64_t Domain() const {
    return query == QueryKind::kCount ? 1 : domain;
  }
};

// Smallest power of two at or above ceil(log2 n * log2(1/delta)), capped at
// the next power of two above n and raised until it exceeds 2 k_hat.
inline std::int64_t AutoLambda(std::int64_t n, double delta,
                               std::int64_t k_hat) {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (!(delta > 0 && delta < 1))
    throw ParameterError("automatic lambda needs delta in (0,1)");
  const double target =
      std::ceil(std::log2(static_cast<double>(n)) * std::log2(1.0 / delta));
  const auto want = static_cast<std::uint64_t>(std::max(1.0, target));
  std::int64_t lambda = static_cast<std::int64_t>(
      std::min(std::bit_ceil(want), std::bit_ceil(static_cast<std::uint64_t>(n))));
  while (lambda <= 2 * k_hat) lambda *= 2;
  return lambda;
}

// Number of users after padding n to the shape the variant needs.
inline std::int64_t PaddedSize(Variant v, std::int64_t n, std::int64_t lambda) {
  if (n < 1) throw ParameterError("n must be >= 1");
  switch (v) {
    case Variant::kBase:
    case Variant::kSusdp:
      return n;
    case Variant::kBsdp: {
      auto root = static_cast<std::int64_t>(
          std::ceil(std::sqrt(static_cast<double>(n))));
      while (root * root < n) ++root;
      while (root > 1 && (root - 1) * (root - 1) >= n) --root;
      return std::max<std::int64_t>(root, 2) * std::max<std::int64_t>(root, 2);
    }
    case Variant::kHsdp:
      return static_cast<std::int64_t>(
          std::bit_ceil(static_cast<std::uint64_t>(n)));
    case Variant::kOhsdp: {
      std::int64_t size = lambda;
      while (size < n) size *= 2;
      return size;
    }
  }
  return n;
}

// Everything fixed before the first trial: the effective query (with a pad
// bin for histograms when padding is needed), the base protocol and plan.
struct Setup {
  Query query = Query::Count();
  BaseProtocol base = BaseProtocol::For(Query::Count(), 1);
  TreePlan plan;
  PrivacyBudget budget;
  std::int64_t n_real = 0;
  std::int64_t n_eff = 0;
  std::int64_t pad_value = 0;
  bool pad_bin = false;
};

inline TreePlan MakePlan(Variant v, const BaseProtocol& base, std::int64_t n,
                         const PrivacyBudget& budget, std::int64_t lambda,
                         std::int64_t k_hat) {
  switch (v) {
    case Variant::kBase:
      return PlanBase(base, n, budget);
    case Variant::kSusdp:
      return PlanSusdp(base, n, budget);
    case Variant::kBsdp:
      return PlanBsdp(base, n, budget);
    case Variant::kHsdp:
      return PlanHsdp(base, n, budget);
    case Variant::kOhsdp:
      return PlanOhsdp(base, n, budget, lambda, k_hat);
  }
  throw ParameterError("unknown protocol variant");
}

inline Setup Resolve(const ExperimentConfig& c, std::int64_t n_real) {
  if (n_real < 1) throw ParameterError("dataset must hold at least one user");
  if (c.k < 0 || c.k > n_real)
    throw ParameterError("k must lie in [0, n]");
  if (c.protocol == Variant::kOhsdp && c.k > c.KHat())
    throw ParameterError("k = " + std::to_string(c.k) + " exceeds k_hat = " +
                         std::to_string(c.KHat()));
  Setup s;
  s.budget = {c.Epsilon(), c.Delta(), c.beta};
  s.budget.Validate();
  s.n_real = n_real;
  std::int64_t lambda = 1;
  if (c.protocol == Variant::kOhsdp)
    lambda = c.lambda.value_or(AutoLambda(n_real, s.budget.delta, c.KHat()));
  s.n_eff = PaddedSize(c.protocol, n_real, lambda);
  const std::int64_t domain = c.Domain();
  const bool padded = s.n_eff > n_real;
  s.pad_bin = padded && (c.query == QueryKind::kHistogram ||
                         c.query == QueryKind::kRangeTree);
  s.query = Query::Of(c.query, s.pad_bin ? domain + 1 : domain);
  s.pad_value = s.pad_bin ? domain + 1 : 0;
  s.base = BaseProtocol::For(s.query, s.n_eff);
  if (c.base.has_value() && *c.base != s.base.kind())
    throw ParameterError("base protocol " + ToString(*c.base) +
                         " cannot answer a " + ToString(c.query) + " query");
  s.plan = MakePlan(c.protocol, s.base, s.n_eff, s.budget, lambda, c.KHat());
  return s;
}

// The experiment's dataset: generated from (seed, distribution) or loaded
// from a CSV column, then padded with neutral users.
struct PreparedData {
  Setup setup;
  Dataset data;
  QueryValue truth;
  std::vector<std::string> warnings;
};

inline PreparedData Prepare(const ExperimentConfig& c) {
  PreparedData p;
  const std::int64_t domain = c.Domain();
  if (!c.data_path.empty()) {
    CsvLoadResult loaded =
        LoadCsv(c.data_path, c.data_column, c.cap.value_or(domain));
    p.data = std::move(loaded.data);
    p.warnings = std::move(loaded.warnings);
    for (std::int64_t& x : p.data.values) x = std::min(x, domain);
  } else {
    p.data = GenDataset(c.dist, c.n, domain,
                        DeriveSeed(c.seed, {kDatasetStream}));
  }
  const auto n_real = static_cast<std::int64_t>(p.data.n());
  p.setup = Resolve(c, n_real);
  p.data.values.resize(static_cast<std::size_t>(p.setup.n_eff),
                       p.setup.pad_value);
  p.truth = EvalQuery(p.setup.query, p.data);
  return p;
}

struct TrialResult {
  double abs_error = 0;
  double rel_error_pct = 0;
  double msgs_per_user = 0;
  int bits_per_msg = 0;
  bool detected = false;
  std::int64_t flagged_nodes = 0;
  double wall_time_s = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

namespace internal {

inline AttackStrategy MakeStrategy(const ExperimentConfig& c, const Setup& s,
                                   std::int64_t user, std::int64_t x) {
  const std::int64_t msgs = c.attack_msgs.value_or(s.n_real);
  const std::int64_t domain = c.Domain();
  switch (c.attack) {
    case AttackKind::kFlood:
      switch (s.query.kind()) {
        case QueryKind::kCount:
          return FloodCount{msgs, +1};
        case QueryKind::kSum:
          return FloodSum{msgs, domain};
        case QueryKind::kHistogram:
        case QueryKind::kRangeTree: {
          const auto bins = static_cast<std::int64_t>(s.query.value_size());
          return FloodHist{c.attack_msgs.value_or(
              std::max<std::int64_t>(1, s.n_real / bins))};
        }
      }
      break;
    case AttackKind::kDrop:
      return DropNoise{};
    case AttackKind::kAlter:
      return AlterInput{domain - x};
    case AttackKind::kImpersonate: {
      const LevelPlan& bottom = s.plan.level(1);
      const std::int64_t own = s.plan.GroupOf(user, 1);
      return Impersonate{{1, own % bottom.num_groups + 1}, msgs};
    }
    case AttackKind::kNone:
      break;
  }
  throw ParameterError("no strategy for attack " + ToString(c.attack));
}

// Rethrows the active exception with the trial index prefixed, keeping its
// category.
[[noreturn]] inline void RethrowForTrial(int trial) {
  const std::string prefix = "trial " + std::to_string(trial) + ": ";
  try {
    throw;
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(prefix + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(prefix + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError(prefix + e.what());
  } catch (const StructuralError& e) {
    throw StructuralError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

inline TrialResult RunTrialUnchecked(const ExperimentConfig& c,
                                     const PreparedData& p, int trial) {
  const auto start = std::chrono::steady_clock::now();
  const Setup& s = p.setup;
  const std::uint64_t trial_seed =
      DeriveSeed(c.seed, {kTrialStream, static_cast<std::uint64_t>(trial)});

  Rng token_rng(DeriveSeed(trial_seed, {kTokenStream}));
  const TokenTable tokens = Provision(s.plan, token_rng);
  CorruptionSet corrupt;
  if (c.k > 0) {
    Rng corrupt_rng(DeriveSeed(trial_seed, {kCorruptionStream}));
    corrupt = CorruptUsers(s.n_real, c.k, corrupt_rng);
  }
  const bool attacking = c.attack != AttackKind::kNone;

  ShuffleNetwork network(s.plan, tokens);
  std::int64_t honest_envelopes = 0;
  for (std::int64_t user = 1; user <= s.n_eff; ++user) {
    const std::int64_t x = p.data.values[static_cast<std::size_t>(user - 1)];
    const auto u = static_cast<std::uint64_t>(user);
    if (attacking && corrupt.contains(user)) {
      Rng rng(DeriveSeed(trial_seed, {kAttackerStream, u}));
      const auto known = tokens.AuthorizedFor(s.plan, user);
      const auto envelopes = MaliciousEnvelopes(MakeStrategy(c, s, user, x),
                                                user, x, s.plan, s.base, known,
                                                rng);
      for (const Envelope& e : envelopes) {
        if (!network.Submit(e)) continue;
        const bool authorized =
            std::any_of(known.begin(), known.end(), [&](const auto& t) {
              return t.id == e.token && t.level == e.dest.level &&
                     t.group == e.dest.group;
            });
        if (!authorized)
          throw StructuralError("attacker " + std::to_string(user) +
                                " reached a shuffler it holds no token for");
      }
    } else {
      Rng rng(DeriveSeed(trial_seed, {kUserStream, u}));
      const auto envelopes = RandomizeUser(user, x, s.plan, s.base, tokens, rng);
      honest_envelopes += static_cast<std::int64_t>(envelopes.size());
      for (const Envelope& e : envelopes) network.Submit(e);
    }
  }

  const AnalysisResult analysis =
      Analyze(s.plan, s.base, network.ShuffleAll(trial_seed));

  QueryValue diff = analysis.output - p.truth;
  if (s.pad_bin && s.query.kind() == QueryKind::kHistogram)
    diff[diff.size() - 1] = 0;
  TrialResult r;
  r.abs_error = s.query.Norm(diff);
  double normalizer = static_cast<double>(s.n_real);
  if (s.query.kind() == QueryKind::kCount || s.query.kind() == QueryKind::kSum)
    normalizer = std::abs(static_cast<double>(p.truth.scalar()));
  r.rel_error_pct = 100.0 * r.abs_error / std::max(1.0, normalizer);
  r.msgs_per_user =
      static_cast<double>(honest_envelopes) / static_cast<double>(s.n_eff);
  r.bits_per_msg =
      s.base.BitsPerMessage() +
      CeilLog2(static_cast<std::uint64_t>(s.plan.num_shufflers()));
  r.detected = analysis.report.attack_detected;
  r.flagged_nodes = static_cast<std::int64_t>(analysis.report.flagged.size());
  r.wall_time_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return r;
}

}  // namespace internal

// One end-to-end run: provision, randomize, shuffle, analyze, score.
// Deterministic in (config.seed, trial) apart from wall_time_s.
inline TrialResult RunTrial(const ExperimentConfig& c, const PreparedData& p,
                            int trial) {
  try {
    return internal::RunTrialUnchecked(c, p, trial);
  } catch (...) {
    internal::RethrowForTrial(trial);
  }
}

// Mean after dropping floor(0.1 T) values from each tail.
inline double TrimmedMean(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t cut = values.size() / 10;
  double sum = 0;
  for (std::size_t i = cut; i < values.size() - cut; ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - 2 * cut);
}

// One output row: the resolved configuration echo plus aggregated metrics.
struct Summary {
  std::string query;
  std::int64_t u = 0;
  std::string protocol;
  std::string base;
  std::int64_t n = 0;
  std::int64_t n_eff = 0;
  double eps = 0;
  double delta = 0;
  double beta = 0;
  std::int64_t lambda = 0;
  std::int64_t k = 0;
  std::int64_t k_hat = 0;
  std::string attack;
  std::int64_t attack_msgs = 0;
  std::string dist;
  std::string data;
  std::string col;
  std::optional<std::int64_t> cap;
  int trials = 0;
  std::uint64_t seed = 0;
  double abs_error = 0;
  double rel_error_pct = 0;
  double msgs_per_user = 0;
  double bits_per_msg = 0;
  double detection_rate = 0;
  double mean_wall_time_s = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

inline Summary Summarize(const ExperimentConfig& c, const Setup& s,
                         const std::vector<TrialResult>& trials) {
  Summary out;
  out.query = ToString(c.query);
  out.u = c.Domain();
  out.protocol = ToString(c.protocol);
  out.base = ToString(s.base.kind());
  out.n = s.n_real;
  out.n_eff = s.n_eff;
  out.eps = s.budget.epsilon;
  out.delta = s.budget.delta;
  out.beta = s.budget.beta;
  out.lambda = s.plan.level(1).group_size;
  out.k = c.k;
  out.k_hat = c.KHat();
  out.attack = ToString(c.attack);
  out.attack_msgs = c.attack == AttackKind::kNone
                        ? 0
                        : c.attack_msgs.value_or(s.n_real);
  out.dist = c.data_path.empty() ? ToString(c.dist) : "file";
  out.data = c.data_path;
  out.col = c.data_path.empty() ? "" : c.data_column;
  out.cap = c.cap;
  out.trials = static_cast<int>(trials.size());
  out.seed = c.seed;
  std::vector<double> abs, rel, msgs, bits;
  double wall = 0;
  std::int64_t detected = 0;
  for (const TrialResult& t : trials) {
    abs.push_back(t.abs_error);
    rel.push_back(t.rel_error_pct);
    msgs.push_back(t.msgs_per_user);
    bits.push_back(t.bits_per_msg);
    wall += t.wall_time_s;
    detected += t.detected ? 1 : 0;
  }
  out.abs_error = TrimmedMean(abs);
  out.rel_error_pct = TrimmedMean(rel);
  out.msgs_per_user = TrimmedMean(msgs);
  out.bits_per_msg = TrimmedMean(bits);
  if (!trials.empty()) {
    out.detection_rate =
        static_cast<double>(detected) / static_cast<double>(trials.size());
    out.mean_wall_time_s = wall / static_cast<double>(trials.size());
  }
  return out;
}

// Runs all trials of a prepared experiment on a worker pool. Results are
// stored by trial index, so the output does not depend on scheduling.
inline std::vector<TrialResult> RunTrials(const ExperimentConfig& c,
                                          const PreparedData& p) {
  if (c.trials < 1) throw ParameterError("trials must be >= 1");
  std::vector<TrialResult> results(static_cast<std::size_t>(c.trials));
  std::vector<std::exception_ptr> errors(results.size());
  int workers = c.workers > 0
                    ? c.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, c.trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < c.trials; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = RunTrial(c, p, t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline Summary RunExperiment(const ExperimentConfig& c) {
  const PreparedData p = Prepare(c);
  return Summarize(c, p.setup, RunTrials(c, p));
}

enum class SweepAxis { kLambda, kK, kEpsilon, kN };

inline std::string ToString(SweepAxis a) {
  switch (a) {
    case SweepAxis::kLambda:
      return "lambda";
    case SweepAxis::kK:
      return "k";
    case SweepAxis::kEpsilon:
      return "eps";
    case SweepAxis::kN:
      return "n";
  }
  return "?";
}

inline SweepAxis ParseSweepAxis(const std::string& s) {
  static const SweepAxis kAll[] = {SweepAxis::kLambda, SweepAxis::kK,
                                   SweepAxis::kEpsilon, SweepAxis::kN};
  return internal::ParseEnum(s, kAll, "sweep axis");
}

namespace internal {

inline std::int64_t ParseInt(const std::string& s, const char* what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ParameterError("bad " + std::string(what) + " '" + s + "'");
  return v;
}

}  // namespace internal

// Copy of `base` with one axis set to `value` ("auto" is accepted for lambda).
inline ExperimentConfig WithAxis(ExperimentConfig c, SweepAxis axis,
                                 const std::string& value) {
  switch (axis) {
    case SweepAxis::kLambda:
      if (value == "auto")
        c.lambda.reset();
      else
        c.lambda = internal::ParseInt(value, "lambda");
      break;
    case SweepAxis::kK:
      c.k = internal::ParseInt(value, "k");
      break;
    case SweepAxis::kEpsilon:
      c.epsilon = ParseEpsilon(value);
      break;
    case SweepAxis::kN:
      c.n = internal::ParseInt(value, "n");
      break;
  }
  return c;
}

// One summary per axis value; each point is planned from scratch.
inline std::vector<Summary> Sweep(const ExperimentConfig& c, SweepAxis axis,
                                  const std::vector<std::string>& values) {
  std::vector<Summary> rows;
  rows.reserve(values.size());
  for (const std::string& v : values)
    rows.push_back(RunExperiment(WithAxis(c, axis, v)));
  return rows;
}

namespace internal {

inline std::string FormatReal(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline nlohmann::json RealToJson(double v) {
  if (std::isfinite(v)) return v;
  return FormatReal(v);
}

inline double RealFromJson(const nlohmann::json& j) {
  if (j.is_string()) return ParseEpsilon(j.get<std::string>());
  return j.get<double>();
}

}  // namespace internal

inline const std::vector<std::string>& CsvColumns() {
  static const std::vector<std::string> kColumns = {
      "query",     "u",           "protocol",      "base",
      "n",         "n_eff",       "eps",           "delta",
      "beta",      "lambda",      "k",             "k_hat",
      "attack",    "attack_msgs", "dist",          "data",
      "col",       "cap",         "trials",        "seed",
      "abs_error", "rel_error_pct", "msgs_per_user", "bits_per_msg",
      "detection_rate", "mean_wall_time_s"};
  return kColumns;
}

inline void WriteCsv(std::ostream& out, const std::vector<Summary>& rows) {
  const auto& cols = CsvColumns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << "\n";
  using internal::CsvField;
  using internal::FormatReal;
  for (const Summary& s : rows) {
    const std::vector<std::string> cells = {
        CsvField(s.query),
        std::to_string(s.u),
        CsvField(s.protocol),
        CsvField(s.base),
        std::to_string(s.n),
        std::to_string(s.n_eff),
        FormatReal(s.eps),
        FormatReal(s.delta),
        FormatReal(s.beta),
        std::to_string(s.lambda),
        std::to_string(s.k),
        std::to_string(s.k_hat),
        CsvField(s.attack),
        std::to_string(s.attack_msgs),
        CsvField(s.dist),
        CsvField(s.data),
        CsvField(s.col),
        s.cap.has_value() ? std::to_string(*s.cap) : "",
        std::to_string(s.trials),
        std::to_string(s.seed),
        FormatReal(s.abs_error),
        FormatReal(s.rel_error_pct),
        FormatReal(s.msgs_per_user),
        FormatReal(s.bits_per_msg),
        FormatReal(s.detection_rate),
        FormatReal(s.mean_wall_time_s)};
    for (std::size_t i = 0; i < cells.size(); ++i)
      out << (i ? "," : "") << cells[i];
    out << "\n";
  }
}

inline void to_json(nlohmann::json& j, const Summary& s) {
  using internal::RealToJson;
  j = nlohmann::json{{"query", s.query},
                     {"u", s.u},
                     {"protocol", s.protocol},
                     {"base", s.base},
                     {"n", s.n},
                     {"n_eff", s.n_eff},
                     {"eps", RealToJson(s.eps)},
                     {"delta", RealToJson(s.delta)},
                     {"beta", RealToJson(s.beta)},
                     {"lambda", s.lambda},
                     {"k", s.k},
                     {"k_hat", s.k_hat},
                     {"attack", s.attack},
                     {"attack_msgs", s.attack_msgs},
                     {"dist", s.dist},
                     {"data", s.data},
                     {"col", s.col},
                     {"cap", nullptr},
                     {"trials", s.trials},
                     {"seed", s.seed},
                     {"abs_error", RealToJson(s.abs_error)},
                     {"rel_error_pct", RealToJson(s.rel_error_pct)},
                     {"msgs_per_user", RealToJson(s.msgs_per_user)},
                     {"bits_per_msg", RealToJson(s.bits_per_msg)},
                     {"detection_rate", RealToJson(s.detection_rate)},
                     {"mean_wall_time_s", RealToJson(s.mean_wall_time_s)}};
  if (s.cap.has_value()) j["cap"] = *s.cap;
}

inline void from_json(const nlohmann::json& j, Summary& s) {
  using internal::RealFromJson;
  j.at("query").get_to(s.query);
  j.at("u").get_to(s.u);
  j.at("protocol").get_to(s.protocol);
  j.at("base").get_to(s.base);
  j.at("n").get_to(s.n);
  j.at("n_eff").get_to(s.n_eff);
  s.eps = RealFromJson(j.at("eps"));
  s.delta = RealFromJson(j.at("delta"));
  s.beta = RealFromJson(j.at("beta"));
  j.at("lambda").get_to(s.lambda);
  j.at("k").get_to(s.k);
  j.at("k_hat").get_to(s.k_hat);
  j.at("attack").get_to(s.attack);
  j.at("attack_msgs").get_to(s.attack_msgs);
  j.at("dist").get_to(s.dist);
  j.at("data").get_to(s.data);
  j.at("col").get_to(s.col);
  if (j.at("cap").is_null())
    s.cap.reset();
  else
    s.cap = j.at("cap").get<std::int64_t>();
  j.at("trials").get_to(s.trials);
  j.at("seed").get_to(s.seed);
  s.abs_error = RealFromJson(j.at("abs_error"));
  s.rel_error_pct = RealFromJson(j.at("rel_error_pct"));
  s.msgs_per_user = RealFromJson(j.at("msgs_per_user"));
  s.bits_per_msg = RealFromJson(j.at("bits_per_msg"));
  s.detection_rate = RealFromJson(j.at("detection_rate"));
  s.mean_wall_time_s = RealFromJson(j.at("mean_wall_time_s"));
}

inline void WriteJson(std::ostream& out, const std::vector<Summary>& rows) {
  out << nlohmann::json(rows).dump(2) << "\n";
}

// Writes to `path`, or to stdout when it is empty.
inline void Emit(const std::vector<Summary>& rows, const std::string& format,
                 const std::string& path) {
  if (format != "csv" && format != "json")
    throw ParameterError("unknown format '" + format + "' (expected csv|json)");
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw IoError("cannot write output file '" + path + "'");
  }
  std::ostream& out = path.empty() ? std::cout : file;
  if (format == "csv")
    WriteCsv(out, rows);
  else
    WriteJson(out, rows);
  out.flush();
  if (!out) throw IoError("failed writing output file '" + path + "'");
}

// Config files mirror the CLI flag names. Absent keys keep their defaults.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto str = [&](const char* key) { return j.at(key).get<std::string>(); };
  if (j.contains("query")) c.query = ParseQueryKind(str("query"));
  if (j.contains("u")) j.at("u").get_to(c.domain);
  if (j.contains("protocol")) c.protocol = ParseVariant(str("protocol"));
  if (j.contains("base")) c.base = ParseBaseKind(str("base"));
  if (j.contains("n")) j.at("n").get_to(c.n);
  if (j.contains("eps")) c.epsilon = internal::RealFromJson(j.at("eps"));
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  if (j.contains("beta")) j.at("beta").get_to(c.beta);
  if (j.contains("lambda")) {
    const auto& v = j.at("lambda");
    if (v.is_string() && v.get<std::string>() == "auto")
      c.lambda.reset();
    else
      c.lambda = v.get<std::int64_t>();
  }
  if (j.contains("k")) j.at("k").get_to(c.k);
  if (j.contains("khat")) c.k_hat = j.at("khat").get<std::int64_t>();
  if (j.contains("attack")) c.attack = ParseAttackKind(str("attack"));
  if (j.contains("attack_msgs"))
    c.attack_msgs = j.at("attack_msgs").get<std::int64_t>();
  if (j.contains("dist")) c.dist = ParseDistKind(str("dist"));
  if (j.contains("data")) c.data_path = str("data");
  if (j.contains("col")) {
    const auto& v = j.at("col");
    c.data_column = v.is_string() ? v.get<std::string>()
                                  : std::to_string(v.get<std::int64_t>());
  }
  if (j.contains("cap")) c.cap = j.at("cap").get<std::int64_t>();
  if (j.contains("trials")) j.at("trials").get_to(c.trials);
  if (j.contains("seed")) j.at("seed").get_to(c.seed);
  if (j.contains("out")) c.out = str("out");
  if (j.contains("format")) c.format = str("format");
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_HARNESS_HPP_
