// Copyright 2026 The sftmix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SFTMIX_EVALUATOR_H_
#define SFTMIX_EVALUATOR_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sftmix/corpus.h"
#include "sftmix/metrics.h"
#include "sftmix/registry.h"

namespace sftmix {

// Maps a composition to benchmark scores. Implementations must be safe to
// call concurrently.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual ScoreVector Evaluate(const Composition& composition) const = 0;
  virtual std::string Fingerprint() const = 0;
};

using BenchmarkDeltas = std::map<std::string, double, std::less<>>;

struct InteractionTerm {
  std::string first;
  std::string second;
  BenchmarkDeltas delta;
};

// Synthetic evaluator:
//   raw(b) = base(b) + sum over entries of delta(dataset, b)
//            + sum over interaction pairs present of delta(pair, b).
struct OracleSpec {
  ScoreVector base_scores;
  std::map<std::string, BenchmarkDeltas, std::less<>> deltas;
  std::vector<InteractionTerm> interactions;
  // Datasets without a delta row contribute zero instead of raising
  // UnknownDatasetError.
  bool default_zero = false;
};

// File contract: writes the composition manifest, runs
//   <command> --composition <manifest> --out <scores>
// (or substitutes {composition} / {out} when the template names them), and
// reads the score file the command leaves behind.
struct ExternalSpec {
  std::string command_template;
  std::chrono::milliseconds timeout{std::chrono::hours(48)};
  int retries = 0;
  std::filesystem::path work_dir;
};

enum class EvaluatorKind { kOracle, kExternal };

struct EvaluatorSpec {
  EvaluatorKind kind = EvaluatorKind::kOracle;
  OracleSpec oracle;
  ExternalSpec external;

  // Stable digest of the canonical JSON form.
  std::string Fingerprint() const;
  std::string ToJson() const;
  static EvaluatorSpec FromJson(std::string_view text);  // throws ParseError

  // For oracles, checks that every subset of the delta rows keeps each core
  // score inside its admissible range, so normalized scores stay in
  // [0, 100]. For external specs, checks that a command is set. Throws
  // ValidationError.
  void Validate(const ComparisonPolicy& policy = {}) const;
};

std::string Fingerprint(const EvaluatorSpec& spec);
EvaluatorSpec LoadEvaluatorSpec(const std::filesystem::path& path);
void SaveEvaluatorSpec(const EvaluatorSpec& spec,
                       const std::filesystem::path& path);

// Applies the oracle formula directly.
ScoreVector EvaluateOracle(const OracleSpec& oracle,
                           const Composition& composition);

class OracleEvaluator : public Evaluator {
 public:
  explicit OracleEvaluator(EvaluatorSpec spec);
  ScoreVector Evaluate(const Composition& composition) const override;
  std::string Fingerprint() const override { return fingerprint_; }

 private:
  EvaluatorSpec spec_;
  std::string fingerprint_;
};

class ExternalEvaluator : public Evaluator {
 public:
  explicit ExternalEvaluator(EvaluatorSpec spec);
  // Throws CommandFailed on non-zero exit or timeout (after retries) and
  // ScoreParseError when the score file is missing, stale or malformed.
  ScoreVector Evaluate(const Composition& composition) const override;
  std::string Fingerprint() const override { return fingerprint_; }

 private:
  EvaluatorSpec spec_;
  std::string fingerprint_;
};

std::unique_ptr<Evaluator> MakeEvaluator(const EvaluatorSpec& spec);

}  // namespace sftmix

#endif  // SFTMIX_EVALUATOR_H_
