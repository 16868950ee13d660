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

#ifndef SFTMIX_METRICS_H_
#define SFTMIX_METRICS_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace sftmix {

// Benchmarks are open-ended names; these four drive selection.
namespace benchmarks {
inline constexpr std::string_view kMme = "MME";
inline constexpr std::string_view kMmbenchDev = "MMBench-dev";
inline constexpr std::string_view kScienceQaImage = "ScienceQA-I";
inline constexpr std::string_view kSeedImage = "SEED-I";
}  // namespace benchmarks

inline constexpr std::array<std::string_view, 4> kCoreBenchmarks = {
    benchmarks::kMme, benchmarks::kMmbenchDev, benchmarks::kScienceQaImage,
    benchmarks::kSeedImage};

bool IsCoreBenchmark(std::string_view name);

struct ScoreVector {
  std::map<std::string, double, std::less<>> raw;
  // Fingerprint of the evaluator that produced the scores.
  std::string provenance;

  bool Has(std::string_view benchmark) const;
  double Raw(std::string_view benchmark) const;  // throws MissingBenchmarkError
  bool HasCore() const;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

enum class ComparisonMode { kAverage };

struct ComparisonPolicy {
  ComparisonMode mode = ComparisonMode::kAverage;
  // Tolerance, in normalized points, under which a candidate still counts
  // as comparable to the baseline.
  double epsilon = 0.5;
  // MME is rescaled as raw / mme_denominator * 100.
  double mme_denominator = 2000.0;

  void Validate() const;  // throws ValidationError

  friend bool operator==(const ComparisonPolicy&,
                         const ComparisonPolicy&) = default;
};

// MME maps onto [0, 100] through the policy denominator; other benchmarks are
// already percentages. Throws RangeError for raw values outside
// [0, denominator] (MME) or [0, 100] (everything else).
double Normalize(std::string_view benchmark, double raw,
                 const ComparisonPolicy& policy = {});

// Mean of the four normalized core scores. Throws MissingBenchmarkError.
double Average(const ScoreVector& scores, const ComparisonPolicy& policy = {});

enum class Verdict { kAccept, kReject };

std::string_view VerdictName(Verdict verdict);

struct Comparison {
  Verdict verdict = Verdict::kReject;
  // average(candidate) - average(baseline)
  double margin = 0.0;
};

// Accept iff average(candidate) >= average(baseline) - epsilon.
Comparison Compare(const ScoreVector& candidate, const ScoreVector& baseline,
                   const ComparisonPolicy& policy = {});

// Score files hold one {"benchmark": ..., "raw": ...} object per line. An
// optional {"fingerprint": ...} line sets the provenance verbatim. Throws
// ParseError.
ScoreVector ParseScores(std::string_view text);
ScoreVector LoadScores(const std::filesystem::path& path);
std::string SerializeScores(const ScoreVector& scores);

}  // namespace sftmix

#endif  // SFTMIX_METRICS_H_
