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

#include "sftmix/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {

bool IsCoreBenchmark(std::string_view name) {
  return std::find(kCoreBenchmarks.begin(), kCoreBenchmarks.end(), name) !=
         kCoreBenchmarks.end();
}

bool ScoreVector::Has(std::string_view benchmark) const {
  return raw.find(benchmark) != raw.end();
}

double ScoreVector::Raw(std::string_view benchmark) const {
  auto it = raw.find(benchmark);
  if (it == raw.end()) {
    throw MissingBenchmarkError("score vector has no \"" +
                                std::string(benchmark) + "\" entry");
  }
  return it->second;
}

bool ScoreVector::HasCore() const {
  return std::all_of(kCoreBenchmarks.begin(), kCoreBenchmarks.end(),
                     [&](std::string_view b) { return Has(b); });
}

void ComparisonPolicy::Validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be a finite non-negative number");
  }
  if (!(mme_denominator > 0.0) || !std::isfinite(mme_denominator)) {
    throw ValidationError("MME denominator must be positive");
  }
}

double Normalize(std::string_view benchmark, double raw,
                 const ComparisonPolicy& policy) {
  const bool is_mme = benchmark == benchmarks::kMme;
  const double upper = is_mme ? policy.mme_denominator : 100.0;
  if (!(raw >= 0.0) || raw > upper) {
    throw RangeError(std::string(benchmark) + " raw score " +
                     internal::ShortestDouble(raw) + " outside [0, " +
                     internal::ShortestDouble(upper) + "]");
  }
  return is_mme ? raw / policy.mme_denominator * 100.0 : raw;
}

double Average(const ScoreVector& scores, const ComparisonPolicy& policy) {
  double sum = 0.0;
  for (std::string_view benchmark : kCoreBenchmarks) {
    sum += Normalize(benchmark, scores.Raw(benchmark), policy);
  }
  return sum / static_cast<double>(kCoreBenchmarks.size());
}

std::string_view VerdictName(Verdict verdict) {
  return verdict == Verdict::kAccept ? "accept" : "reject";
}

Comparison Compare(const ScoreVector& candidate, const ScoreVector& baseline,
                   const ComparisonPolicy& policy) {
  const double candidate_avg = Average(candidate, policy);
  const double baseline_avg = Average(baseline, policy);
  Comparison result;
  result.margin = candidate_avg - baseline_avg;
  result.verdict = candidate_avg >= baseline_avg - policy.epsilon
                       ? Verdict::kAccept
                       : Verdict::kReject;
  return result;
}

ScoreVector ParseScores(std::string_view text) {
  ScoreVector scores;
  const auto lines = internal::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    const std::string where = "score line " + std::to_string(i + 1);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    if (obj.contains("fingerprint") && obj.size() == 1) {
      if (!obj["fingerprint"].is_string()) {
        throw ParseError(where + ": fingerprint must be a string");
      }
      scores.provenance = obj["fingerprint"].get<std::string>();
      continue;
    }
    if (!obj.contains("benchmark") || !obj["benchmark"].is_string() ||
        !obj.contains("raw") || !obj["raw"].is_number()) {
      throw ParseError(where + ": expected {\"benchmark\": str, \"raw\": num}");
    }
    const auto name = obj["benchmark"].get<std::string>();
    if (!scores.raw.emplace(name, obj["raw"].get<double>()).second) {
      throw ParseError(where + ": duplicate benchmark \"" + name + "\"");
    }
  }
  return scores;
}

ScoreVector LoadScores(const std::filesystem::path& path) {
  return ParseScores(internal::ReadFile(path));
}

std::string SerializeScores(const ScoreVector& scores) {
  std::string out;
  if (!scores.provenance.empty()) {
    out += nlohmann::json{{"fingerprint", scores.provenance}}.dump();
    out += '\n';
  }
  for (const auto& [benchmark, raw] : scores.raw) {
    out += nlohmann::json{{"benchmark", benchmark}, {"raw", raw}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sftmix
