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

// Shared fixtures and independent reference implementations for the test
// suites. Nothing here calls into the code paths it is used to check.

#ifndef SFTMIX_TESTS_SUPPORT_H_
#define SFTMIX_TESTS_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sftmix/corpus.h"
#include "sftmix/evaluator.h"
#include "sftmix/metrics.h"
#include "sftmix/registry.h"

namespace sftmix::testing {

// Self-deleting scratch directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void WriteFile(const std::filesystem::path& path, const std::string& text);
std::string ReadFile(const std::filesystem::path& path);

// A conversation of `turns` alternating turns (human first) whose texts are
// `words_per_turn` space-separated words.
SampleRecord MakeSample(const std::string& id, int turns,
                        int words_per_turn = 3, int images = 0);

// One sample-format line: {"id", "image", "conversations"}.
std::string SampleJsonLine(const std::string& id,
                           const std::vector<std::string>& roles,
                           int images = 0);

ScoreVector Scores(double mme, double mmbench, double sqa, double seed);

// Reference baseline scores and the selected-vs-all rows used across suites.
ScoreVector ReferenceBaselineRow();
ScoreVector SelectedMixtureRow();
ScoreVector AllDataRow();

// A randomized selection instance with an additive oracle. Every value sits
// on a dyadic grid so sums are exact in any order.
struct RandomInstance {
  Registry registry;
  std::vector<Category> order;
  Composition baseline;
  ComparisonPolicy policy;
  EvaluatorSpec spec;
};

RandomInstance MakeRandomInstance(std::mt19937_64& rng, int min_categories,
                                  int max_categories, int min_candidates,
                                  int max_candidates);

// Literal per-category greedy loop: freeze the baseline, try each candidate
// alone against it, keep those within epsilon, append the kept ones in
// registry order. Uses its own scoring arithmetic.
std::vector<std::string> ReferenceIndividualSelect(
    const std::vector<std::string>& baseline_ids,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        rounds,
    const std::map<std::string, double>& base_raw,
    const std::map<std::string, std::map<std::string, double>>& deltas,
    double epsilon, double mme_denominator);

// Convenience wrapper that reads the instance's registry and oracle.
std::vector<std::string> ReferenceSelect(const RandomInstance& instance);

// Sequential greedy replay over plain lengths: returns the group sizes.
std::vector<std::size_t> ReferencePackGroups(
    const std::vector<std::uint64_t>& lengths, std::uint64_t max_len);

// Big-endian first 8 bytes of SHA-256("<seed>:<id>"), via OpenSSL directly.
std::uint64_t ReferencePriority(std::uint64_t seed, const std::string& id);

// First 8 bytes of SHA-256(id) plus seed times the 64-bit golden-ratio
// constant, wrapping.
std::uint64_t ReferenceSubsetKey(std::uint64_t seed, const std::string& id);

}  // namespace sftmix::testing

#endif  // SFTMIX_TESTS_SUPPORT_H_
