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

#ifndef SFTMIX_SELECTION_H_
#define SFTMIX_SELECTION_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sftmix/corpus.h"
#include "sftmix/evaluator.h"
#include "sftmix/ledger.h"
#include "sftmix/metrics.h"
#include "sftmix/registry.h"

namespace sftmix {

struct RoundRecord {
  std::string category;
  std::vector<std::string> accepted;
  std::string baseline_before_hash;
  std::string baseline_after_hash;
  std::size_t baseline_after_size = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// State of the per-category greedy selection.
//
// Each round freezes the baseline, scores it once (cached by content hash),
// scores baseline + C for every candidate C of the round's category, pools
// the candidates that compare as Accept, and appends the whole pool to the
// baseline in registry order before moving on to the next category.
struct SelectionState {
  std::string run_id;
  ComparisonPolicy policy;
  Registry registry;
  std::vector<Category> order;
  std::string evaluator_fingerprint;

  Composition baseline;
  std::vector<Category> category_queue;  // front is the next/current round
  std::optional<Category> current_category;  // set while a round is open
  std::vector<std::string> pool;
  std::vector<DecisionRecord> decisions;
  std::map<std::string, ScoreVector, std::less<>> baseline_scores;
  std::vector<RoundRecord> rounds;
  std::optional<ScoreVector> final_score;

  bool queue_empty() const { return category_queue.empty(); }
  bool finished() const { return queue_empty() && final_score.has_value(); }

  // Candidates of the open round that already have a decision.
  std::vector<std::string> DecidedInCurrentRound() const;
  std::vector<std::string> PendingInCurrentRound() const;

  friend bool operator==(const SelectionState&,
                         const SelectionState&) = default;
};

struct StepOptions {
  // Sink for run records; nullptr keeps the run in memory only.
  LedgerWriter* ledger = nullptr;
  // Candidate evaluations of one round run on up to this many threads.
  std::size_t max_parallel = 1;
};

// Validates `order` (categories of the registry taxonomy, no repeats) and
// that no candidate is already part of the baseline. The caller persists
// the run header via LedgerWriter::Create(path, MakeRunHeader(state)).
// Throws ValidationError.
SelectionState InitRun(Composition baseline, Registry registry,
                       std::span<const Category> order,
                       const ComparisonPolicy& policy,
                       std::string evaluator_fingerprint, std::string run_id);

RunHeader MakeRunHeader(const SelectionState& state);

// Runs (or finishes) the round at the front of the queue. Candidates that
// already have a decision in this round are not re-evaluated. On evaluator
// failure the error is rethrown as EvaluatorError naming the candidate; the
// state keeps every decision made so far and the round stays open.
// Throws ValidationError if the queue is empty or the evaluator fingerprint
// differs from the run's.
void StepCategory(SelectionState& state, const Evaluator& evaluator,
                  const StepOptions& options = {});

struct SelectionSummary {
  Composition final_composition;
  std::size_t accepted_count = 0;
  std::size_t categories_with_acceptance = 0;
  std::vector<std::pair<std::string, std::vector<std::string>>> per_category;
};

SelectionSummary Summarize(const SelectionState& state);

// Steps until the queue is empty, then scores the final composition.
SelectionSummary RunIndividualSelect(SelectionState& state,
                                     const Evaluator& evaluator,
                                     const StepOptions& options = {});

// Rebuilds the state a ledger describes. Throws LedgerCorruptError when the
// chain is broken or the records contradict the replayed state.
SelectionState ReplayLedger(const LedgerContents& contents);
SelectionState Resume(const std::filesystem::path& ledger_path);

// "accepted 17 datasets across 9 categories"
std::string SummaryLine(const SelectionSummary& summary);

}  // namespace sftmix

#endif  // SFTMIX_SELECTION_H_
