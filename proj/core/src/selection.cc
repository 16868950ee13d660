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

#include "sftmix/selection.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <set>
#include <string>
#include <utility>

#include "sftmix/error.h"

namespace sftmix {
namespace {

std::vector<std::string> AcceptedInRound(const SelectionState& state,
                                         const Category& category) {
  std::set<std::string, std::less<>> accepted;
  for (const DecisionRecord& d : state.decisions) {
    if (d.category == category.name && d.verdict == Verdict::kAccept) {
      accepted.insert(d.candidate_id);
    }
  }
  // Registry order.
  std::vector<std::string> ordered;
  for (const DatasetDescriptor& c : state.registry.CandidatesIn(category)) {
    if (accepted.contains(c.id)) ordered.push_back(c.id);
  }
  return ordered;
}

bool HasDecision(const SelectionState& state, const Category& category,
                 std::string_view candidate_id) {
  return std::any_of(state.decisions.begin(), state.decisions.end(),
                     [&](const DecisionRecord& d) {
                       return d.category == category.name &&
                              d.candidate_id == candidate_id;
                     });
}

// Concatenates the pool into the baseline and pops the category.
RoundEnd CloseRound(SelectionState& state) {
  const Category category = *state.current_category;
  std::vector<std::string> accepted = AcceptedInRound(state, category);
  RoundRecord round;
  round.category = category.name;
  round.accepted = accepted;
  round.baseline_before_hash = state.baseline.content_hash();
  if (!accepted.empty()) {
    std::vector<Addition> additions;
    for (const std::string& id : accepted) {
      additions.push_back({id, Take::All()});
    }
    state.baseline = Compose(state.run_id + "@" + category.name,
                             &state.baseline, additions, state.registry);
  }
  round.baseline_after_hash = state.baseline.content_hash();
  round.baseline_after_size = state.baseline.size();
  state.rounds.push_back(round);
  state.category_queue.erase(state.category_queue.begin());
  state.current_category.reset();
  state.pool.clear();
  return RoundEnd{category.name, std::move(accepted),
                  round.baseline_after_hash, round.baseline_after_size};
}

ScoreVector EvaluateWithContext(const Evaluator& evaluator,
                                const Composition& composition,
                                const std::string& context) {
  try {
    return evaluator.Evaluate(composition);
  } catch (const std::exception& e) {
    throw EvaluatorError(context + ": " + e.what());
  }
}

const Category& FrontCategory(const SelectionState& state) {
  return state.category_queue.front();
}

}  // namespace

std::vector<std::string> SelectionState::DecidedInCurrentRound() const {
  std::vector<std::string> out;
  if (!current_category) return out;
  for (const DecisionRecord& d : decisions) {
    if (d.category == current_category->name) out.push_back(d.candidate_id);
  }
  return out;
}

std::vector<std::string> SelectionState::PendingInCurrentRound() const {
  std::vector<std::string> out;
  if (category_queue.empty()) return out;
  const Category& category =
      current_category ? *current_category : category_queue.front();
  for (const DatasetDescriptor& c : registry.CandidatesIn(category)) {
    if (!HasDecision(*this, category, c.id)) out.push_back(c.id);
  }
  return out;
}

SelectionState InitRun(Composition baseline, Registry registry,
                       std::span<const Category> order,
                       const ComparisonPolicy& policy,
                       std::string evaluator_fingerprint, std::string run_id) {
  policy.Validate();
  std::set<std::string, std::less<>> seen;
  for (const Category& category : order) {
    auto known = registry.FindCategory(category.name);
    if (!known || *known != category) {
      throw ValidationError("category \"" + category.name +
                            "\" is not part of the registry taxonomy");
    }
    if (!seen.insert(category.name).second) {
      throw ValidationError("category \"" + category.name +
                            "\" appears twice in the order");
    }
    for (const DatasetDescriptor& candidate : registry.CandidatesIn(category)) {
      if (baseline.Contains(candidate.id)) {
        throw ValidationError("candidate \"" + candidate.id +
                              "\" is already part of the baseline");
      }
    }
  }

  SelectionState state;
  state.run_id = std::move(run_id);
  state.policy = policy;
  state.registry = std::move(registry);
  state.order.assign(order.begin(), order.end());
  state.evaluator_fingerprint = std::move(evaluator_fingerprint);
  state.baseline = std::move(baseline);
  state.category_queue = state.order;
  return state;
}

RunHeader MakeRunHeader(const SelectionState& state) {
  RunHeader header;
  header.run_id = state.run_id;
  header.policy = state.policy;
  for (const Category& c : state.order) header.order.push_back(c.name);
  header.baseline = state.baseline;
  header.registry = state.registry;
  header.evaluator_fingerprint = state.evaluator_fingerprint;
  header.created = NowTimestamp();
  return header;
}

void StepCategory(SelectionState& state, const Evaluator& evaluator,
                  const StepOptions& options) {
  if (state.category_queue.empty()) {
    throw ValidationError("no category left to process");
  }
  if (evaluator.Fingerprint() != state.evaluator_fingerprint) {
    throw ValidationError("evaluator fingerprint " + evaluator.Fingerprint() +
                          " does not match the run's " +
                          state.evaluator_fingerprint);
  }
  const Category category = FrontCategory(state);
  const std::string& baseline_hash = state.baseline.content_hash();

  if (!state.current_category) {
    RoundStart start{category.name, baseline_hash, {}, false};
    if (auto it = state.baseline_scores.find(baseline_hash);
        it != state.baseline_scores.end()) {
      start.baseline_score = it->second;
      start.cached = true;
    } else {
      start.baseline_score = EvaluateWithContext(
          evaluator, state.baseline, "baseline for " + category.name);
      state.baseline_scores.emplace(baseline_hash, start.baseline_score);
    }
    state.current_category = category;
    state.pool.clear();
    if (options.ledger) options.ledger->Write(start);
  }
  const ScoreVector baseline_score = state.baseline_scores.at(baseline_hash);

  std::vector<std::string> pending = state.PendingInCurrentRound();
  std::vector<Composition> trials;
  trials.reserve(pending.size());
  for (const std::string& id : pending) {
    const Addition addition{id, Take::All()};
    trials.push_back(Compose(state.run_id + "+" + id, &state.baseline,
                             std::span(&addition, 1), state.registry));
  }

  std::vector<std::optional<ScoreVector>> scores(pending.size());
  std::exception_ptr failure;
  auto evaluate = [&](std::size_t i) {
    return EvaluateWithContext(evaluator, trials[i],
                               "candidate " + pending[i] + " (" +
                                   category.name + ")");
  };
  auto record = [&](std::size_t i) {
    const Comparison cmp = Compare(*scores[i], baseline_score, state.policy);
    DecisionRecord decision{pending[i],
                            category.name,
                            baseline_hash,
                            *scores[i],
                            baseline_score,
                            cmp.verdict,
                            cmp.margin,
                            NowTimestamp(),
                            state.evaluator_fingerprint};
    if (options.ledger) options.ledger->Write(decision);
    state.decisions.push_back(std::move(decision));
    if (cmp.verdict == Verdict::kAccept) state.pool.push_back(pending[i]);
  };

  if (options.max_parallel <= 1) {
    for (std::size_t i = 0; i < pending.size(); ++i) {
      scores[i] = evaluate(i);
      record(i);
    }
  } else {
    // Evaluations run in waves; decisions are still recorded in registry
    // order so the ledger does not depend on scheduling.
    for (std::size_t begin = 0; begin < pending.size() && !failure;
         begin += options.max_parallel) {
      const std::size_t end =
          std::min(pending.size(), begin + options.max_parallel);
      std::vector<std::future<ScoreVector>> wave;
      for (std::size_t i = begin; i < end; ++i) {
        wave.push_back(std::async(std::launch::async, evaluate, i));
      }
      for (std::size_t i = begin; i < end; ++i) {
        try {
          scores[i] = wave[i - begin].get();
        } catch (...) {
          if (!failure) failure = std::current_exception();
        }
      }
      for (std::size_t i = begin; i < end; ++i) {
        if (scores[i]) record(i);
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  const RoundEnd end = CloseRound(state);
  if (options.ledger) options.ledger->Write(end);
}

SelectionSummary Summarize(const SelectionState& state) {
  SelectionSummary summary;
  summary.final_composition = state.baseline;
  for (const RoundRecord& round : state.rounds) {
    summary.accepted_count += round.accepted.size();
    if (!round.accepted.empty()) ++summary.categories_with_acceptance;
    summary.per_category.emplace_back(round.category, round.accepted);
  }
  return summary;
}

SelectionSummary RunIndividualSelect(SelectionState& state,
                                     const Evaluator& evaluator,
                                     const StepOptions& options) {
  while (!state.category_queue.empty()) {
    StepCategory(state, evaluator, options);
  }
  if (!state.final_score) {
    const std::string& hash = state.baseline.content_hash();
    auto it = state.baseline_scores.find(hash);
    ScoreVector score =
        it != state.baseline_scores.end()
            ? it->second
            : EvaluateWithContext(evaluator, state.baseline, "final baseline");
    state.baseline_scores.emplace(hash, score);
    state.final_score = score;
    if (options.ledger) options.ledger->Write(RunFinal{hash, score});
  }
  return Summarize(state);
}

SelectionState ReplayLedger(const LedgerContents& contents) {
  const auto& header = std::get<RunHeader>(contents.entries.front());
  std::vector<Category> order;
  for (const std::string& name : header.order) {
    auto category = header.registry.FindCategory(name);
    if (!category) {
      throw LedgerCorruptError("header names unknown category \"" + name +
                               "\"");
    }
    order.push_back(*category);
  }
  SelectionState state;
  try {
    state = InitRun(header.baseline, header.registry, order, header.policy,
                    header.evaluator_fingerprint, header.run_id);
  } catch (const ValidationError& e) {
    throw LedgerCorruptError(std::string("invalid run header: ") + e.what());
  }

  auto fail = [](std::size_t index, const std::string& what) {
    return LedgerCorruptError("ledger record " + std::to_string(index + 1) +
                              ": " + what);
  };
  for (std::size_t i = 1; i < contents.entries.size(); ++i) {
    const LedgerEntry& entry = contents.entries[i];
    if (const auto* start = std::get_if<RoundStart>(&entry)) {
      if (state.current_category || state.category_queue.empty() ||
          FrontCategory(state).name != start->category) {
        throw fail(i, "round start out of order");
      }
      if (start->baseline_hash != state.baseline.content_hash()) {
        throw fail(i, "round baseline does not match the replayed baseline");
      }
      auto [it, inserted] = state.baseline_scores.emplace(
          start->baseline_hash, start->baseline_score);
      if (!inserted && it->second != start->baseline_score) {
        throw fail(i, "baseline score differs from the cached score");
      }
      state.current_category = FrontCategory(state);
      state.pool.clear();
    } else if (const auto* d = std::get_if<DecisionRecord>(&entry)) {
      if (!state.current_category || d->category != state.current_category->name) {
        throw fail(i, "decision outside its round");
      }
      if (d->baseline_hash != state.baseline.content_hash() ||
          d->baseline_score != state.baseline_scores.at(d->baseline_hash)) {
        throw fail(i, "decision against a different baseline");
      }
      const auto pending = state.PendingInCurrentRound();
      if (std::find(pending.begin(), pending.end(), d->candidate_id) ==
          pending.end()) {
        throw fail(i, "unexpected or repeated candidate \"" + d->candidate_id +
                          "\"");
      }
      if (d->evaluator_fingerprint != state.evaluator_fingerprint) {
        throw fail(i, "decision from a different evaluator");
      }
      const Comparison cmp =
          Compare(d->candidate_score, d->baseline_score, state.policy);
      if (cmp.verdict != d->verdict || std::abs(cmp.margin - d->margin) > 1e-9) {
        throw fail(i, "verdict inconsistent with the recorded scores");
      }
      state.decisions.push_back(*d);
      if (d->verdict == Verdict::kAccept) state.pool.push_back(d->candidate_id);
    } else if (const auto* end = std::get_if<RoundEnd>(&entry)) {
      if (!state.current_category || end->category != state.current_category->name) {
        throw fail(i, "round end out of order");
      }
      if (!state.PendingInCurrentRound().empty()) {
        throw fail(i, "round closed with undecided candidates");
      }
      const RoundEnd replayed = CloseRound(state);
      if (replayed.accepted != end->accepted ||
          replayed.new_baseline_hash != end->new_baseline_hash ||
          replayed.new_baseline_size != end->new_baseline_size) {
        throw fail(i, "round result does not match the replayed pool");
      }
    } else if (const auto* final = std::get_if<RunFinal>(&entry)) {
      if (state.current_category || !state.category_queue.empty() ||
          state.final_score) {
        throw fail(i, "final record before the run finished");
      }
      if (final->baseline_hash != state.baseline.content_hash()) {
        throw fail(i, "final score for a different composition");
      }
      state.baseline_scores.emplace(final->baseline_hash, final->score);
      state.final_score = final->score;
    } else {
      throw fail(i, "unexpected run header");
    }
  }
  return state;
}

SelectionState Resume(const std::filesystem::path& ledger_path) {
  return ReplayLedger(ReadLedger(ledger_path));
}

std::string SummaryLine(const SelectionSummary& summary) {
  return "accepted " + std::to_string(summary.accepted_count) +
         " datasets across " +
         std::to_string(summary.categories_with_acceptance) + " categories";
}

}  // namespace sftmix
