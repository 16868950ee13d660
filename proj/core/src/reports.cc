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

#include "sftmix/reports.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>

#include "json.hpp"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {
namespace {

std::string CsvField(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string FormatNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string text = buf;
  if (text.find('.') != std::string::npos) {
    while (text.back() == '0') text.pop_back();
    if (text.back() == '.') text.pop_back();
  }
  if (text == "-0") text = "0";
  return text;
}

std::vector<ScalingResult> ParseScalingResults(std::string_view text) {
  std::map<std::pair<std::string, std::uint64_t>, ScoreVector> grouped;
  const auto lines = internal::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    const std::string where = "scaling line " + std::to_string(i + 1);
    try {
      const auto obj = nlohmann::json::parse(lines[i]);
      auto key = std::make_pair(obj.at("model").get<std::string>(),
                                obj.at("size").get<std::uint64_t>());
      const auto benchmark = obj.at("benchmark").get<std::string>();
      if (!grouped[key].raw.emplace(benchmark, obj.at("raw").get<double>())
               .second) {
        throw ParseError(where + ": duplicate benchmark \"" + benchmark + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  std::vector<ScalingResult> results;
  for (auto& [key, scores] : grouped) {
    results.push_back({key.first, key.second, std::move(scores)});
  }
  return results;
}

std::string ScalingReportCsv(std::span<const ScalingResult> results,
                             const ComparisonPolicy& policy) {
  if (results.empty()) throw EmptyInputError("no scaling results");
  std::vector<const ScalingResult*> sorted;
  for (const ScalingResult& r : results) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalingResult* a, const ScalingResult* b) {
              return std::tie(a->model, a->size) < std::tie(b->model, b->size);
            });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->model == sorted[i - 1]->model &&
        sorted[i]->size == sorted[i - 1]->size) {
      throw ValidationError("duplicate scaling result for " + sorted[i]->model +
                            " at size " + std::to_string(sorted[i]->size));
    }
  }

  std::string csv = "model,size,benchmark,raw,normalized,delta_vs_prev_size\n";
  // Normalized score of the previous size, per (model, benchmark).
  std::map<std::pair<std::string, std::string>, double> previous;
  for (const ScalingResult* result : sorted) {
    for (const auto& [benchmark, raw] : result->scores.raw) {
      const double normalized = Normalize(benchmark, raw, policy);
      const auto key = std::make_pair(result->model, benchmark);
      std::string delta;
      if (auto it = previous.find(key); it != previous.end()) {
        delta = FormatNumber(normalized - it->second);
      }
      previous[key] = normalized;
      csv += CsvField(result->model) + "," + std::to_string(result->size) +
             "," + CsvField(benchmark) + "," + internal::ShortestDouble(raw) +
             "," + FormatNumber(normalized) + "," + delta + "\n";
    }
    // A model that skips a benchmark at this size has no predecessor for
    // it at the next size.
    for (auto it = previous.begin(); it != previous.end();) {
      if (it->first.first == result->model &&
          !result->scores.Has(it->first.second)) {
        it = previous.erase(it);
      } else {
        ++it;
      }
    }
  }
  return csv;
}

std::string ImprovementsReportCsv(const SelectionState& state) {
  std::string csv = "round,category,accepted_count,baseline_average_after";
  for (std::string_view benchmark : kCoreBenchmarks) {
    csv += ",";
    csv += benchmark;
  }
  csv += "\n";
  for (std::size_t i = 0; i < state.rounds.size(); ++i) {
    const RoundRecord& round = state.rounds[i];
    csv += std::to_string(i + 1) + "," + CsvField(round.category) + "," +
           std::to_string(round.accepted.size()) + ",";
    auto it = state.baseline_scores.find(round.baseline_after_hash);
    if (it == state.baseline_scores.end()) {
      csv += ",,,,\n";
      continue;
    }
    csv += FormatNumber(Average(it->second, state.policy));
    for (std::string_view benchmark : kCoreBenchmarks) {
      csv += "," + FormatNumber(Normalize(benchmark, it->second.Raw(benchmark),
                                          state.policy));
    }
    csv += "\n";
  }
  return csv;
}

}  // namespace sftmix
