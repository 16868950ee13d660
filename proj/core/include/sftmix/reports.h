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

#ifndef SFTMIX_REPORTS_H_
#define SFTMIX_REPORTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sftmix/metrics.h"
#include "sftmix/selection.h"

namespace sftmix {

// Scores of one model pre-trained on one subset size.
struct ScalingResult {
  std::string model;
  std::uint64_t size = 0;
  ScoreVector scores;
};

// Lines of {"model", "size", "benchmark", "raw"} objects, grouped into one
// ScalingResult per (model, size). Throws ParseError.
std::vector<ScalingResult> ParseScalingResults(std::string_view text);

// CSV with columns model,size,benchmark,raw,normalized,delta_vs_prev_size,
// sorted by (model, size, benchmark). The delta is the change in normalized
// score against the next smaller size of the same model and benchmark; it is
// empty for the smallest size. Throws EmptyInputError.
std::string ScalingReportCsv(std::span<const ScalingResult> results,
                             const ComparisonPolicy& policy = {});

// One row per completed round: round,category,accepted_count,
// baseline_average_after and the four normalized core scores. Cells are
// empty while the post-round baseline has not been scored yet.
std::string ImprovementsReportCsv(const SelectionState& state);

// Fixed-point rendering with trailing zeros trimmed ("-3.3", "71.9525").
std::string FormatNumber(double value);

}  // namespace sftmix

#endif  // SFTMIX_REPORTS_H_
