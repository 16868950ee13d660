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

#ifndef SFTMIX_PACKING_H_
#define SFTMIX_PACKING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sftmix/corpus.h"

namespace sftmix {

enum class LengthFn { kWhitespace, kCharsDiv4, kExternal };
enum class OversizePolicy { kIsolate, kReject };

// Token length of a piece of text; the hook behind LengthFn::kExternal.
using TokenCounter = std::function<std::uint64_t(std::string_view)>;

// CLIP-L/14 at 336px yields a 24x24 patch grid.
inline constexpr std::uint64_t kDefaultImageTokenCost = 576;

struct PackingConfig {
  std::uint64_t max_len = 4096;
  std::uint64_t image_token_cost = kDefaultImageTokenCost;
  LengthFn length_fn = LengthFn::kWhitespace;
  OversizePolicy oversize_policy = OversizePolicy::kIsolate;
  TokenCounter external_counter;

  // Throws ValidationError when max_len is zero or kExternal has no
  // counter.
  void Validate() const;
};

struct PackedSequence {
  std::vector<std::string> sample_ids;
  std::uint64_t total_len = 0;
  bool oversize = false;
};

std::uint64_t EstimateLength(const SampleRecord& sample,
                             const PackingConfig& config);

// Sequential greedy packing: each sample joins the open sequence if it fits
// and otherwise closes it. Samples longer than max_len are isolated into a
// sequence of their own (flagged oversize) or rejected with OversizeError.
std::vector<PackedSequence> Pack(std::span<const SampleRecord> samples,
                                 const PackingConfig& config);

// Same rule over precomputed lengths; ids[i] has length lengths[i].
std::vector<PackedSequence> PackLengths(std::span<const std::string> ids,
                                        std::span<const std::uint64_t> lengths,
                                        const PackingConfig& config);

// One {"oversize", "sample_ids", "sequence_index", "total_len"} object per
// line.
std::string PackedManifest(std::span<const PackedSequence> sequences);

}  // namespace sftmix

#endif  // SFTMIX_PACKING_H_
