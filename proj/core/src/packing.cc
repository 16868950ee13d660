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

#include "sftmix/packing.h"

#include <string>

#include "json.hpp"
#include "sftmix/error.h"

namespace sftmix {
namespace {

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::uint64_t WhitespaceTokens(std::string_view text) {
  std::uint64_t tokens = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (IsAsciiSpace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++tokens;
    }
  }
  return tokens;
}

std::uint64_t CodepointsDiv4(std::string_view text) {
  std::uint64_t codepoints = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++codepoints;
  }
  return (codepoints + 3) / 4;
}

}  // namespace

void PackingConfig::Validate() const {
  if (max_len == 0) throw ValidationError("max_len must be at least 1");
  if (length_fn == LengthFn::kExternal && !external_counter) {
    throw ValidationError("external length function selected without a counter");
  }
}

std::uint64_t EstimateLength(const SampleRecord& sample,
                             const PackingConfig& config) {
  std::uint64_t length = sample.images.size() * config.image_token_cost;
  for (const Turn& turn : sample.turns) {
    switch (config.length_fn) {
      case LengthFn::kWhitespace:
        length += WhitespaceTokens(turn.text);
        break;
      case LengthFn::kCharsDiv4:
        length += CodepointsDiv4(turn.text);
        break;
      case LengthFn::kExternal:
        length += config.external_counter(turn.text);
        break;
    }
  }
  return length;
}

std::vector<PackedSequence> PackLengths(std::span<const std::string> ids,
                                        std::span<const std::uint64_t> lengths,
                                        const PackingConfig& config) {
  config.Validate();
  if (ids.size() != lengths.size()) {
    throw ValidationError("ids and lengths differ in size");
  }
  std::vector<PackedSequence> sequences;
  PackedSequence open;
  auto close = [&] {
    if (!open.sample_ids.empty()) sequences.push_back(std::move(open));
    open = PackedSequence{};
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::uint64_t length = lengths[i];
    if (length > config.max_len) {
      if (config.oversize_policy == OversizePolicy::kReject) {
        throw OversizeError("sample \"" + ids[i] + "\" has length " +
                            std::to_string(length) + " > max_len " +
                            std::to_string(config.max_len));
      }
      close();
      sequences.push_back({{ids[i]}, length, true});
      continue;
    }
    if (!open.sample_ids.empty() && open.total_len + length > config.max_len) {
      close();
    }
    open.sample_ids.push_back(ids[i]);
    open.total_len += length;
  }
  close();
  return sequences;
}

std::vector<PackedSequence> Pack(std::span<const SampleRecord> samples,
                                 const PackingConfig& config) {
  config.Validate();
  std::vector<std::string> ids;
  std::vector<std::uint64_t> lengths;
  ids.reserve(samples.size());
  lengths.reserve(samples.size());
  for (const SampleRecord& sample : samples) {
    ids.push_back(sample.sample_id);
    lengths.push_back(EstimateLength(sample, config));
  }
  return PackLengths(ids, lengths, config);
}

std::string PackedManifest(std::span<const PackedSequence> sequences) {
  std::string out;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    nlohmann::json line = {{"sequence_index", i},
                           {"sample_ids", sequences[i].sample_ids},
                           {"total_len", sequences[i].total_len},
                           {"oversize", sequences[i].oversize}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sftmix
