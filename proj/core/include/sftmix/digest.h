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

#ifndef SFTMIX_DIGEST_H_
#define SFTMIX_DIGEST_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace sftmix {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Keyed priority of a record under a seed: the first eight bytes (big-endian)
// of SHA-256("<seed>:<record_id>"). Sorting records by ascending priority
// gives a seed-determined permutation whose prefixes are nested samples.
std::uint64_t PriorityKey(std::uint64_t seed, std::string_view record_id);

// Subset priority: the record's unseeded ring position (first eight bytes of
// SHA-256(record_id)) advanced by seed * 0x9E3779B97F4A7C15 modulo 2^64.
// Each seed still yields a hash-uniform permutation with nested prefixes,
// but successive seeds rotate the ring along a low-discrepancy (golden
// ratio) sequence, so across many seeds every record is drawn at close to
// the nominal rate instead of with independent binomial scatter.
std::uint64_t SubsetKey(std::uint64_t seed, std::string_view record_id);

}  // namespace sftmix

#endif  // SFTMIX_DIGEST_H_
