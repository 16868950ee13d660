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

#include "sftmix/digest.h"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <string>

#include "sftmix/error.h"

namespace sftmix {
namespace {

std::array<unsigned char, 32> Sha256(std::string_view data) {
  std::array<unsigned char, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw Error(ErrorClass::kIo, "SHA-256 computation failed");
  }
  return out;
}

std::uint64_t Leading64(std::string_view data) {
  const auto digest = Sha256(data);
  std::uint64_t key = 0;
  for (int i = 0; i < 8; ++i) key = (key << 8) | digest[i];
  return key;
}

}  // namespace

std::string Sha256Hex(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  const auto digest = Sha256(data);
  std::string hex;
  hex.reserve(digest.size() * 2);
  for (unsigned char byte : digest) {
    hex.push_back(kHex[byte >> 4]);
    hex.push_back(kHex[byte & 0xf]);
  }
  return hex;
}

std::uint64_t PriorityKey(std::uint64_t seed, std::string_view record_id) {
  std::string keyed = std::to_string(seed);
  keyed.push_back(':');
  keyed.append(record_id);
  return Leading64(keyed);
}

std::uint64_t SubsetKey(std::uint64_t seed, std::string_view record_id) {
  constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;
  return Leading64(record_id) + seed * kGoldenGamma;  // wraps modulo 2^64
}

}  // namespace sftmix
