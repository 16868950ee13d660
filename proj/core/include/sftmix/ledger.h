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

#ifndef SFTMIX_LEDGER_H_
#define SFTMIX_LEDGER_H_

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "sftmix/corpus.h"
#include "sftmix/metrics.h"
#include "sftmix/registry.h"

namespace sftmix {

// First record of every ledger. Carries everything needed to rebuild the
// run without the original input files.
struct RunHeader {
  std::string run_id;
  ComparisonPolicy policy;
  std::vector<std::string> order;  // category names
  Composition baseline;
  Registry registry;
  std::string evaluator_fingerprint;
  std::string created;  // ISO-8601 UTC
};

// A round began: the frozen baseline and its (possibly cached) score.
struct RoundStart {
  std::string category;
  std::string baseline_hash;
  ScoreVector baseline_score;
  bool cached = false;
};

struct DecisionRecord {
  std::string candidate_id;
  std::string category;
  std::string baseline_hash;
  ScoreVector candidate_score;
  ScoreVector baseline_score;
  Verdict verdict = Verdict::kReject;
  double margin = 0.0;
  std::string timestamp;  // ISO-8601 UTC
  std::string evaluator_fingerprint;

  friend bool operator==(const DecisionRecord&,
                         const DecisionRecord&) = default;
};

// The pool was concatenated into the baseline.
struct RoundEnd {
  std::string category;
  std::vector<std::string> accepted;
  std::string new_baseline_hash;
  std::size_t new_baseline_size = 0;
};

// Score of the final composition, written once the queue is empty.
struct RunFinal {
  std::string baseline_hash;
  ScoreVector score;
};

using LedgerEntry =
    std::variant<RunHeader, RoundStart, DecisionRecord, RoundEnd, RunFinal>;

struct LedgerContents {
  std::vector<LedgerEntry> entries;
  // Byte length of the verified prefix. Anything after it is a torn final
  // write (no trailing newline) that is discarded on reopen.
  std::size_t valid_bytes = 0;
  bool torn_tail = false;
  std::string last_digest;
};

// Line format:
//   {"digest": sha256(prev + "\n" + record), "prev": <digest of previous
//    line or "">, "record": {...,"type": ...}}
// Every line is verified against its own digest and its predecessor's.
// Throws LedgerCorruptError on any mismatch, a malformed complete line, a
// missing header, or records out of order. Throws IoError when the file
// cannot be read.
LedgerContents ReadLedger(const std::filesystem::path& path);
LedgerContents ParseLedger(std::string_view text);

// Append-only writer. Write() is serialized internally and flushes each
// record.
class LedgerWriter {
 public:
  // Starts a new ledger; fails with IoError if the file already exists.
  static LedgerWriter Create(const std::filesystem::path& path,
                             const RunHeader& header);
  // Reopens an existing ledger for appending after verifying it; a torn
  // tail is truncated away.
  static LedgerWriter Reopen(const std::filesystem::path& path);

  LedgerWriter(LedgerWriter&& other) noexcept;
  LedgerWriter& operator=(LedgerWriter&&) = delete;
  LedgerWriter(const LedgerWriter&) = delete;

  void Write(const LedgerEntry& entry);
  const std::filesystem::path& path() const { return path_; }

 private:
  LedgerWriter(std::filesystem::path path, std::string last_digest);

  std::filesystem::path path_;
  std::ofstream out_;
  std::string last_digest_;
  std::mutex mu_;
};

// Canonical ISO-8601 UTC timestamp with millisecond precision.
std::string NowTimestamp();

}  // namespace sftmix

#endif  // SFTMIX_LEDGER_H_
