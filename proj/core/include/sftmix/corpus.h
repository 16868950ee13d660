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

#ifndef SFTMIX_CORPUS_H_
#define SFTMIX_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sftmix/registry.h"

namespace sftmix {

enum class Role { kHuman, kAssistant };

struct Turn {
  Role role = Role::kHuman;
  std::string text;

  friend bool operator==(const Turn&, const Turn&) = default;
};

// One instruction-tuning conversation.
struct SampleRecord {
  std::string sample_id;
  std::vector<std::string> images;
  std::vector<Turn> turns;
  std::string source_dataset;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Returns the first invariant a record violates, or nullopt if it is valid.
// Turns must be non-empty, start with human, end with assistant and strictly
// alternate; text-only records must not reference images.
std::optional<std::string> ValidateSample(const SampleRecord& record,
                                          bool text_only);

// Parses one line of the sample interchange format:
//   {"id": ..., "image": "a.jpg" | ["a.jpg", ...],
//    "conversations": [{"from": "human"|"gpt"|"assistant", "value": ...}]}
// Throws ParseError when the line is not such an object.
SampleRecord ParseSampleLine(std::string_view line,
                             std::string_view dataset_id);
std::string SampleToLine(const SampleRecord& record);

struct IngestIssue {
  std::size_t line = 0;  // 1-based
  std::string sample_id;
  std::string reason;
};

struct IngestResult {
  std::vector<SampleRecord> records;
  std::vector<IngestIssue> issues;

  std::size_t count() const { return records.size(); }
};

struct IngestOptions {
  // Enforce the no-image rule of the Text-only category.
  bool text_only = false;
};

// Reads a line-delimited sample file. Records violating an invariant are
// quarantined into `issues` with the reason. Throws IoError when the file
// cannot be read and FormatError when it is not a sample file at all (the
// first non-blank line is not a JSON object, or the file contains NUL
// bytes).
IngestResult Ingest(const std::filesystem::path& path,
                    std::string_view dataset_id,
                    const IngestOptions& options = {});

// Same as Ingest over in-memory text.
IngestResult IngestText(std::string_view text, std::string_view dataset_id,
                        const IngestOptions& options = {});

// ---------------------------------------------------------------------------
// Compositions

struct Take {
  // nullopt means the whole dataset.
  std::optional<std::uint64_t> count;

  static Take All() { return Take{}; }
  static Take N(std::uint64_t n) { return Take{n}; }
  bool is_all() const { return !count.has_value(); }

  friend bool operator==(const Take&, const Take&) = default;
};

struct CompositionEntry {
  std::string dataset_id;
  Take take;
  // Free-form role of the entry inside a published mixture, e.g.
  // "detail-description" for the LLaVA-1.5 detailed-description split.
  std::string tag;

  friend bool operator==(const CompositionEntry&,
                         const CompositionEntry&) = default;
};

struct Lineage {
  std::string parent_hash;
  std::vector<std::string> added_ids;
  std::vector<std::string> removed_ids;

  friend bool operator==(const Lineage&, const Lineage&) = default;
};

// An ordered mixture of datasets. Value type; the content hash covers the
// entries only, so renaming a mixture or changing its lineage does not
// change its identity.
class Composition {
 public:
  Composition() = default;
  // Throws DuplicateDatasetError if two entries share a dataset id.
  Composition(std::string name, std::vector<CompositionEntry> entries,
              std::optional<Lineage> lineage = std::nullopt);

  const std::string& name() const { return name_; }
  const std::vector<CompositionEntry>& entries() const { return entries_; }
  const std::optional<Lineage>& lineage() const { return lineage_; }
  const std::string& content_hash() const { return content_hash_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool Contains(std::string_view dataset_id) const;
  std::vector<std::string> DatasetIds() const;

  // Canonical file form: a header line
  //   {"content_hash": ..., "format": "sftmix.composition/1", "lineage": ...,
  //    "name": ...}
  // followed by one {"dataset", "tag", "take"} object per entry.
  std::string Serialize() const;
  // Verifies the digest header; throws ParseError on mismatch.
  static Composition Deserialize(std::string_view text);

  friend bool operator==(const Composition& a, const Composition& b) {
    return a.name_ == b.name_ && a.entries_ == b.entries_ &&
           a.lineage_ == b.lineage_;
  }

 private:
  std::string name_;
  std::vector<CompositionEntry> entries_;
  std::optional<Lineage> lineage_;
  std::string content_hash_;
};

Composition LoadComposition(const std::filesystem::path& path);
void SaveComposition(const Composition& composition,
                     const std::filesystem::path& path);

struct Addition {
  std::string dataset_id;
  Take take;
};

// Appends `additions` to `base` (or to nothing). Additions must be known to
// `registry` and, when counted, take no more than the dataset's
// record_count. Throws DuplicateDatasetError, UnknownDatasetError or
// SizeError.
Composition Compose(std::string name, const Composition* base,
                    std::span<const Addition> additions,
                    const Registry& registry);

inline constexpr std::string_view kDetailDescriptionTag = "detail-description";

// Replaces the entry tagged detail-description with `sharegpt4v_id` (take
// ALL) at the same position. Throws MissingSplitError when no such entry
// exists, which also makes a second application fail.
Composition BuildImprovedBaseline(const Composition& llava665k,
                                  std::string_view sharegpt4v_id);

// ---------------------------------------------------------------------------
// Subsets for the pre-training scaling study.

struct SubsetSpec {
  std::string corpus_id;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
};

struct SubsetManifest {
  std::string corpus_id;
  std::uint64_t seed = 0;
  // Ascending priority order, so a smaller subset is a prefix of a larger
  // one under the same seed.
  std::vector<std::string> record_ids;

  // Header line {"corpus", "digest", "format", "seed", "size"} followed by
  // one record id per line. The digest covers the id lines.
  std::string Serialize() const;
  static SubsetManifest Deserialize(std::string_view text);
};

// Default split sizes of the scaling study.
inline constexpr std::uint64_t kDefaultScalingSizes[] = {
    1'000'000,  5'000'000,  10'000'000, 20'000'000,
    30'000'000, 50'000'000, 100'000'000};

// Picks the `spec.size` records with the lowest SubsetKey(seed, id).
// Throws SizeError when size is zero or exceeds the corpus, and
// ValidationError on duplicate record ids.
SubsetManifest SampleSubset(std::span<const std::string> corpus_ids,
                            const SubsetSpec& spec);

// Reads record ids from either a sample file (one JSON object per line, the
// "id" field is used) or a plain list with one id per line.
std::vector<std::string> LoadCorpusIds(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Materialization

// Source files live at <data_dir>/<dataset_id>.jsonl.
struct DatasetLocator {
  std::filesystem::path data_dir;
  std::filesystem::path PathFor(std::string_view dataset_id) const;
};

// Writes the union of the composition's records to `out`, ordered by
// ascending PriorityKey(shuffle_seed, sample_id) (ties broken by dataset id
// then sample id). Counted takes keep the records with the lowest keys.
// Invalid source records are skipped. Returns the number of records
// written. Throws UnknownDatasetError for a missing source file, SizeError
// when a take exceeds the valid records available, IoError on write
// failure.
std::size_t Materialize(const Composition& composition,
                        const DatasetLocator& locator,
                        std::uint64_t shuffle_seed,
                        const std::filesystem::path& out,
                        const Registry* registry = nullptr);

}  // namespace sftmix

#endif  // SFTMIX_CORPUS_H_
