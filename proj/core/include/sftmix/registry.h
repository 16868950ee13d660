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

#ifndef SFTMIX_REGISTRY_H_
#define SFTMIX_REGISTRY_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sftmix {

struct SampleRecord;

struct Category {
  std::string name;
  int ordinal = 0;

  friend bool operator==(const Category&, const Category&) = default;
};

using Taxonomy = std::vector<Category>;

// The twelve SFT categories in table order: Captioning, General QA, Science,
// Chart, Mathematics, Knowledge, OCR, Document, Grounding, Conversation,
// Text-only, Screen.
const Taxonomy& DefaultTaxonomy();

enum class SplitTag { kNone, kCap, kConv };

std::string_view SplitTagName(SplitTag tag);
std::optional<SplitTag> ParseSplitTag(std::string_view name);

struct DatasetDescriptor {
  std::string id;
  std::string display_name;
  Category category;
  SplitTag split_tag = SplitTag::kNone;
  std::uint64_t record_count = 0;
  std::string source_uri;
  std::string notes;
  // Set on the two halves of a reclassified dataset.
  std::optional<std::string> parent_id;
  // Parents that were reclassified stay in the registry for lineage but are
  // no longer selection candidates.
  bool superseded = false;

  friend bool operator==(const DatasetDescriptor&,
                         const DatasetDescriptor&) = default;
};

// Immutable catalog of candidate datasets over an ordered taxonomy.
class Registry {
 public:
  Registry() : Registry(DefaultTaxonomy(), {}) {}
  // Throws ValidationError on duplicate ids or categories outside the
  // taxonomy.
  Registry(Taxonomy taxonomy, std::vector<DatasetDescriptor> datasets);

  const Taxonomy& taxonomy() const { return taxonomy_; }
  const std::vector<DatasetDescriptor>& datasets() const { return datasets_; }

  const DatasetDescriptor* Find(std::string_view id) const;
  std::optional<Category> FindCategory(std::string_view name) const;

  // Non-superseded datasets of `category`, in manifest order.
  std::vector<DatasetDescriptor> CandidatesIn(const Category& category) const;

  // Number of non-superseded datasets.
  std::size_t CandidateCount() const;

  // Returns a copy where `parent_id` is flagged superseded and `children` are
  // inserted right after it.
  Registry WithReclassified(std::string_view parent_id,
                            std::span<const DatasetDescriptor> children) const;

  // Canonical line-delimited manifest text; LoadRegistry(ToManifest()) is an
  // identity.
  std::string ToManifest() const;

  friend bool operator==(const Registry&, const Registry&) = default;

 private:
  Taxonomy taxonomy_;
  std::vector<DatasetDescriptor> datasets_;
};

// Parses a registry manifest: one JSON object per line with the fields
// {id, name, category, split, count, uri, notes} plus optional {parent,
// superseded}. Blank lines are skipped. Throws ParseError on malformed
// lines and ValidationError on unknown fields, duplicate ids, unknown
// categories or negative counts.
Registry ParseRegistry(std::string_view manifest,
                       const Taxonomy& taxonomy = DefaultTaxonomy());
Registry LoadRegistry(const std::filesystem::path& manifest_path,
                      const Taxonomy& taxonomy = DefaultTaxonomy());

// The bundled manifest: 37 candidates over the 12 default categories.
const Registry& DefaultRegistry();
std::string_view DefaultRegistryManifest();

// Maps a record to the split it belongs to, or nullopt when the rule does
// not cover it.
using SplitRule = std::function<std::optional<SplitTag>(const SampleRecord&)>;

// Single-exchange records are caption-style; anything longer is a
// conversation.
SplitRule CaptionVsConversationRule();

// Categories the two halves land in; unset keeps the parent's category.
struct ReclassifyTargets {
  std::optional<Category> cap_category;
  std::optional<Category> conv_category;
};

// Splits a mixed dataset into its caption and conversation halves by
// applying `rule` to every record. Returns {cap, conv}; the halves carry ids
// "<id>-cap" / "<id>-conv" and parent_id = dataset.id. Throws
// ValidationError when the dataset is already split or `records` does not
// match its record_count, and RuleError when a record is left unassigned.
std::array<DatasetDescriptor, 2> Reclassify(
    const DatasetDescriptor& dataset, std::span<const SampleRecord> records,
    const SplitRule& rule, const ReclassifyTargets& targets = {});

}  // namespace sftmix

#endif  // SFTMIX_REGISTRY_H_
