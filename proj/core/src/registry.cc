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

#include "sftmix/registry.h"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "sftmix/corpus.h"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {

namespace internal {
extern const std::string_view kDefaultRegistryManifest;
}  // namespace internal

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kRequiredFields = {
    "id", "name", "category", "split", "count", "uri", "notes"};
const std::set<std::string, std::less<>> kOptionalFields = {"parent",
                                                            "superseded"};

const json& Field(const json& obj, std::string_view key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError("registry line " + std::to_string(line) +
                     ": missing field \"" + std::string(key) + "\"");
  }
  return *it;
}

std::string StringField(const json& obj, std::string_view key,
                        std::size_t line) {
  const json& value = Field(obj, key, line);
  if (!value.is_string()) {
    throw ParseError("registry line " + std::to_string(line) + ": field \"" +
                     std::string(key) + "\" must be a string");
  }
  return value.get<std::string>();
}

}  // namespace

const Taxonomy& DefaultTaxonomy() {
  static const Taxonomy kTaxonomy = [] {
    const char* names[] = {"Captioning", "General QA",   "Science",
                           "Chart",      "Mathematics",  "Knowledge",
                           "OCR",        "Document",     "Grounding",
                           "Conversation", "Text-only",  "Screen"};
    Taxonomy taxonomy;
    int ordinal = 0;
    for (const char* name : names) taxonomy.push_back({name, ordinal++});
    return taxonomy;
  }();
  return kTaxonomy;
}

std::string_view SplitTagName(SplitTag tag) {
  switch (tag) {
    case SplitTag::kCap:
      return "cap";
    case SplitTag::kConv:
      return "conv";
    case SplitTag::kNone:
      break;
  }
  return "none";
}

std::optional<SplitTag> ParseSplitTag(std::string_view name) {
  if (name == "none") return SplitTag::kNone;
  if (name == "cap") return SplitTag::kCap;
  if (name == "conv") return SplitTag::kConv;
  return std::nullopt;
}

Registry::Registry(Taxonomy taxonomy, std::vector<DatasetDescriptor> datasets)
    : taxonomy_(std::move(taxonomy)), datasets_(std::move(datasets)) {
  std::unordered_set<std::string> names;
  for (const Category& category : taxonomy_) {
    if (!names.insert(category.name).second) {
      throw ValidationError("duplicate category \"" + category.name + "\"");
    }
  }
  std::unordered_set<std::string> ids;
  for (const DatasetDescriptor& dataset : datasets_) {
    if (dataset.id.empty()) throw ValidationError("dataset with empty id");
    if (!ids.insert(dataset.id).second) {
      throw ValidationError("duplicate dataset id \"" + dataset.id + "\"");
    }
    auto category = FindCategory(dataset.category.name);
    if (!category || *category != dataset.category) {
      throw ValidationError("dataset \"" + dataset.id +
                            "\" has unknown category \"" +
                            dataset.category.name + "\"");
    }
  }
}

const DatasetDescriptor* Registry::Find(std::string_view id) const {
  auto it = std::find_if(datasets_.begin(), datasets_.end(),
                         [&](const DatasetDescriptor& d) { return d.id == id; });
  return it == datasets_.end() ? nullptr : &*it;
}

std::optional<Category> Registry::FindCategory(std::string_view name) const {
  for (const Category& category : taxonomy_) {
    if (category.name == name) return category;
  }
  return std::nullopt;
}

std::vector<DatasetDescriptor> Registry::CandidatesIn(
    const Category& category) const {
  std::vector<DatasetDescriptor> out;
  for (const DatasetDescriptor& dataset : datasets_) {
    if (!dataset.superseded && dataset.category == category) {
      out.push_back(dataset);
    }
  }
  return out;
}

std::size_t Registry::CandidateCount() const {
  return static_cast<std::size_t>(
      std::count_if(datasets_.begin(), datasets_.end(),
                     [](const DatasetDescriptor& d) { return !d.superseded; }));
}

Registry Registry::WithReclassified(
    std::string_view parent_id,
    std::span<const DatasetDescriptor> children) const {
  std::vector<DatasetDescriptor> datasets;
  bool found = false;
  for (const DatasetDescriptor& dataset : datasets_) {
    datasets.push_back(dataset);
    if (dataset.id == parent_id) {
      found = true;
      datasets.back().superseded = true;
      datasets.insert(datasets.end(), children.begin(), children.end());
    }
  }
  if (!found) {
    throw ValidationError("unknown dataset \"" + std::string(parent_id) + "\"");
  }
  return Registry(taxonomy_, std::move(datasets));
}

std::string Registry::ToManifest() const {
  std::string out;
  for (const DatasetDescriptor& d : datasets_) {
    json obj = {{"id", d.id},
                {"name", d.display_name},
                {"category", d.category.name},
                {"split", SplitTagName(d.split_tag)},
                {"count", d.record_count},
                {"uri", d.source_uri},
                {"notes", d.notes}};
    if (d.parent_id) obj["parent"] = *d.parent_id;
    if (d.superseded) obj["superseded"] = true;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

Registry ParseRegistry(std::string_view manifest, const Taxonomy& taxonomy) {
  std::vector<DatasetDescriptor> datasets;
  const auto lines = internal::SplitLines(manifest);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (internal::IsBlank(lines[i])) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError("registry line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!obj.is_object()) {
      throw ParseError("registry line " + std::to_string(line_no) +
                       ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
      if (!kRequiredFields.contains(key) && !kOptionalFields.contains(key)) {
        throw ValidationError("registry line " + std::to_string(line_no) +
                              ": unknown field \"" + key + "\"");
      }
    }

    DatasetDescriptor d;
    d.id = StringField(obj, "id", line_no);
    d.display_name = StringField(obj, "name", line_no);
    const std::string category = StringField(obj, "category", line_no);
    auto it = std::find_if(taxonomy.begin(), taxonomy.end(),
                           [&](const Category& c) { return c.name == category; });
    if (it == taxonomy.end()) {
      throw ValidationError("registry line " + std::to_string(line_no) +
                            ": unknown category \"" + category + "\"");
    }
    d.category = *it;
    auto split = ParseSplitTag(StringField(obj, "split", line_no));
    if (!split) {
      throw ParseError("registry line " + std::to_string(line_no) +
                       ": split must be one of none, cap, conv");
    }
    d.split_tag = *split;
    const json& count = Field(obj, "count", line_no);
    if (!count.is_number_integer()) {
      throw ParseError("registry line " + std::to_string(line_no) +
                       ": count must be an integer");
    }
    if (count.is_number_unsigned()) {
      d.record_count = count.get<std::uint64_t>();
    } else if (count.get<std::int64_t>() < 0) {
      throw ValidationError("registry line " + std::to_string(line_no) +
                            ": negative count for \"" + d.id + "\"");
    } else {
      d.record_count = static_cast<std::uint64_t>(count.get<std::int64_t>());
    }
    d.source_uri = StringField(obj, "uri", line_no);
    d.notes = StringField(obj, "notes", line_no);
    if (obj.contains("parent")) d.parent_id = StringField(obj, "parent", line_no);
    if (obj.contains("superseded")) {
      const json& flag = obj["superseded"];
      if (!flag.is_boolean()) {
        throw ParseError("registry line " + std::to_string(line_no) +
                         ": superseded must be a boolean");
      }
      d.superseded = flag.get<bool>();
    }
    datasets.push_back(std::move(d));
  }
  return Registry(taxonomy, std::move(datasets));
}

Registry LoadRegistry(const std::filesystem::path& manifest_path,
                      const Taxonomy& taxonomy) {
  return ParseRegistry(internal::ReadFile(manifest_path), taxonomy);
}

std::string_view DefaultRegistryManifest() {
  return internal::kDefaultRegistryManifest;
}

const Registry& DefaultRegistry() {
  static const Registry kRegistry = ParseRegistry(DefaultRegistryManifest());
  return kRegistry;
}

SplitRule CaptionVsConversationRule() {
  return [](const SampleRecord& record) -> std::optional<SplitTag> {
    if (record.turns.empty()) return std::nullopt;
    return record.turns.size() <= 2 ? SplitTag::kCap : SplitTag::kConv;
  };
}

std::array<DatasetDescriptor, 2> Reclassify(
    const DatasetDescriptor& dataset, std::span<const SampleRecord> records,
    const SplitRule& rule, const ReclassifyTargets& targets) {
  if (dataset.split_tag != SplitTag::kNone) {
    throw ValidationError("dataset \"" + dataset.id + "\" is already split");
  }
  if (records.size() != dataset.record_count) {
    throw ValidationError("dataset \"" + dataset.id + "\" declares " +
                          std::to_string(dataset.record_count) +
                          " records but " + std::to_string(records.size()) +
                          " were supplied");
  }
  std::uint64_t caption = 0;
  std::uint64_t conversation = 0;
  for (const SampleRecord& record : records) {
    auto tag = rule(record);
    if (!tag || *tag == SplitTag::kNone) {
      throw RuleError("split rule leaves record \"" + record.sample_id +
                      "\" of \"" + dataset.id + "\" unassigned");
    }
    (*tag == SplitTag::kCap ? caption : conversation) += 1;
  }

  auto half = [&](SplitTag tag, std::uint64_t count) {
    DatasetDescriptor d = dataset;
    d.id = dataset.id + "-" + std::string(SplitTagName(tag));
    d.display_name = dataset.display_name + "(" +
                     std::string(SplitTagName(tag)) + ")";
    d.split_tag = tag;
    const auto& target =
        tag == SplitTag::kCap ? targets.cap_category : targets.conv_category;
    if (target) d.category = *target;
    d.record_count = count;
    d.parent_id = dataset.id;
    d.superseded = false;
    return d;
  };
  return {half(SplitTag::kCap, caption), half(SplitTag::kConv, conversation)};
}

}  // namespace sftmix
