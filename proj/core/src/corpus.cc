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

#include "sftmix/corpus.h"

#include <algorithm>
#include <future>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "sftmix/digest.h"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {
namespace {

using nlohmann::json;

constexpr std::string_view kCompositionFormat = "sftmix.composition/1";
constexpr std::string_view kSubsetFormat = "sftmix.subset/1";
constexpr std::string_view kTextOnlyCategory = "Text-only";

std::string RoleName(Role role) {
  return role == Role::kHuman ? "human" : "assistant";
}

std::optional<Role> ParseRole(std::string_view from) {
  if (from == "human" || from == "user") return Role::kHuman;
  if (from == "gpt" || from == "assistant") return Role::kAssistant;
  return std::nullopt;
}

std::string IdFromJson(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return value.dump();
  throw ParseError("\"id\" must be a string or integer");
}

json EntryJson(const CompositionEntry& entry) {
  json take = entry.take.is_all() ? json("ALL") : json(*entry.take.count);
  return {{"dataset", entry.dataset_id}, {"tag", entry.tag}, {"take", take}};
}

CompositionEntry EntryFromJson(const json& obj) {
  if (!obj.is_object() || !obj.contains("dataset") || !obj.contains("take")) {
    throw ParseError("composition entry needs \"dataset\" and \"take\"");
  }
  CompositionEntry entry;
  entry.dataset_id = obj.at("dataset").get<std::string>();
  const json& take = obj.at("take");
  if (take.is_string() && take.get<std::string>() == "ALL") {
    entry.take = Take::All();
  } else if (take.is_number_unsigned()) {
    entry.take = Take::N(take.get<std::uint64_t>());
  } else {
    throw ParseError("composition entry \"" + entry.dataset_id +
                     "\": take must be \"ALL\" or a non-negative integer");
  }
  if (obj.contains("tag")) entry.tag = obj.at("tag").get<std::string>();
  return entry;
}

json LineageJson(const std::optional<Lineage>& lineage) {
  if (!lineage) return nullptr;
  return {{"parent_hash", lineage->parent_hash},
          {"added_ids", lineage->added_ids},
          {"removed_ids", lineage->removed_ids}};
}

std::optional<Lineage> LineageFromJson(const json& value) {
  if (value.is_null()) return std::nullopt;
  Lineage lineage;
  lineage.parent_hash = value.at("parent_hash").get<std::string>();
  lineage.added_ids = value.at("added_ids").get<std::vector<std::string>>();
  if (value.contains("removed_ids")) {
    lineage.removed_ids =
        value.at("removed_ids").get<std::vector<std::string>>();
  }
  return lineage;
}

std::string EntriesDigest(const std::vector<CompositionEntry>& entries) {
  std::string canonical;
  for (const CompositionEntry& entry : entries) {
    canonical += EntryJson(entry).dump();
    canonical += '\n';
  }
  return Sha256Hex(canonical);
}

json ParseJsonLine(std::string_view line, std::string_view what) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Samples

std::optional<std::string> ValidateSample(const SampleRecord& record,
                                          bool text_only) {
  if (record.sample_id.empty()) return "missing sample id";
  if (record.turns.empty()) return "empty conversation";
  if (record.turns.front().role != Role::kHuman) {
    return "role alternation: first turn must be human";
  }
  for (std::size_t i = 1; i < record.turns.size(); ++i) {
    if (record.turns[i].role == record.turns[i - 1].role) {
      return "role alternation: turns " + std::to_string(i) + " and " +
             std::to_string(i + 1) + " are both " +
             RoleName(record.turns[i].role);
    }
  }
  if (record.turns.back().role != Role::kAssistant) {
    return "role alternation: last turn must be assistant";
  }
  if (text_only && !record.images.empty()) {
    return "text-only dataset record references images";
  }
  return std::nullopt;
}

SampleRecord ParseSampleLine(std::string_view line,
                             std::string_view dataset_id) {
  json obj = ParseJsonLine(line, "sample");
  if (!obj.is_object()) throw ParseError("sample must be a JSON object");
  SampleRecord record;
  record.source_dataset = std::string(dataset_id);
  try {
    if (!obj.contains("id")) throw ParseError("sample has no \"id\"");
    record.sample_id = IdFromJson(obj.at("id"));
    if (auto it = obj.find("image"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        record.images.push_back(it->get<std::string>());
      } else if (it->is_array()) {
        record.images = it->get<std::vector<std::string>>();
      } else {
        throw ParseError("\"image\" must be a string or array of strings");
      }
    }
    if (auto it = obj.find("dataset");
        it != obj.end() && it->is_string() && dataset_id.empty()) {
      record.source_dataset = it->get<std::string>();
    }
    auto conv = obj.find("conversations");
    if (conv == obj.end() || !conv->is_array()) {
      throw ParseError("sample \"" + record.sample_id +
                       "\" has no \"conversations\" array");
    }
    for (const json& turn : *conv) {
      if (!turn.is_object() || !turn.contains("from") ||
          !turn.contains("value")) {
        throw ParseError("turn needs \"from\" and \"value\"");
      }
      const auto from = turn.at("from").get<std::string>();
      auto role = ParseRole(from);
      if (!role) throw ParseError("unknown role \"" + from + "\"");
      record.turns.push_back({*role, turn.at("value").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("sample: ") + e.what());
  }
  return record;
}

std::string SampleToLine(const SampleRecord& record) {
  json conversations = json::array();
  for (const Turn& turn : record.turns) {
    conversations.push_back(
        {{"from", turn.role == Role::kHuman ? "human" : "gpt"},
         {"value", turn.text}});
  }
  json obj = {{"id", record.sample_id},
              {"image", record.images},
              {"conversations", std::move(conversations)}};
  if (!record.source_dataset.empty()) obj["dataset"] = record.source_dataset;
  return obj.dump();
}

IngestResult IngestText(std::string_view text, std::string_view dataset_id,
                        const IngestOptions& options) {
  if (text.find('\0') != std::string_view::npos) {
    throw FormatError("sample file for \"" + std::string(dataset_id) +
                      "\" contains NUL bytes");
  }
  IngestResult result;
  std::unordered_set<std::string> seen;
  bool first = true;
  const auto lines = internal::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    if (first) {
      first = false;
      const auto trimmed = internal::Trim(lines[i]);
      if (trimmed.front() != '{' || !json::accept(trimmed)) {
        throw FormatError("\"" + std::string(dataset_id) +
                          "\" is not a line-delimited sample file");
      }
    }
    SampleRecord record;
    try {
      record = ParseSampleLine(lines[i], dataset_id);
    } catch (const ParseError& e) {
      std::string id;
      if (json obj = json::parse(lines[i], nullptr, false);
          obj.is_object() && obj.contains("id")) {
        try {
          id = IdFromJson(obj["id"]);
        } catch (const ParseError&) {
        }
      }
      result.issues.push_back({i + 1, std::move(id), e.what()});
      continue;
    }
    if (auto violation = ValidateSample(record, options.text_only)) {
      result.issues.push_back({i + 1, record.sample_id, *violation});
      continue;
    }
    if (!seen.insert(record.sample_id).second) {
      result.issues.push_back({i + 1, record.sample_id, "duplicate sample id"});
      continue;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

IngestResult Ingest(const std::filesystem::path& path,
                    std::string_view dataset_id,
                    const IngestOptions& options) {
  return IngestText(internal::ReadFile(path), dataset_id, options);
}

// ---------------------------------------------------------------------------
// Compositions

Composition::Composition(std::string name,
                         std::vector<CompositionEntry> entries,
                         std::optional<Lineage> lineage)
    : name_(std::move(name)),
      entries_(std::move(entries)),
      lineage_(std::move(lineage)) {
  std::unordered_set<std::string_view> ids;
  for (const CompositionEntry& entry : entries_) {
    if (entry.dataset_id.empty()) {
      throw ValidationError("composition entry with empty dataset id");
    }
    if (!ids.insert(entry.dataset_id).second) {
      throw DuplicateDatasetError("dataset \"" + entry.dataset_id +
                                  "\" appears twice in composition \"" +
                                  name_ + "\"");
    }
  }
  content_hash_ = EntriesDigest(entries_);
}

bool Composition::Contains(std::string_view dataset_id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const CompositionEntry& e) {
                       return e.dataset_id == dataset_id;
                     });
}

std::vector<std::string> Composition::DatasetIds() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const CompositionEntry& entry : entries_) ids.push_back(entry.dataset_id);
  return ids;
}

std::string Composition::Serialize() const {
  json header = {{"format", kCompositionFormat},
                 {"name", name_},
                 {"content_hash", content_hash_},
                 {"lineage", LineageJson(lineage_)}};
  std::string out = header.dump();
  out += '\n';
  for (const CompositionEntry& entry : entries_) {
    out += EntryJson(entry).dump();
    out += '\n';
  }
  return out;
}

Composition Composition::Deserialize(std::string_view text) {
  const auto lines = internal::SplitLines(text);
  std::size_t i = 0;
  while (i < lines.size() && internal::IsBlank(lines[i])) ++i;
  if (i == lines.size()) throw ParseError("empty composition file");
  json header = ParseJsonLine(lines[i], "composition header");
  if (!header.is_object() || header.value("format", "") != kCompositionFormat) {
    throw ParseError("not a composition file (bad header)");
  }
  std::vector<CompositionEntry> entries;
  for (++i; i < lines.size(); ++i) {
    if (internal::IsBlank(lines[i])) continue;
    try {
      entries.push_back(EntryFromJson(ParseJsonLine(lines[i], "entry")));
    } catch (const json::exception& e) {
      throw ParseError(std::string("composition entry: ") + e.what());
    }
  }
  try {
    Composition composition(header.at("name").get<std::string>(),
                            std::move(entries),
                            LineageFromJson(header.at("lineage")));
    if (composition.content_hash() !=
        header.at("content_hash").get<std::string>()) {
      throw ParseError("composition digest mismatch for \"" +
                       composition.name() + "\"");
    }
    return composition;
  } catch (const json::exception& e) {
    throw ParseError(std::string("composition header: ") + e.what());
  }
}

Composition LoadComposition(const std::filesystem::path& path) {
  return Composition::Deserialize(internal::ReadFile(path));
}

void SaveComposition(const Composition& composition,
                     const std::filesystem::path& path) {
  internal::WriteFile(path, composition.Serialize());
}

Composition Compose(std::string name, const Composition* base,
                    std::span<const Addition> additions,
                    const Registry& registry) {
  std::vector<CompositionEntry> entries;
  if (base) entries = base->entries();
  Lineage lineage;
  lineage.parent_hash = base ? base->content_hash() : std::string();
  std::unordered_set<std::string> present;
  for (const CompositionEntry& entry : entries) present.insert(entry.dataset_id);
  for (const Addition& addition : additions) {
    const DatasetDescriptor* dataset = registry.Find(addition.dataset_id);
    if (!dataset) {
      throw UnknownDatasetError("unknown dataset \"" + addition.dataset_id +
                                "\"");
    }
    if (!present.insert(addition.dataset_id).second) {
      throw DuplicateDatasetError("dataset \"" + addition.dataset_id +
                                  "\" is already in the composition");
    }
    if (!addition.take.is_all() &&
        *addition.take.count > dataset->record_count) {
      throw SizeError("take " + std::to_string(*addition.take.count) +
                      " exceeds the " + std::to_string(dataset->record_count) +
                      " records of \"" + addition.dataset_id + "\"");
    }
    entries.push_back({addition.dataset_id, addition.take, {}});
    lineage.added_ids.push_back(addition.dataset_id);
  }
  return Composition(std::move(name), std::move(entries), std::move(lineage));
}

Composition BuildImprovedBaseline(const Composition& llava665k,
                                  std::string_view sharegpt4v_id) {
  std::vector<CompositionEntry> entries = llava665k.entries();
  auto it = std::find_if(entries.begin(), entries.end(),
                         [](const CompositionEntry& e) {
                           return e.tag == kDetailDescriptionTag;
                         });
  if (it == entries.end()) {
    throw MissingSplitError("composition \"" + llava665k.name() +
                            "\" has no detail-description entry");
  }
  Lineage lineage{llava665k.content_hash(), {std::string(sharegpt4v_id)},
                  {it->dataset_id}};
  *it = CompositionEntry{std::string(sharegpt4v_id), Take::All(), {}};
  return Composition(llava665k.name() + "+sharegpt4v", std::move(entries),
                     std::move(lineage));
}

// ---------------------------------------------------------------------------
// Subsets

std::string SubsetManifest::Serialize() const {
  std::string body;
  for (const std::string& id : record_ids) {
    body += id;
    body += '\n';
  }
  json header = {{"format", kSubsetFormat},
                 {"corpus", corpus_id},
                 {"seed", seed},
                 {"size", record_ids.size()},
                 {"digest", Sha256Hex(body)}};
  return header.dump() + "\n" + body;
}

SubsetManifest SubsetManifest::Deserialize(std::string_view text) {
  const std::size_t newline = text.find('\n');
  if (newline == std::string_view::npos) {
    throw ParseError("subset manifest has no header");
  }
  json header = ParseJsonLine(text.substr(0, newline), "subset header");
  if (!header.is_object() || header.value("format", "") != kSubsetFormat) {
    throw ParseError("not a subset manifest");
  }
  const std::string_view body = text.substr(newline + 1);
  if (Sha256Hex(body) != header.value("digest", "")) {
    throw ParseError("subset manifest digest mismatch");
  }
  SubsetManifest manifest;
  try {
    manifest.corpus_id = header.at("corpus").get<std::string>();
    manifest.seed = header.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("subset header: ") + e.what());
  }
  for (std::string_view line : internal::SplitLines(body)) {
    manifest.record_ids.emplace_back(line);
  }
  if (manifest.record_ids.size() != header.value("size", std::size_t{0})) {
    throw ParseError("subset manifest size mismatch");
  }
  return manifest;
}

SubsetManifest SampleSubset(std::span<const std::string> corpus_ids,
                            const SubsetSpec& spec) {
  if (spec.size == 0) throw SizeError("subset size must be positive");
  if (spec.size > corpus_ids.size()) {
    throw SizeError("subset size " + std::to_string(spec.size) +
                    " exceeds corpus \"" + spec.corpus_id + "\" of " +
                    std::to_string(corpus_ids.size()) + " records");
  }
  std::vector<std::pair<std::uint64_t, std::string_view>> keyed;
  keyed.reserve(corpus_ids.size());
  std::unordered_set<std::string_view> seen;
  seen.reserve(corpus_ids.size());
  for (const std::string& id : corpus_ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate record id \"" + id + "\" in corpus \"" +
                            spec.corpus_id + "\"");
    }
    keyed.emplace_back(SubsetKey(spec.seed, id), id);
  }
  const auto middle = keyed.begin() + static_cast<std::ptrdiff_t>(spec.size);
  std::partial_sort(keyed.begin(), middle, keyed.end());

  SubsetManifest manifest;
  manifest.corpus_id = spec.corpus_id;
  manifest.seed = spec.seed;
  manifest.record_ids.reserve(spec.size);
  for (auto it = keyed.begin(); it != middle; ++it) {
    manifest.record_ids.emplace_back(it->second);
  }
  return manifest;
}

std::vector<std::string> LoadCorpusIds(const std::filesystem::path& path) {
  const std::string text = internal::ReadFile(path);
  std::vector<std::string> ids;
  const auto lines = internal::SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = internal::Trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '{') {
      json obj = ParseJsonLine(line, "corpus line " + std::to_string(i + 1));
      if (!obj.is_object() || !obj.contains("id")) {
        throw ParseError("corpus line " + std::to_string(i + 1) +
                         " has no \"id\"");
      }
      ids.push_back(IdFromJson(obj["id"]));
    } else {
      ids.emplace_back(line);
    }
  }
  return ids;
}

// ---------------------------------------------------------------------------
// Materialization

std::filesystem::path DatasetLocator::PathFor(
    std::string_view dataset_id) const {
  return data_dir / (std::string(dataset_id) + ".jsonl");
}

std::size_t Materialize(const Composition& composition,
                        const DatasetLocator& locator,
                        std::uint64_t shuffle_seed,
                        const std::filesystem::path& out,
                        const Registry* registry) {
  struct Keyed {
    std::uint64_t key;
    std::string_view dataset;
    const SampleRecord* record;
  };

  // Sources are read concurrently; results are consumed in entry order.
  std::vector<std::future<IngestResult>> loads;
  for (const CompositionEntry& entry : composition.entries()) {
    const auto path = locator.PathFor(entry.dataset_id);
    if (!std::filesystem::exists(path)) {
      throw UnknownDatasetError("no source file for dataset \"" +
                                entry.dataset_id + "\" at " + path.string());
    }
    IngestOptions options;
    if (registry) {
      const DatasetDescriptor* d = registry->Find(entry.dataset_id);
      options.text_only = d && d->category.name == kTextOnlyCategory;
    }
    loads.push_back(std::async(std::launch::async, [path, id = entry.dataset_id,
                                                    options] {
      return Ingest(path, id, options);
    }));
  }
  std::vector<IngestResult> sources;
  sources.reserve(loads.size());
  for (auto& load : loads) sources.push_back(load.get());

  std::vector<Keyed> selected;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const CompositionEntry& entry = composition.entries()[i];
    std::vector<Keyed> keyed;
    keyed.reserve(sources[i].records.size());
    for (const SampleRecord& record : sources[i].records) {
      keyed.push_back({PriorityKey(shuffle_seed, record.sample_id),
                       entry.dataset_id, &record});
    }
    auto by_key = [](const Keyed& a, const Keyed& b) {
      return std::tie(a.key, a.record->sample_id) <
             std::tie(b.key, b.record->sample_id);
    };
    if (!entry.take.is_all()) {
      const std::uint64_t take = *entry.take.count;
      if (take > keyed.size()) {
        throw SizeError("take " + std::to_string(take) + " exceeds the " +
                        std::to_string(keyed.size()) +
                        " valid records of \"" + entry.dataset_id + "\"");
      }
      const auto middle = keyed.begin() + static_cast<std::ptrdiff_t>(take);
      std::partial_sort(keyed.begin(), middle, keyed.end(), by_key);
      keyed.erase(middle, keyed.end());
    }
    selected.insert(selected.end(), keyed.begin(), keyed.end());
  }

  std::sort(selected.begin(), selected.end(),
            [](const Keyed& a, const Keyed& b) {
              return std::tie(a.key, a.dataset, a.record->sample_id) <
                     std::tie(b.key, b.dataset, b.record->sample_id);
            });
  std::string text;
  for (const Keyed& item : selected) {
    SampleRecord record = *item.record;
    record.source_dataset = std::string(item.dataset);
    text += SampleToLine(record);
    text += '\n';
  }
  internal::WriteFile(out, text);
  return selected.size();
}

}  // namespace sftmix
