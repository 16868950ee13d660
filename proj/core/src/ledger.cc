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

#include "sftmix/ledger.h"

#include <chrono>
#include <ctime>
#include <string>
#include <utility>

#include "json.hpp"
#include "sftmix/digest.h"
#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json ScoresJson(const ScoreVector& scores) {
  json raw = json::object();
  for (const auto& [benchmark, value] : scores.raw) raw[benchmark] = value;
  return {{"raw", std::move(raw)}, {"provenance", scores.provenance}};
}

ScoreVector ScoresFromJson(const json& obj) {
  ScoreVector scores;
  for (const auto& [benchmark, value] : obj.at("raw").items()) {
    scores.raw[benchmark] = value.get<double>();
  }
  scores.provenance = obj.at("provenance").get<std::string>();
  return scores;
}

Verdict VerdictFromName(const std::string& name) {
  if (name == "accept") return Verdict::kAccept;
  if (name == "reject") return Verdict::kReject;
  throw LedgerCorruptError("unknown verdict \"" + name + "\"");
}

struct ToJson {
  json operator()(const RunHeader& h) const {
    json taxonomy = json::array();
    for (const Category& c : h.registry.taxonomy()) taxonomy.push_back(c.name);
    return {{"type", "header"},
            {"run_id", h.run_id},
            {"policy",
             {{"mode", "average"},
              {"epsilon", h.policy.epsilon},
              {"mme_denominator", h.policy.mme_denominator}}},
            {"order", h.order},
            {"baseline", h.baseline.Serialize()},
            {"taxonomy", std::move(taxonomy)},
            {"registry", h.registry.ToManifest()},
            {"evaluator_fingerprint", h.evaluator_fingerprint},
            {"created", h.created}};
  }
  json operator()(const RoundStart& r) const {
    return {{"type", "round_start"},
            {"category", r.category},
            {"baseline_hash", r.baseline_hash},
            {"baseline_score", ScoresJson(r.baseline_score)},
            {"cached", r.cached}};
  }
  json operator()(const DecisionRecord& d) const {
    return {{"type", "decision"},
            {"candidate_id", d.candidate_id},
            {"category", d.category},
            {"baseline_hash", d.baseline_hash},
            {"candidate_score", ScoresJson(d.candidate_score)},
            {"baseline_score", ScoresJson(d.baseline_score)},
            {"verdict", VerdictName(d.verdict)},
            {"margin", d.margin},
            {"timestamp", d.timestamp},
            {"evaluator_fingerprint", d.evaluator_fingerprint}};
  }
  json operator()(const RoundEnd& r) const {
    return {{"type", "round_end"},
            {"category", r.category},
            {"accepted", r.accepted},
            {"new_baseline_hash", r.new_baseline_hash},
            {"new_baseline_size", r.new_baseline_size}};
  }
  json operator()(const RunFinal& f) const {
    return {{"type", "final"},
            {"baseline_hash", f.baseline_hash},
            {"score", ScoresJson(f.score)}};
  }
};

LedgerEntry EntryFromJson(const json& obj) {
  const auto type = obj.at("type").get<std::string>();
  if (type == "header") {
    RunHeader h;
    h.run_id = obj.at("run_id").get<std::string>();
    const json& policy = obj.at("policy");
    if (policy.at("mode").get<std::string>() != "average") {
      throw LedgerCorruptError("unsupported comparison mode");
    }
    h.policy.epsilon = policy.at("epsilon").get<double>();
    h.policy.mme_denominator = policy.at("mme_denominator").get<double>();
    h.order = obj.at("order").get<std::vector<std::string>>();
    h.baseline = Composition::Deserialize(obj.at("baseline").get<std::string>());
    Taxonomy taxonomy;
    int ordinal = 0;
    for (const json& name : obj.at("taxonomy")) {
      taxonomy.push_back({name.get<std::string>(), ordinal++});
    }
    h.registry = ParseRegistry(obj.at("registry").get<std::string>(), taxonomy);
    h.evaluator_fingerprint = obj.at("evaluator_fingerprint").get<std::string>();
    h.created = obj.at("created").get<std::string>();
    return h;
  }
  if (type == "round_start") {
    return RoundStart{obj.at("category").get<std::string>(),
                      obj.at("baseline_hash").get<std::string>(),
                      ScoresFromJson(obj.at("baseline_score")),
                      obj.at("cached").get<bool>()};
  }
  if (type == "decision") {
    DecisionRecord d;
    d.candidate_id = obj.at("candidate_id").get<std::string>();
    d.category = obj.at("category").get<std::string>();
    d.baseline_hash = obj.at("baseline_hash").get<std::string>();
    d.candidate_score = ScoresFromJson(obj.at("candidate_score"));
    d.baseline_score = ScoresFromJson(obj.at("baseline_score"));
    d.verdict = VerdictFromName(obj.at("verdict").get<std::string>());
    d.margin = obj.at("margin").get<double>();
    d.timestamp = obj.at("timestamp").get<std::string>();
    d.evaluator_fingerprint = obj.at("evaluator_fingerprint").get<std::string>();
    return d;
  }
  if (type == "round_end") {
    return RoundEnd{obj.at("category").get<std::string>(),
                    obj.at("accepted").get<std::vector<std::string>>(),
                    obj.at("new_baseline_hash").get<std::string>(),
                    obj.at("new_baseline_size").get<std::size_t>()};
  }
  if (type == "final") {
    return RunFinal{obj.at("baseline_hash").get<std::string>(),
                    ScoresFromJson(obj.at("score"))};
  }
  throw LedgerCorruptError("unknown record type \"" + type + "\"");
}

std::string ChainDigest(const std::string& prev, const std::string& record) {
  return Sha256Hex(prev + "\n" + record);
}

}  // namespace

std::string NowTimestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
  const std::time_t seconds = system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &utc);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf,
                static_cast<int>(ms.count()));
  return out;
}

LedgerContents ParseLedger(std::string_view text) {
  LedgerContents contents;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset < text.size()) {
    const std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) {
      contents.torn_tail = true;
      break;
    }
    ++line_no;
    const std::string_view line = text.substr(offset, end - offset);
    const std::string where = "ledger line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LedgerCorruptError(where + ": " + e.what());
    }
    try {
      const auto prev = obj.at("prev").get<std::string>();
      const auto digest = obj.at("digest").get<std::string>();
      const json& record = obj.at("record");
      if (prev != contents.last_digest) {
        throw LedgerCorruptError(where + ": hash chain broken");
      }
      if (ChainDigest(prev, record.dump()) != digest) {
        throw LedgerCorruptError(where + ": record digest mismatch");
      }
      LedgerEntry entry = EntryFromJson(record);
      const bool is_header = std::holds_alternative<RunHeader>(entry);
      if (is_header != contents.entries.empty()) {
        throw LedgerCorruptError(where + (is_header
                                              ? ": duplicate run header"
                                              : ": ledger must start with a "
                                                "run header"));
      }
      contents.entries.push_back(std::move(entry));
      contents.last_digest = digest;
    } catch (const LedgerCorruptError&) {
      throw;
    } catch (const std::exception& e) {
      throw LedgerCorruptError(where + ": " + e.what());
    }
    offset = end + 1;
  }
  contents.valid_bytes = offset;
  if (contents.entries.empty()) {
    throw LedgerCorruptError("ledger has no run header");
  }
  return contents;
}

LedgerContents ReadLedger(const fs::path& path) {
  return ParseLedger(internal::ReadFile(path));
}

LedgerWriter::LedgerWriter(fs::path path, std::string last_digest)
    : path_(std::move(path)), last_digest_(std::move(last_digest)) {
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw IoError("cannot open ledger " + path_.string());
}

LedgerWriter::LedgerWriter(LedgerWriter&& other) noexcept
    : path_(std::move(other.path_)),
      out_(std::move(other.out_)),
      last_digest_(std::move(other.last_digest_)) {}

LedgerWriter LedgerWriter::Create(const fs::path& path,
                                  const RunHeader& header) {
  if (fs::exists(path)) {
    throw IoError("ledger " + path.string() + " already exists");
  }
  LedgerWriter writer(path, "");
  writer.Write(header);
  return writer;
}

LedgerWriter LedgerWriter::Reopen(const fs::path& path) {
  LedgerContents contents = ReadLedger(path);
  if (contents.torn_tail) fs::resize_file(path, contents.valid_bytes);
  return LedgerWriter(path, contents.last_digest);
}

void LedgerWriter::Write(const LedgerEntry& entry) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::string record = std::visit(ToJson{}, entry).dump();
  const std::string digest = ChainDigest(last_digest_, record);
  // Keys are emitted in sorted order: digest, prev, record.
  std::string line = "{\"digest\":\"" + digest + "\",\"prev\":\"" +
                     last_digest_ + "\",\"record\":" + record + "}\n";
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw IoError("ledger write failed: " + path_.string());
  last_digest_ = digest;
}

}  // namespace sftmix
