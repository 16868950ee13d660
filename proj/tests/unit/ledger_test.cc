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

#include <gtest/gtest.h>

#include <thread>

#include "sftmix/digest.h"
#include "sftmix/error.h"
#include "json.hpp"
#include "support.h"

namespace sftmix {
namespace {

using nlohmann::json;

RunHeader Header() {
  RunHeader header;
  header.run_id = "r1";
  header.order = {"Captioning", "Science"};
  header.baseline = Composition("b", {{"x", Take::All(), ""}});
  header.registry = DefaultRegistry();
  header.evaluator_fingerprint = "fp";
  header.created = NowTimestamp();
  return header;
}

DecisionRecord Decision(const std::string& id) {
  return {id, "Captioning", "h0", testing::SelectedMixtureRow(), testing::AllDataRow(),
          Verdict::kAccept, 0.7, NowTimestamp(), "fp"};
}

TEST(LedgerTest, WriteThenRead) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    writer.Write(RoundStart{"Captioning", "h0", testing::AllDataRow(), false});
    writer.Write(Decision("a"));
    writer.Write(RoundEnd{"Captioning", {"a"}, "h1", 2});
  }
  const LedgerContents contents = ReadLedger(path);
  ASSERT_EQ(contents.entries.size(), 4u);
  EXPECT_FALSE(contents.torn_tail);
  const auto& header = std::get<RunHeader>(contents.entries[0]);
  EXPECT_EQ(header.run_id, "r1");
  EXPECT_EQ(header.registry, DefaultRegistry());
  EXPECT_EQ(header.baseline, Header().baseline);
  EXPECT_EQ(std::get<DecisionRecord>(contents.entries[2]).candidate_id, "a");
  EXPECT_EQ(std::get<DecisionRecord>(contents.entries[2]).candidate_score,
            testing::SelectedMixtureRow());
  EXPECT_EQ(std::get<RoundEnd>(contents.entries[3]).accepted,
            std::vector<std::string>{"a"});
}

TEST(LedgerTest, ChainLinksEveryLine) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    for (int i = 0; i < 5; ++i) writer.Write(Decision("d" + std::to_string(i)));
  }
  const std::string text = testing::ReadFile(path);
  std::string prev;
  std::size_t lines = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t end = text.find('\n', pos);
    const json line = json::parse(text.substr(pos, end - pos));
    EXPECT_EQ(line.at("prev").get<std::string>(), prev);
    const std::string digest =
        Sha256Hex(prev + "\n" + line.at("record").dump());
    EXPECT_EQ(line.at("digest").get<std::string>(), digest);
    prev = digest;
    pos = end + 1;
    ++lines;
  }
  EXPECT_EQ(lines, 6u);
}

TEST(LedgerTest, CreateRefusesExistingFile) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  LedgerWriter::Create(path, Header());
  EXPECT_THROW(LedgerWriter::Create(path, Header()), IoError);
}

TEST(LedgerTest, TornTailIsIgnoredAndTruncated) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    writer.Write(Decision("a"));
  }
  const std::string intact = testing::ReadFile(path);
  testing::WriteFile(path, intact + "{\"digest\":\"abc\",\"pre");
  const LedgerContents contents = ReadLedger(path);
  EXPECT_TRUE(contents.torn_tail);
  EXPECT_EQ(contents.entries.size(), 2u);
  EXPECT_EQ(contents.valid_bytes, intact.size());
  {
    LedgerWriter writer = LedgerWriter::Reopen(path);
    writer.Write(Decision("b"));
  }
  EXPECT_EQ(ReadLedger(path).entries.size(), 3u);
  EXPECT_FALSE(ReadLedger(path).torn_tail);
}

TEST(LedgerTest, TamperedLine) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    writer.Write(Decision("a"));
    writer.Write(Decision("b"));
  }
  std::string text = testing::ReadFile(path);
  text.replace(text.find("\"candidate_id\":\"a\""), 18, "\"candidate_id\":\"z\"");
  EXPECT_THROW(ParseLedger(text), LedgerCorruptError);
}

TEST(LedgerTest, DroppedLineBreaksChain) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    writer.Write(Decision("a"));
    writer.Write(Decision("b"));
  }
  std::string text = testing::ReadFile(path);
  const std::size_t first = text.find('\n') + 1;
  const std::size_t second = text.find('\n', first) + 1;
  text.erase(first, second - first);
  EXPECT_THROW(ParseLedger(text), LedgerCorruptError);
}

TEST(LedgerTest, EmptyOrHeaderless) {
  EXPECT_THROW(ParseLedger(""), LedgerCorruptError);
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    writer.Write(Decision("a"));
  }
  const std::string text = testing::ReadFile(path);
  EXPECT_THROW(ParseLedger(text.substr(text.find('\n') + 1)), LedgerCorruptError);
}

TEST(LedgerTest, ConcurrentWritersKeepChainIntact) {
  testing::TempDir dir;
  const auto path = dir / "ledger.jsonl";
  {
    LedgerWriter writer = LedgerWriter::Create(path, Header());
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&writer, t] {
        for (int i = 0; i < 25; ++i) {
          writer.Write(Decision("t" + std::to_string(t) + "-" + std::to_string(i)));
        }
      });
    }
    for (auto& thread : threads) thread.join();
  }
  EXPECT_EQ(ReadLedger(path).entries.size(), 101u);
}

}  // namespace
}  // namespace sftmix
