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

#include "sftmix/metrics.h"

#include <gtest/gtest.h>

#include <random>

#include "sftmix/error.h"
#include "support.h"

namespace sftmix {
namespace {

using testing::Scores;

TEST(NormalizeTest, MmeEndpoints) {
  EXPECT_EQ(Normalize("MME", 0.0), 0.0);
  EXPECT_EQ(Normalize("MME", 2000.0), 100.0);
}

TEST(NormalizeTest, ReferenceMmeValue) {
  EXPECT_NEAR(Normalize("MME", 1772.2), 1772.2 / 2000.0 * 100.0, 1e-12);
  EXPECT_NEAR(Normalize("MME", 1772.2), 88.61, 1e-9);
}

TEST(NormalizeTest, PercentageBenchmarksAreIdentity) {
  // Reference baseline scores.
  EXPECT_EQ(Normalize("MMBench-dev", 64.1), 64.1);
  EXPECT_EQ(Normalize("ScienceQA-I", 70.0), 70.0);
  EXPECT_EQ(Normalize("SEED-I", 65.1), 65.1);
}

TEST(NormalizeTest, OutOfRangeIsRangeError) {
  EXPECT_THROW(Normalize("MME", -1.0), RangeError);
  EXPECT_THROW(Normalize("MME", 2000.5), RangeError);
  EXPECT_THROW(Normalize("SEED-I", 100.01), RangeError);
  EXPECT_THROW(Normalize("SEED-I", std::nan("")), RangeError);
}

TEST(NormalizeTest, CustomDenominator) {
  ComparisonPolicy policy;
  policy.mme_denominator = 2800.0;
  EXPECT_EQ(Normalize("MME", 2800.0, policy), 100.0);
  EXPECT_EQ(Normalize("MME", 1400.0, policy), 50.0);
}

TEST(NormalizeTest, MonotoneAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mme(0.0, 2000.0);
  for (int i = 0; i < 10000; ++i) {
    double a = mme(rng), b = mme(rng);
    if (a > b) std::swap(a, b);
    const double na = Normalize("MME", a), nb = Normalize("MME", b);
    EXPECT_LE(na, nb);
    EXPECT_GE(na, 0.0);
    EXPECT_LE(nb, 100.0);
  }
}

TEST(AverageTest, AllFifty) {
  EXPECT_EQ(Average(Scores(1000.0, 50.0, 50.0, 50.0)), 50.0);
}

TEST(AverageTest, ReferenceBaselineRow) {
  const double expected = (1772.2 / 2000.0 * 100.0 + 64.1 + 70.0 + 65.1) / 4.0;
  EXPECT_NEAR(Average(testing::ReferenceBaselineRow()), expected, 1e-12);
  EXPECT_NEAR(Average(testing::ReferenceBaselineRow()), 71.9525, 1e-9);
}

TEST(AverageTest, MissingBenchmark) {
  ScoreVector v = testing::ReferenceBaselineRow();
  v.raw.erase("SEED-I");
  EXPECT_THROW(Average(v), MissingBenchmarkError);
  EXPECT_FALSE(v.HasCore());
}

TEST(AverageTest, ExtraBenchmarksIgnored) {
  ScoreVector v = testing::ReferenceBaselineRow();
  v.raw["POPE"] = 86.0;
  EXPECT_EQ(Average(v), Average(testing::ReferenceBaselineRow()));
}

TEST(CompareTest, EqualVectorsAcceptWithZeroMargin) {
  const Comparison c = Compare(testing::ReferenceBaselineRow(), testing::ReferenceBaselineRow());
  EXPECT_EQ(c.verdict, Verdict::kAccept);
  EXPECT_EQ(c.margin, 0.0);
}

TEST(CompareTest, SelectedMixtureRowAgainstAll) {
  const Comparison c = Compare(testing::SelectedMixtureRow(), testing::AllDataRow());
  EXPECT_EQ(c.verdict, Verdict::kAccept);
  EXPECT_GT(c.margin, 0.0);
  const double ours = (1818.7 / 20.0 + 73.0 + 81.6 + 69.9) / 4.0;
  const double all = (1790.0 / 20.0 + 70.5 + 80.1 + 70.0) / 4.0;
  EXPECT_NEAR(c.margin, ours - all, 1e-9);
}

TEST(CompareTest, JustOutsideTolerance) {
  // Average 70.0 against 69.4.
  const Comparison c = Compare(Scores(1400.0, 70.0, 70.0, 67.6), Scores(1400.0, 70.0, 70.0, 70.0));
  EXPECT_EQ(c.verdict, Verdict::kReject);
  EXPECT_NEAR(c.margin, -0.6, 1e-12);
}

TEST(CompareTest, ExactlyAtToleranceAccepts) {
  const Comparison c = Compare(Scores(1000.0, 50.0, 50.0, 48.0), Scores(1000.0, 50.0, 50.0, 50.0));
  EXPECT_EQ(c.margin, -0.5);
  EXPECT_EQ(c.verdict, Verdict::kAccept);
}

TEST(CompareTest, Properties) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pct(10.0, 90.0);
  std::uniform_real_distribution<double> mme(200.0, 1800.0);
  std::uniform_real_distribution<double> eps(0.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    ComparisonPolicy policy;
    policy.epsilon = eps(rng);
    const ScoreVector a = Scores(mme(rng), pct(rng), pct(rng), pct(rng));
    const ScoreVector b = Scores(mme(rng), pct(rng), pct(rng), pct(rng));
    // Reflexive acceptance.
    EXPECT_EQ(Compare(a, a, policy).verdict, Verdict::kAccept);
    // Antisymmetric margin.
    EXPECT_NEAR(Compare(a, b, policy).margin, -Compare(b, a, policy).margin, 1e-12);
    // A common shift of every normalized score leaves the verdict alone
    // (checked away from the threshold to stay clear of rounding).
    const Comparison base = Compare(a, b, policy);
    if (std::abs(base.margin + policy.epsilon) < 1e-9) continue;
    const double c = 5.0;
    const ScoreVector a2 = Scores(a.Raw("MME") + c * 20.0, a.Raw("MMBench-dev") + c,
                                  a.Raw("ScienceQA-I") + c, a.Raw("SEED-I") + c);
    const ScoreVector b2 = Scores(b.Raw("MME") + c * 20.0, b.Raw("MMBench-dev") + c,
                                  b.Raw("ScienceQA-I") + c, b.Raw("SEED-I") + c);
    EXPECT_EQ(Compare(a2, b2, policy).verdict, base.verdict);
  }
}

TEST(PolicyTest, Validation) {
  ComparisonPolicy policy;
  EXPECT_NO_THROW(policy.Validate());
  policy.epsilon = -0.1;
  EXPECT_THROW(policy.Validate(), ValidationError);
  policy.epsilon = 0.5;
  policy.mme_denominator = 0.0;
  EXPECT_THROW(policy.Validate(), ValidationError);
}

TEST(ScoreFileTest, RoundTrip) {
  ScoreVector v = testing::ReferenceBaselineRow();
  v.provenance = "abc123";
  EXPECT_EQ(ParseScores(SerializeScores(v)), v);
}

TEST(ScoreFileTest, ParsesRecords) {
  const ScoreVector v = ParseScores(
      "{\"benchmark\":\"MME\",\"raw\":1772.2}\n"
      "{\"benchmark\":\"SEED-I\",\"raw\":65.1}\n");
  EXPECT_EQ(v.Raw("MME"), 1772.2);
  EXPECT_EQ(v.Raw("SEED-I"), 65.1);
  EXPECT_FALSE(v.Has("MMBench-dev"));
}

TEST(ScoreFileTest, MalformedIsParseError) {
  EXPECT_THROW(ParseScores("{\"benchmark\":\"MME\"}\n"), ParseError);
  EXPECT_THROW(ParseScores("garbage\n"), ParseError);
}

}  // namespace
}  // namespace sftmix
