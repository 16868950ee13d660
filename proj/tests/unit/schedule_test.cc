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

#include "sftmix/schedule.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sftmix/error.h"
#include "support.h"

namespace sftmix {
namespace {

TrainConfig Thousand() {
  TrainConfig config = TrainConfig::UnfrozenDefaults();
  config.total_steps = 1000;
  return config;
}

TEST(ScheduleTest, WarmupStepsUseCeiling) {
  EXPECT_EQ(Thousand().warmup_steps(), 30u);
  TrainConfig config = Thousand();
  config.total_steps = 1001;
  EXPECT_EQ(config.warmup_steps(), 31u);
  config.warmup_frac = 0.0;
  EXPECT_EQ(config.warmup_steps(), 0u);
}

TEST(ScheduleTest, PeakAtEndOfWarmup) {
  const TrainConfig config = Thousand();
  EXPECT_EQ(LrAt(30, config, 2e-4), 2e-4);
}

TEST(ScheduleTest, MinLrAtEnd) {
  TrainConfig config = Thousand();
  EXPECT_EQ(LrAt(1000, config, 2e-4), 0.0);
  config.min_lr = 1e-6;
  EXPECT_EQ(LrAt(1000, config, 2e-4), 1e-6);
}

TEST(ScheduleTest, HalfwayThroughDecay) {
  const double expected = 2e-4 * 0.5 * (1.0 + std::cos(std::numbers::pi * 485.0 / 970.0));
  EXPECT_NEAR(LrAt(515, Thousand(), 2e-4), expected, 1e-9 * 1e-4);
  EXPECT_NEAR(LrAt(515, Thousand(), 2e-4) / 1e-4, 1.0, 1e-9);
}

TEST(ScheduleTest, WarmupStartsAboveZero) {
  EXPECT_DOUBLE_EQ(LrAt(0, Thousand(), 2e-4), 2e-4 / 30.0);
  EXPECT_DOUBLE_EQ(LrAt(14, Thousand(), 2e-4), 2e-4 * 15.0 / 30.0);
}

TEST(ScheduleTest, ContinuousAtBoundary) {
  const TrainConfig config = Thousand();
  EXPECT_NEAR(LrAt(29, config, 2e-4), LrAt(30, config, 2e-4), 1e-12);
}

TEST(ScheduleTest, OutOfRange) {
  EXPECT_THROW(LrAt(1001, Thousand(), 2e-4), RangeError);
}

TEST(ScheduleTest, Properties) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    TrainConfig config = TrainConfig::UnfrozenDefaults();
    config.total_steps = std::uniform_int_distribution<std::uint64_t>(1, 5000)(rng);
    config.warmup_frac = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    config.min_lr = std::uniform_real_distribution<double>(0.0, 1e-6)(rng);
    const double peak = 2e-5;
    const std::uint64_t warmup = config.warmup_steps();
    double previous = peak;
    for (std::uint64_t step = 0; step <= config.total_steps; ++step) {
      const double lr = LrAt(step, config, peak);
      EXPECT_GE(lr, config.min_lr);
      EXPECT_LE(lr, peak);
      if (step >= warmup) {
        EXPECT_LE(lr, previous);
        previous = lr;
      }
    }
  }
}

TEST(TrainConfigTest, UnfrozenDefaults) {
  const std::string text = SerializeTrainConfig(TrainConfig::UnfrozenDefaults());
  EXPECT_NE(text.find("lr_vision = 2e-5"), std::string::npos) << text;
  EXPECT_NE(text.find("lr_adapter = 2e-4"), std::string::npos) << text;
}

TEST(TrainConfigTest, FrozenHasNoVisionRate) {
  const TrainConfig frozen = TrainConfig::FrozenDefaults();
  EXPECT_FALSE(frozen.lr_vision.has_value());
  EXPECT_EQ(frozen.lr_adapter, 1e-3);
  const std::string text = SerializeTrainConfig(frozen);
  EXPECT_EQ(text.find("lr_vision"), std::string::npos) << text;
  EXPECT_NE(text.find("lr_adapter = 1e-3"), std::string::npos) << text;
}

TEST(TrainConfigTest, EmitThenLoad) {
  testing::TempDir dir;
  for (TrainConfig config : {TrainConfig::UnfrozenDefaults(), TrainConfig::FrozenDefaults()}) {
    config.total_steps = 5197;
    config.min_lr = 1.25e-7;
    config.peak_lr_llm = 0.1 + 0.2;
    EmitTrainConfig(config, dir / "train.cfg");
    EXPECT_EQ(LoadTrainConfig(dir / "train.cfg"), config);
  }
}

TEST(TrainConfigTest, Validation) {
  TrainConfig config = TrainConfig::UnfrozenDefaults();
  config.warmup_frac = 1.5;
  EXPECT_THROW(config.Validate(), ValidationError);
  config = TrainConfig::UnfrozenDefaults();
  config.total_steps = 0;
  EXPECT_THROW(config.Validate(), ValidationError);
  config = TrainConfig::UnfrozenDefaults();
  config.lr_adapter = 0.0;
  EXPECT_THROW(config.Validate(), ValidationError);
}

TEST(TrainConfigTest, BadFileIsParseError) {
  EXPECT_THROW(ParseTrainConfig("lr_adapter = 1e-3\n"), ParseError);
  EXPECT_THROW(ParseTrainConfig("# sftmix train config v1\nbogus = 1\n"), ParseError);
}

}  // namespace
}  // namespace sftmix
