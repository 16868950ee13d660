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

#ifndef SFTMIX_SCHEDULE_H_
#define SFTMIX_SCHEDULE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace sftmix {

// Learning-rate setup of one training stage. When the vision encoder is
// frozen it gets no learning rate at all.
struct TrainConfig {
  std::optional<double> lr_vision = 2e-5;
  double lr_adapter = 2e-4;
  bool vision_frozen = false;
  double peak_lr_llm = 2e-5;
  std::uint64_t total_steps = 1;
  double warmup_frac = 0.03;
  double min_lr = 0.0;

  // Unfrozen encoder: vision 2e-5, adapter 2e-4.
  static TrainConfig UnfrozenDefaults();
  // Frozen encoder: no vision rate, adapter 1e-3.
  static TrainConfig FrozenDefaults();

  std::uint64_t warmup_steps() const;
  void Validate() const;  // throws ValidationError

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Linear warmup over ceil(warmup_frac * total_steps) steps, rising from
// min_lr + (peak - min_lr) / warmup_steps at step 0, followed by cosine
// decay from peak to min_lr over the remaining steps. lr_at(warmup_steps)
// is peak and lr_at(total_steps) is min_lr, exactly. Throws RangeError when step is outside [0, total_steps]
// or peak < min_lr.
double LrAt(std::uint64_t step, const TrainConfig& config, double peak);

// Flat "key = value" text with a versioned header line. Frozen configs omit
// lr_vision.
std::string SerializeTrainConfig(const TrainConfig& config);
TrainConfig ParseTrainConfig(std::string_view text);  // throws ParseError
void EmitTrainConfig(const TrainConfig& config,
                     const std::filesystem::path& out);
TrainConfig LoadTrainConfig(const std::filesystem::path& path);

}  // namespace sftmix

#endif  // SFTMIX_SCHEDULE_H_
