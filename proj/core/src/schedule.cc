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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "sftmix/error.h"
#include "text_util.h"

namespace sftmix {
namespace {

constexpr std::string_view kHeader = "# sftmix train config v1";

// Learning rates always print in shortest scientific form: 0.001 -> "1e-3".
std::string FormatRate(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(std::begin(buf), std::end(buf), value,
                                 std::chars_format::scientific);
  std::string text = ec == std::errc() ? std::string(buf, ptr)
                                       : internal::ShortestDouble(value);
  const std::size_t e = text.find('e');
  if (e == std::string::npos) return text;
  std::size_t digits = e + 1;
  if (digits < text.size() && (text[digits] == '-' || text[digits] == '+')) {
    ++digits;
  }
  while (digits + 1 < text.size() && text[digits] == '0') text.erase(digits, 1);
  return text;
}

double ParseDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ParseError("train config: \"" + key + "\" is not a number: " + value);
  }
}

}  // namespace

TrainConfig TrainConfig::UnfrozenDefaults() { return TrainConfig{}; }

TrainConfig TrainConfig::FrozenDefaults() {
  TrainConfig config;
  config.vision_frozen = true;
  config.lr_vision.reset();
  config.lr_adapter = 1e-3;
  return config;
}

std::uint64_t TrainConfig::warmup_steps() const {
  const double exact = warmup_frac * static_cast<double>(total_steps);
  const double nearest = std::round(exact);
  // 0.07 * 100 evaluates to 7.000000000000001; treat it as 7.
  const double steps = std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)
                           ? nearest
                           : std::ceil(exact);
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(steps),
                                 total_steps);
}

void TrainConfig::Validate() const {
  if (total_steps == 0) throw ValidationError("total_steps must be positive");
  if (!(warmup_frac >= 0.0 && warmup_frac <= 1.0)) {
    throw ValidationError("warmup_frac must lie in [0, 1]");
  }
  if (!(min_lr >= 0.0)) throw ValidationError("min_lr must be non-negative");
  if (!(lr_adapter > 0.0) || !(peak_lr_llm > 0.0)) {
    throw ValidationError("learning rates must be positive");
  }
  if (vision_frozen == lr_vision.has_value()) {
    throw ValidationError(vision_frozen
                              ? "a frozen vision encoder takes no lr_vision"
                              : "an unfrozen vision encoder needs lr_vision");
  }
  if (lr_vision && !(*lr_vision > 0.0)) {
    throw ValidationError("lr_vision must be positive");
  }
}

double LrAt(std::uint64_t step, const TrainConfig& config, double peak) {
  if (step > config.total_steps) {
    throw RangeError("step " + std::to_string(step) + " beyond total_steps " +
                     std::to_string(config.total_steps));
  }
  if (!(peak >= config.min_lr)) {
    throw RangeError("peak learning rate below min_lr");
  }
  const double floor = config.min_lr;
  const std::uint64_t warmup = config.warmup_steps();
  double lr;
  if (step < warmup) {
    // Ramps from the floor so that min_lr <= lr holds in warmup too; with
    // min_lr = 0 this is peak * (step + 1) / warmup.
    lr = floor + (peak - floor) * static_cast<double>(step + 1) /
                     static_cast<double>(warmup);
  } else {
    // Both ends of the decay are returned exactly.
    if (step == config.total_steps) return floor;
    if (step == warmup) return peak;
    const std::uint64_t decay = config.total_steps - warmup;
    const double progress =
        static_cast<double>(step - warmup) / static_cast<double>(decay);
    lr = floor +
         (peak - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
  }
  // Guards the last ulp so the endpoints are exact.
  return std::clamp(lr, floor, peak);
}

std::string SerializeTrainConfig(const TrainConfig& config) {
  config.Validate();
  std::string out(kHeader);
  out += '\n';
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).append("\n");
  };
  line("vision_frozen", config.vision_frozen ? "true" : "false");
  if (config.lr_vision) line("lr_vision", FormatRate(*config.lr_vision));
  line("lr_adapter", FormatRate(config.lr_adapter));
  line("peak_lr_llm", FormatRate(config.peak_lr_llm));
  line("total_steps", std::to_string(config.total_steps));
  line("warmup_frac", internal::ShortestDouble(config.warmup_frac));
  line("min_lr", FormatRate(config.min_lr));
  return out;
}

TrainConfig ParseTrainConfig(std::string_view text) {
  const auto lines = internal::SplitLines(text);
  if (lines.empty() || internal::Trim(lines.front()) != kHeader) {
    throw ParseError("train config: missing \"" + std::string(kHeader) +
                     "\" header");
  }
  std::map<std::string, std::string> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = internal::Trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("train config line " + std::to_string(i + 1) +
                       ": expected key = value");
    }
    std::string key(internal::Trim(line.substr(0, eq)));
    std::string value(internal::Trim(line.substr(eq + 1)));
    if (!values.emplace(key, value).second) {
      throw ParseError("train config: duplicate key \"" + key + "\"");
    }
  }

  TrainConfig config;
  config.lr_vision.reset();
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    std::string value = it->second;
    values.erase(it);
    return value;
  };
  auto require = [&](const std::string& key) {
    auto value = take(key);
    if (!value) throw ParseError("train config: missing \"" + key + "\"");
    return *value;
  };

  const std::string frozen = require("vision_frozen");
  if (frozen != "true" && frozen != "false") {
    throw ParseError("train config: vision_frozen must be true or false");
  }
  config.vision_frozen = frozen == "true";
  if (auto lr = take("lr_vision")) config.lr_vision = ParseDouble("lr_vision", *lr);
  config.lr_adapter = ParseDouble("lr_adapter", require("lr_adapter"));
  config.peak_lr_llm = ParseDouble("peak_lr_llm", require("peak_lr_llm"));
  const std::string steps = require("total_steps");
  if (steps.empty() ||
      steps.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("train config: total_steps must be a positive integer");
  }
  config.total_steps = std::stoull(steps);
  config.warmup_frac = ParseDouble("warmup_frac", require("warmup_frac"));
  config.min_lr = ParseDouble("min_lr", require("min_lr"));
  if (!values.empty()) {
    throw ParseError("train config: unknown key \"" + values.begin()->first +
                     "\"");
  }
  try {
    config.Validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("train config: ") + e.what());
  }
  return config;
}

void EmitTrainConfig(const TrainConfig& config,
                     const std::filesystem::path& out) {
  internal::WriteFile(out, SerializeTrainConfig(config));
}

TrainConfig LoadTrainConfig(const std::filesystem::path& path) {
  return ParseTrainConfig(internal::ReadFile(path));
}

}  // namespace sftmix
