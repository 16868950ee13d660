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

#include "support.h"

#include <openssl/sha.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sftmix::testing {

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "sftmix-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed");
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SampleRecord MakeSample(const std::string& id, int turns, int words_per_turn,
                        int images) {
  SampleRecord record;
  record.sample_id = id;
  for (int i = 0; i < images; ++i) {
    record.images.push_back(id + "-" + std::to_string(i) + ".jpg");
  }
  for (int t = 0; t < turns; ++t) {
    std::string text;
    for (int w = 0; w < words_per_turn; ++w) {
      if (w) text += ' ';
      text += "w" + std::to_string(w);
    }
    record.turns.push_back({t % 2 == 0 ? Role::kHuman : Role::kAssistant, text});
  }
  return record;
}

std::string SampleJsonLine(const std::string& id,
                           const std::vector<std::string>& roles, int images) {
  std::string line = "{\"id\":\"" + id + "\",\"image\":[";
  for (int i = 0; i < images; ++i) {
    line += (i ? ",\"" : "\"") + id + "-" + std::to_string(i) + ".jpg\"";
  }
  line += "],\"conversations\":[";
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i) line += ',';
    line += "{\"from\":\"" + roles[i] + "\",\"value\":\"turn " +
            std::to_string(i) + " of " + id + "\"}";
  }
  return line + "]}";
}

ScoreVector Scores(double mme, double mmbench, double sqa, double seed) {
  ScoreVector v;
  v.raw["MME"] = mme;
  v.raw["MMBench-dev"] = mmbench;
  v.raw["ScienceQA-I"] = sqa;
  v.raw["SEED-I"] = seed;
  return v;
}

ScoreVector ReferenceBaselineRow() { return Scores(1772.2, 64.1, 70.0, 65.1); }
ScoreVector SelectedMixtureRow() { return Scores(1818.7, 73.0, 81.6, 69.9); }
ScoreVector AllDataRow() { return Scores(1790.0, 70.5, 80.1, 70.0); }

namespace {

const std::vector<std::string> kBench = {"MME", "MMBench-dev", "ScienceQA-I",
                                         "SEED-I"};

// MME steps of 2000/512 raw are 0.1953125 normalized points; the others use
// steps of 0.125. Both are exact binary fractions.
constexpr double kMmeStep = 2000.0 / 512.0;
constexpr double kStep = 0.125;

}  // namespace

RandomInstance MakeRandomInstance(std::mt19937_64& rng, int min_categories,
                                  int max_categories, int min_candidates,
                                  int max_candidates) {
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const int n_categories = uniform(min_categories, max_categories);
  Taxonomy taxonomy;
  for (int c = 0; c < n_categories; ++c) {
    taxonomy.push_back({"cat" + std::to_string(c), c});
  }

  RandomInstance instance;
  instance.spec.kind = EvaluatorKind::kOracle;
  instance.spec.oracle.base_scores = Scores(1000.0, 50.0, 50.0, 50.0);
  auto random_row = [&] {
    BenchmarkDeltas row;
    row["MME"] = kMmeStep * uniform(-3, 2);
    for (std::size_t b = 1; b < kBench.size(); ++b) {
      row[kBench[b]] = kStep * uniform(-12, 6);
    }
    return row;
  };

  std::vector<DatasetDescriptor> datasets;
  for (const Category& category : taxonomy) {
    const int n = uniform(min_candidates, max_candidates);
    for (int i = 0; i < n; ++i) {
      DatasetDescriptor d;
      d.id = category.name + "-d" + std::to_string(i);
      d.display_name = d.id;
      d.category = category;
      d.record_count = static_cast<std::uint64_t>(uniform(0, 1000));
      datasets.push_back(d);
      instance.spec.oracle.deltas[d.id] = random_row();
    }
  }
  // Manifest order is shuffled so registry order differs from id order.
  std::shuffle(datasets.begin(), datasets.end(), rng);
  instance.registry = Registry(taxonomy, datasets);

  std::vector<CompositionEntry> base;
  const int n_base = uniform(0, 3);
  for (int i = 0; i < n_base; ++i) {
    const std::string id = "base" + std::to_string(i);
    base.push_back({id, Take::All(), ""});
    instance.spec.oracle.deltas[id] = random_row();
  }
  instance.baseline = Composition("baseline", base);

  instance.order = taxonomy;
  std::shuffle(instance.order.begin(), instance.order.end(), rng);
  instance.order.resize(
      static_cast<std::size_t>(uniform(n_categories / 2, n_categories)));

  static const double kEpsilons[] = {0.0, 0.25, 0.5, 1.0};
  instance.policy.epsilon = kEpsilons[uniform(0, 3)];
  return instance;
}

std::vector<std::string> ReferenceIndividualSelect(
    const std::vector<std::string>& baseline_ids,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        rounds,
    const std::map<std::string, double>& base_raw,
    const std::map<std::string, std::map<std::string, double>>& deltas,
    double epsilon, double mme_denominator) {
  auto average_of = [&](const std::vector<std::string>& ids) {
    double total = 0.0;
    for (const std::string& b : kBench) {
      double raw = base_raw.at(b);
      for (const std::string& id : ids) {
        auto row = deltas.find(id);
        if (row == deltas.end()) continue;
        auto cell = row->second.find(b);
        if (cell != row->second.end()) raw += cell->second;
      }
      total += b == "MME" ? raw / mme_denominator * 100.0 : raw;
    }
    return total / 4.0;
  };

  std::vector<std::string> baseline = baseline_ids;
  for (const auto& [category, candidates] : rounds) {
    // Step 1: each candidate is tried alone on top of the frozen baseline.
    const double baseline_avg = average_of(baseline);
    std::vector<std::string> pool;
    for (const std::string& candidate : candidates) {
      std::vector<std::string> trial = baseline;
      trial.push_back(candidate);
      // Step 2: surpass or stay comparable.
      if (average_of(trial) >= baseline_avg - epsilon) pool.push_back(candidate);
    }
    // Step 3: the whole pool joins the baseline.
    baseline.insert(baseline.end(), pool.begin(), pool.end());
  }
  return baseline;
}

std::vector<std::string> ReferenceSelect(const RandomInstance& instance) {
  std::vector<std::string> baseline_ids;
  for (const auto& entry : instance.baseline.entries()) {
    baseline_ids.push_back(entry.dataset_id);
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> rounds;
  for (const Category& category : instance.order) {
    std::vector<std::string> ids;
    for (const DatasetDescriptor& d : instance.registry.datasets()) {
      if (d.category.name == category.name && !d.superseded) {
        ids.push_back(d.id);
      }
    }
    rounds.emplace_back(category.name, ids);
  }
  std::map<std::string, double> base(
      instance.spec.oracle.base_scores.raw.begin(),
      instance.spec.oracle.base_scores.raw.end());
  std::map<std::string, std::map<std::string, double>> deltas;
  for (const auto& [id, row] : instance.spec.oracle.deltas) {
    deltas[id] = std::map<std::string, double>(row.begin(), row.end());
  }
  return ReferenceIndividualSelect(baseline_ids, rounds, base, deltas,
                                   instance.policy.epsilon,
                                   instance.policy.mme_denominator);
}

std::vector<std::size_t> ReferencePackGroups(
    const std::vector<std::uint64_t>& lengths, std::uint64_t max_len) {
  std::vector<std::size_t> groups;
  std::uint64_t fill = 0;
  for (std::uint64_t length : lengths) {
    if (!groups.empty() && fill + length <= max_len) {
      ++groups.back();
      fill += length;
    } else {
      groups.push_back(1);
      fill = length;
    }
  }
  return groups;
}

std::uint64_t ReferencePriority(std::uint64_t seed, const std::string& id) {
  const std::string message = std::to_string(seed) + ":" + id;
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(message.data()),
         message.size(), digest);
  std::uint64_t key = 0;
  for (int i = 0; i < 8; ++i) key = (key << 8) | digest[i];
  return key;
}

std::uint64_t ReferenceSubsetKey(std::uint64_t seed, const std::string& id) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(id.data()), id.size(), digest);
  std::uint64_t key = 0;
  for (int i = 0; i < 8; ++i) key = (key << 8) | digest[i];
  const unsigned __int128 step =
      static_cast<unsigned __int128>(seed) * 0x9E3779B97F4A7C15ull;
  return static_cast<std::uint64_t>((key + step) & ~0ull);
}

}  // namespace sftmix::testing
