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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "sftmix/corpus.h"

namespace {

void BM_SampleSubset(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("rec-" + std::to_string(i));
  sftmix::SubsetSpec spec{"bench", n / 10, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sftmix::SampleSubset(ids, spec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleSubset)->Arg(10'000)->Arg(200'000)->Unit(benchmark::kMillisecond);

}  // namespace
