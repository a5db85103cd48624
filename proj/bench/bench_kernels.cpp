// Copyright 2026 The awekws Authors.
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

#include "awekws/embedders.hpp"
#include "awekws/kws.hpp"
#include "awekws/synthetic.hpp"

using namespace awekws;

namespace {

struct Fixture {
  std::vector<KeywordTemplateSet> keywords;
  Corpus search;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    SyntheticConfig cfg;
    cfg.n_types = 5;
    const SyntheticLanguage lang(cfg);
    Rng rng(1);
    Fixture out;
    out.keywords = templates_from_segments(extract_segments(lang.isolated_words(2, {0, 1}, "t", rng)));
    out.search = lang.sentences(24, 3, 5, {2, 3}, "u", rng);
    return out;
  }();
  return f;
}

void BM_SearchReference(benchmark::State& state) {
  const auto& f = fixture();
  const MeanpoolEmbedder embedder;
  for (auto _ : state) benchmark::DoNotOptimize(search_reference(f.keywords, f.search, embedder, WindowConfig{}));
}

void BM_Search(benchmark::State& state) {
  const auto& f = fixture();
  const MeanpoolEmbedder embedder;
  SearchOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search(f.keywords, f.search, embedder, WindowConfig{}, options));
}

void BM_DtwSearchReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(dtw_search_all_reference(f.keywords, f.search));
}

void BM_DtwSearch(benchmark::State& state) {
  const auto& f = fixture();
  SearchOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dtw_search_all(f.keywords, f.search, options));
}

}  // namespace

BENCHMARK(BM_SearchReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Search)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DtwSearchReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DtwSearch)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
