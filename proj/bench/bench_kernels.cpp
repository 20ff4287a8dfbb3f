// Copyright 2026 FairLENS contributors
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


// Serial reference vs OpenMP kernels. Run with e.g. OMP_NUM_THREADS=8.
#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "fairlens/bootstrap.hpp"
#include "fairlens/synth.hpp"
#include "fairlens/wer.hpp"

namespace {

using namespace fairlens;

const SynthCorpus& corpus() {
  static const SynthCorpus c = [] {
    SynthSpec spec;
    spec.utterances_per_cell = 8;
    spec.min_tokens = 20;
    spec.max_tokens = 60;
    spec.models = {{"m", {0.1, 0.05, 0.05}, {}}};
    const AttributeSchema schema({{"Sex", {"Female", "Male"}},
                                  {"Age", {"Teen", "Adult", "Senior"}},
                                  {"Race", {"Asian", "Black", "Latinx", "White"}},
                                  {"Accent", {"Native", "Indian", "Chinese", "Spanish", "Other Accent"}}});
    return synthesize(schema, spec, 42);
  }();
  return c;
}

const std::vector<double>& sample() {
  static const std::vector<double> x = [] {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    std::vector<double> v(2000);
    for (auto& d : v) d = normal(rng);
    return v;
  }();
  return x;
}

double mean_of(std::span<const std::size_t> idx) {
  const auto& x = sample();
  double s = 0.0;
  for (auto i : idx) s += x[i];
  return s / static_cast<double>(idx.size());
}

void BM_AlignCorpusSerial(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(align_corpus_serial(c.corpus, c.models[0], {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.corpus.size()));
}

void BM_AlignCorpusParallel(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(align_corpus(c.corpus, c.models[0], {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.corpus.size()));
}

void BM_BootstrapSerial(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_replicates_serial(sample().size(), mean_of, b, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BootstrapParallel(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_replicates(sample().size(), mean_of, b, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_AlignCorpusSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AlignCorpusParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BootstrapParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
