/*
 * Copyright 2026 The fuzzqe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "fuzzqe/backward.hpp"
#include "fuzzqe/model.hpp"
#include "fuzzqe/verify.hpp"

namespace {

using namespace fuzzqe;

// One backward pass over a batch of a single structure, at the synthetic
// acceptance scale (d=32, K=6, 300 entities).
void BM_Backward(benchmark::State& state, const std::string& tag) {
  constexpr std::size_t kEntities = 300, kRelations = 6, kBatch = 128, kNeg = 32;
  ModelConfig config;
  config.dim = 32;
  config.num_bases = 6;
  const Parameters params = init_parameters(kEntities, kRelations, config, 5);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<EntityId> pick(0, kEntities - 1);
  std::vector<QueryNode> queries;
  for (std::size_t i = 0; i < kBatch; ++i) {
    queries.push_back(random_instance(rng, tag, kEntities, kRelations));
  }
  std::vector<TrainExample> batch;
  for (const auto& q : queries) {
    TrainExample ex{&q, pick(rng), {}};
    for (std::size_t k = 0; k < kNeg; ++k) ex.negatives.push_back(pick(rng));
    batch.push_back(std::move(ex));
  }
  for (auto _ : state) {
    auto result = backward(params, config, LossConfig{}, batch);
    benchmark::DoNotOptimize(result.loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kBatch));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Backward, 1p, std::string("1p"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Backward, 3p, std::string("3p"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Backward, 3in, std::string("3in"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Backward, pni, std::string("pni"))->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
