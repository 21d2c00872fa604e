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

#ifndef FUZZQE_TRAINER_HPP_
#define FUZZQE_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fuzzqe/evaluator.hpp"
#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/loss.hpp"
#include "fuzzqe/model.hpp"
#include "fuzzqe/optimizer.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

struct TrainConfig {
  std::size_t batch_size = 512;
  std::size_t k_neg = 128;
  double gamma = 0.375;
  double lr = 1e-3;
  double weight_decay = 0.01;
  std::size_t max_steps = 450000;
  std::size_t patience_steps = 15000;
  std::size_t eval_every = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> structures = {"1p", "2p", "3p", "2i", "3i",
                                         "2in", "3in", "inp", "pin", "pni"};
  double zq_eps = 1e-9;
  std::size_t threads = 1;

  // Throws ConfigError.
  void validate() const;
  LossConfig loss() const { return {gamma, zq_eps}; }
  AdamWConfig optimizer() const;
};

struct TrainState {
  std::size_t step = 0;
  double best_valid = -1.0;
  std::size_t best_step = 0;
  std::size_t steps_since_improvement = 0;
  // Loss accumulated since the last evaluation point.
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  std::mt19937_64 rng;
};

struct TrainResult {
  Parameters best_params;
  TrainState state;
  bool early_stopped = false;
};

// k uniform draws from E rejecting `answers` (sorted); duplicates allowed.
// Throws DataError when the answers cover every entity.
std::vector<EntityId> sample_negatives(std::mt19937_64& rng, std::size_t num_entities,
                                       std::span<const EntityId> answers, std::size_t k);
// Same, with the answers of `q` on the Train view.
std::vector<EntityId> sample_negatives(std::mt19937_64& rng, const KnowledgeGraph& kg,
                                       const QueryNode& q, std::size_t k);

// One 1p query per (head, relation) pair with outgoing edges in `view`,
// its answers on that view stored in `easy`.
std::vector<LabeledQuery> make_1p_queries(const KnowledgeGraph& kg, GraphView view);

struct TrainOptions {
  bool resume = false;
  // Starting point; random initialization from the seed when empty.
  std::optional<Parameters> init;
  // Invoked after each evaluation point with the log record.
  std::function<void(const nlohmann::ordered_json&)> on_eval;
};

// Round-robin single-structure batches, AdamW updates, validation every
// eval_every steps, best/last checkpoints and early stopping. Writes
// best.ckpt, last.ckpt, optimizer.state, train_state.json and
// train_log.jsonl under `out_dir`.
TrainResult train(const TrainConfig& config, const ModelConfig& model,
                  const KnowledgeGraph& kg, const QueriesByTag& train_queries,
                  const QueriesByTag& valid_queries, const std::filesystem::path& out_dir,
                  const TrainOptions& options = {});

// Mean MRR over the structures present in a report.
double average_mrr(const EvalReport& report);

}  // namespace fuzzqe

#endif  // FUZZQE_TRAINER_HPP_
