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

#ifndef FUZZQE_LOSS_HPP_
#define FUZZQE_LOSS_HPP_

#include <span>
#include <vector>

#include "fuzzqe/fuzzy_logic.hpp"
#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/model.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

struct LossConfig {
  double gamma = 0.375;
  // Floor of the query-norm scale Z_q = max(||S_q||_2, zq_eps).
  double zq_eps = 1e-9;
};

//   L = -log sigma(phi(q,e)/Z_q - gamma)
//       - (1/k) sum_i log sigma(gamma - phi(q,e'_i)/Z_q)
// with Z_q = max(||S_q||_2, zq_eps). Throws on empty negatives or a
// non-finite result.
double margin_loss(std::span<const double> query_embedding,
                   std::span<const double> positive,
                   std::span<const std::span<const double>> negatives,
                   const LossConfig& config);

double margin_loss(const FuzzyVec& query_embedding, const FuzzyVec& positive,
                   std::span<const FuzzyVec> negatives, const LossConfig& config);

// Loss of one (query, answer, negatives) triple under the model.
double loss_one(const Parameters& params, const ModelConfig& model,
                const LossConfig& loss, const QueryNode& query, EntityId positive,
                std::span<const EntityId> negatives);

// Z_q for a query embedding.
double query_scale(std::span<const double> query_embedding, double zq_eps);

}  // namespace fuzzqe

#endif  // FUZZQE_LOSS_HPP_
