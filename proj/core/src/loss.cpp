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

#include "fuzzqe/loss.hpp"

#include <cmath>
#include <stdexcept>

#include "fuzzqe/error.hpp"
#include "fuzzqe/linalg.hpp"

namespace fuzzqe {

double query_scale(std::span<const double> query_embedding, double zq_eps) {
  const double sq = linalg::dot(query_embedding.data(), query_embedding.data(),
                                query_embedding.size());
  return std::max(std::sqrt(sq), zq_eps);
}

double margin_loss(std::span<const double> query_embedding,
                   std::span<const double> positive,
                   std::span<const std::span<const double>> negatives,
                   const LossConfig& config) {
  if (negatives.empty()) throw std::invalid_argument("margin_loss needs negatives");
  const double z = query_scale(query_embedding, config.zq_eps);
  const double pos = score(query_embedding, positive);
  double loss = -linalg::log_logistic(pos / z - config.gamma);
  double neg = 0.0;
  for (const auto& n : negatives) {
    neg += linalg::log_logistic(config.gamma - score(query_embedding, n) / z);
  }
  loss -= neg / static_cast<double>(negatives.size());
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  return loss;
}

double margin_loss(const FuzzyVec& query_embedding, const FuzzyVec& positive,
                   std::span<const FuzzyVec> negatives, const LossConfig& config) {
  std::vector<std::span<const double>> views;
  views.reserve(negatives.size());
  for (const auto& n : negatives) views.push_back(n.values());
  return margin_loss(query_embedding.values(), positive.values(), views, config);
}

double loss_one(const Parameters& params, const ModelConfig& model,
                const LossConfig& loss, const QueryNode& query, EntityId positive,
                std::span<const EntityId> negatives) {
  const FuzzyVec s = embed_query(params, model, query);
  std::vector<FuzzyVec> negs;
  negs.reserve(negatives.size());
  for (EntityId e : negatives) negs.push_back(entity_embedding(params, model, e));
  return margin_loss(s, entity_embedding(params, model, positive), negs, loss);
}

}  // namespace fuzzqe
