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

#ifndef FUZZQE_EVALUATOR_HPP_
#define FUZZQE_EVALUATOR_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuzzqe/model.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

struct StructureMetrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t n_queries = 0;
};

struct EvalReport {
  std::map<std::string, StructureMetrics> per_structure;
  // Unweighted means over the EPFO and negation tags that are present.
  std::optional<double> avg_epfo;
  std::optional<double> avg_neg;
  std::vector<std::string> warnings;
};

using QueriesByTag = std::map<std::string, std::vector<LabeledQuery>>;

// 1 + #{strictly higher} + 0.5 * #{tied} over E minus `filter_out` (sorted)
// minus the target itself.
double filtered_rank(std::span<const double> scores, EntityId target,
                     std::span<const EntityId> filter_out);

// Scores of every entity for one query.
using QueryScorer = std::function<std::vector<double>(const QueryNode&)>;

// Macro-averaged filtered MRR and HITS@{1,3,10} per structure from an
// arbitrary scorer, which must be safe to call concurrently when threads > 1.
EvalReport evaluate_scores(const QueriesByTag& queries, const QueryScorer& scorer,
                           std::size_t threads = 1);

// Macro-averaged filtered MRR and HITS@{1,3,10} per structure. Throws
// DataError when a query has no hard answers.
EvalReport evaluate(const Encoder& encoder, const QueriesByTag& queries,
                    std::size_t threads = 1);
EvalReport evaluate(const Parameters& params, const ModelConfig& config,
                    const QueriesByTag& queries, std::size_t threads = 1);

// Expected MRR of a uniformly random scorer: a hard answer competes with
// n = |E| - |easy u hard| + 1 candidates and its expected reciprocal rank is
// H_n / n. Averaged like evaluate().
double random_baseline_mrr(std::size_t num_entities, std::span<const LabeledQuery> queries);

// Fills avg_epfo / avg_neg from per_structure.
void compute_aggregates(EvalReport& report);

nlohmann::ordered_json report_to_json(const EvalReport& report);
// Header "tag,mrr,hits1,hits3,hits10,n" and one row per structure.
std::string report_to_csv(const EvalReport& report);

QueriesByTag group_by_tag(std::vector<LabeledQuery> queries);

}  // namespace fuzzqe

#endif  // FUZZQE_EVALUATOR_HPP_
