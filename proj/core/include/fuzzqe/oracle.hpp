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

#ifndef FUZZQE_ORACLE_HPP_
#define FUZZQE_ORACLE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fuzzqe/fuzzy_logic.hpp"
#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

// Sorted, deduplicated entity ids.
using AnswerSet = std::vector<EntityId>;

// Exact set semantics over one graph view. Negation complements against
// the full entity set.
AnswerSet answer_query(const KnowledgeGraph& kg, GraphView view, const QueryNode& q);

struct AnswerSplit {
  AnswerSet easy;
  AnswerSet hard;
};

// easy = answers on `eval_view`, hard = answers on the next larger view
// minus easy. eval_view is kTrain for validation and kTrainValid for test.
AnswerSplit split_answers(const KnowledgeGraph& kg, const QueryNode& q,
                          GraphView eval_view);

inline constexpr std::size_t kSymbolicEntityLimit = 100000;

// Membership of each target in the image of `memberships` under relation r:
// the t-conorm over its sources of their membership.
std::vector<double> symbolic_project(const KnowledgeGraph& kg, GraphView view, RelationId r,
                                     std::span<const double> memberships, Logic logic);

// Evaluates the query over explicit fuzzy sets in [0,1]^|E|. A projection
// folds each target's incoming memberships with the t-conorm. Throws
// std::length_error when |E| exceeds `entity_limit`.
std::vector<double> symbolic_fuzzy_eval(const KnowledgeGraph& kg, GraphView view,
                                        const QueryNode& q, Logic logic,
                                        std::size_t entity_limit = kSymbolicEntityLimit);

// 0/1 membership vector of a crisp answer set.
std::vector<double> indicator(const AnswerSet& answers, std::size_t num_entities);

}  // namespace fuzzqe

#endif  // FUZZQE_ORACLE_HPP_
