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

#include "fuzzqe/oracle.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace fuzzqe {
namespace {

AnswerSet complement(const AnswerSet& s, std::size_t n) {
  AnswerSet out;
  out.reserve(n - std::min(n, s.size()));
  std::size_t j = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const auto id = static_cast<EntityId>(e);
    if (j < s.size() && s[j] == id) {
      ++j;
    } else {
      out.push_back(id);
    }
  }
  return out;
}

}  // namespace

AnswerSet answer_query(const KnowledgeGraph& kg, GraphView view, const QueryNode& q) {
  switch (q.op) {
    case Op::kAnchor:
      if (q.id < 0 || static_cast<std::size_t>(q.id) >= kg.num_entities()) {
        throw std::out_of_range("anchor entity out of range");
      }
      return {q.id};
    case Op::kProj: {
      const AnswerSet sources = answer_query(kg, view, q.args.at(0));
      AnswerSet out;
      for (EntityId x : sources) {
        const auto next = kg.neighbors(view, x, q.id, Direction::kForward);
        out.insert(out.end(), next.begin(), next.end());
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case Op::kNot:
      return complement(answer_query(kg, view, q.args.at(0)), kg.num_entities());
    case Op::kAnd:
    case Op::kOr: {
      if (q.args.empty()) throw std::invalid_argument("empty and/or node");
      AnswerSet acc = answer_query(kg, view, q.args[0]);
      for (std::size_t i = 1; i < q.args.size(); ++i) {
        const AnswerSet next = answer_query(kg, view, q.args[i]);
        AnswerSet merged;
        if (q.op == Op::kAnd) {
          std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(),
                                std::back_inserter(merged));
        } else {
          std::set_union(acc.begin(), acc.end(), next.begin(), next.end(),
                         std::back_inserter(merged));
        }
        acc = std::move(merged);
      }
      return acc;
    }
  }
  return {};
}

AnswerSplit split_answers(const KnowledgeGraph& kg, const QueryNode& q,
                          GraphView eval_view) {
  if (eval_view == GraphView::kFull) {
    throw std::invalid_argument("split_answers: eval view must be train or train_valid");
  }
  const auto larger = static_cast<GraphView>(static_cast<int>(eval_view) + 1);
  AnswerSplit out;
  out.easy = answer_query(kg, eval_view, q);
  const AnswerSet all = answer_query(kg, larger, q);
  std::set_difference(all.begin(), all.end(), out.easy.begin(), out.easy.end(),
                      std::back_inserter(out.hard));
  return out;
}

std::vector<double> indicator(const AnswerSet& answers, std::size_t num_entities) {
  std::vector<double> out(num_entities, 0.0);
  for (EntityId e : answers) out.at(static_cast<std::size_t>(e)) = 1.0;
  return out;
}

std::vector<double> symbolic_project(const KnowledgeGraph& kg, GraphView view, RelationId r,
                                     std::span<const double> memberships, Logic logic) {
  const std::size_t n = kg.num_entities();
  if (memberships.size() != n) {
    throw std::invalid_argument("symbolic_project: membership vector has the wrong size");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (memberships[i] == 0.0) continue;
    for (EntityId j : kg.neighbors(view, static_cast<EntityId>(i), r, Direction::kForward)) {
      auto& o = out[static_cast<std::size_t>(j)];
      o = t_conorm(logic, o, memberships[i]);
    }
  }
  return out;
}

std::vector<double> symbolic_fuzzy_eval(const KnowledgeGraph& kg, GraphView view,
                                        const QueryNode& q, Logic logic,
                                        std::size_t entity_limit) {
  const std::size_t n = kg.num_entities();
  if (n > entity_limit) {
    throw std::length_error("symbolic_fuzzy_eval: " + std::to_string(n) +
                            " entities exceed the limit of " +
                            std::to_string(entity_limit));
  }
  switch (q.op) {
    case Op::kAnchor: {
      if (q.id < 0 || static_cast<std::size_t>(q.id) >= n) {
        throw std::out_of_range("anchor entity out of range");
      }
      std::vector<double> out(n, 0.0);
      out[static_cast<std::size_t>(q.id)] = 1.0;
      return out;
    }
    case Op::kProj:
      return symbolic_project(kg, view, q.id,
                              symbolic_fuzzy_eval(kg, view, q.args.at(0), logic, entity_limit),
                              logic);
    case Op::kNot: {
      auto out = symbolic_fuzzy_eval(kg, view, q.args.at(0), logic, entity_limit);
      for (double& v : out) v = negator(v);
      return out;
    }
    case Op::kAnd:
    case Op::kOr: {
      if (q.args.empty()) throw std::invalid_argument("empty and/or node");
      auto acc = symbolic_fuzzy_eval(kg, view, q.args[0], logic, entity_limit);
      for (std::size_t c = 1; c < q.args.size(); ++c) {
        const auto next = symbolic_fuzzy_eval(kg, view, q.args[c], logic, entity_limit);
        for (std::size_t i = 0; i < n; ++i) {
          acc[i] = q.op == Op::kAnd ? t_norm(logic, acc[i], next[i])
                                    : t_conorm(logic, acc[i], next[i]);
        }
      }
      return acc;
    }
  }
  return {};
}

}  // namespace fuzzqe
