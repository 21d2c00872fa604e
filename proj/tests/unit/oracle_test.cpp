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
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fuzzqe/verify.hpp"
#include "toy.hpp"

namespace fuzzqe {
namespace {

using testing::kA;
using testing::kB;
using testing::kC;
using testing::kD;
using testing::kR;
using testing::kS;

// Set semantics evaluated straight off the triple list.
std::set<EntityId> brute(const KnowledgeGraph& kg, GraphView view, const QueryNode& q) {
  const auto n = static_cast<EntityId>(kg.num_entities());
  switch (q.op) {
    case Op::kAnchor:
      return {q.id};
    case Op::kProj: {
      const auto src = brute(kg, view, q.args[0]);
      std::set<EntityId> out;
      for (const Triple& t : kg.view_edges(view)) {
        if (t.relation == q.id && src.contains(t.head)) out.insert(t.tail);
      }
      return out;
    }
    case Op::kNot: {
      const auto in = brute(kg, view, q.args[0]);
      std::set<EntityId> out;
      for (EntityId e = 0; e < n; ++e) {
        if (!in.contains(e)) out.insert(e);
      }
      return out;
    }
    case Op::kAnd:
    case Op::kOr: {
      auto acc = brute(kg, view, q.args[0]);
      for (std::size_t i = 1; i < q.args.size(); ++i) {
        const auto next = brute(kg, view, q.args[i]);
        std::set<EntityId> out;
        for (EntityId e = 0; e < n; ++e) {
          const bool in = q.op == Op::kAnd ? acc.contains(e) && next.contains(e)
                                           : acc.contains(e) || next.contains(e);
          if (in) out.insert(e);
        }
        acc = out;
      }
      return acc;
    }
  }
  return {};
}

TEST(Oracle, ToyTwoHop) {
  const KnowledgeGraph kg = testing::toy_graph();
  EXPECT_EQ(answer_query(kg, GraphView::kFull, proj(kS, proj(kR, anchor(kA)))), AnswerSet{kD});
  EXPECT_EQ(answer_query(kg, GraphView::kFull, proj(kR, anchor(kA))), (AnswerSet{kB, kC}));
}

TEST(Oracle, IntersectionLaws) {
  const KnowledgeGraph kg = testing::toy_graph();
  const QueryNode b = proj(kR, anchor(kA));
  EXPECT_EQ(answer_query(kg, GraphView::kFull, conj({b, b})),
            answer_query(kg, GraphView::kFull, b));
  EXPECT_TRUE(answer_query(kg, GraphView::kFull, conj({b, negation(b)})).empty());
}

TEST(Oracle, EasyHardSplit) {
  const KnowledgeGraph kg = testing::toy_graph({}, {{kA, kS, kB}});
  const AnswerSplit s = split_answers(kg, proj(kS, anchor(kA)), GraphView::kTrainValid);
  EXPECT_TRUE(s.easy.empty());
  EXPECT_EQ(s.hard, AnswerSet{kB});
  const AnswerSplit full = split_answers(kg, proj(kR, anchor(kA)), GraphView::kTrainValid);
  EXPECT_EQ(full.easy, (AnswerSet{kB, kC}));
  EXPECT_TRUE(full.hard.empty());
  EXPECT_ANY_THROW(split_answers(kg, proj(kR, anchor(kA)), GraphView::kFull));
}

TEST(Oracle, EasyAndHardAreDisjointOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int g = 0; g < 10; ++g) {
    const KnowledgeGraph base = random_graph(rng, 30, 3, 120);
    std::vector<Triple> train(base.train_edges().begin(), base.train_edges().end());
    std::vector<Triple> valid(train.end() - 20, train.end());
    train.resize(train.size() - 20);
    std::vector<Triple> test(train.end() - 20, train.end());
    train.resize(train.size() - 20);
    const KnowledgeGraph kg(base.entity_names(), base.relation_names(), train, valid, test);
    for (const auto& tag : canonical_tags()) {
      const QueryNode q = random_instance(rng, tag, 30, 3);
      for (GraphView v : {GraphView::kTrain, GraphView::kTrainValid}) {
        const AnswerSplit s = split_answers(kg, q, v);
        std::vector<EntityId> both;
        std::ranges::set_intersection(s.easy, s.hard, std::back_inserter(both));
        EXPECT_TRUE(both.empty());
      }
    }
  }
}

TEST(Oracle, AgreesWithBruteForceAndCrispFuzzyEvaluation) {
  std::mt19937_64 rng(6);
  for (int g = 0; g < 5; ++g) {
    const KnowledgeGraph kg = random_graph(rng, 50, 4, 250);
    for (int i = 0; i < 56; ++i) {
      const std::string& tag = canonical_tags()[i % 14];
      const QueryNode q = random_instance(rng, tag, 50, 4);
      const AnswerSet got = answer_query(kg, GraphView::kFull, q);
      const auto want = brute(kg, GraphView::kFull, q);
      EXPECT_EQ(got, AnswerSet(want.begin(), want.end())) << tag;
      for (Logic l : {Logic::kProduct, Logic::kGodel, Logic::kLukasiewicz}) {
        EXPECT_EQ(symbolic_fuzzy_eval(kg, GraphView::kFull, q, l), indicator(got, 50)) << tag;
      }
    }
  }
}

TEST(Oracle, NegationAtTheRootIsTheComplement) {
  const KnowledgeGraph kg = testing::toy_graph();
  const auto v = symbolic_fuzzy_eval(kg, GraphView::kFull, negation(proj(kR, anchor(kA))),
                                     Logic::kProduct);
  EXPECT_EQ(v, (std::vector<double>{1.0, 0.0, 0.0, 1.0}));
}

TEST(Oracle, ProductProjectionFoldsSources) {
  // b and c both reach d through s.
  const KnowledgeGraph kg({"a", "b", "c", "d"}, {"s"}, {{kB, 0, kD}, {kC, 0, kD}}, {}, {});
  const std::vector<double> m{0.0, 0.5, 0.5, 0.0};
  EXPECT_EQ(symbolic_project(kg, GraphView::kFull, 0, m, Logic::kProduct)[kD], 0.75);
  EXPECT_EQ(symbolic_project(kg, GraphView::kFull, 0, m, Logic::kGodel)[kD], 0.5);
}

TEST(Oracle, EntityLimit) {
  const KnowledgeGraph kg = testing::toy_graph();
  EXPECT_THROW(symbolic_fuzzy_eval(kg, GraphView::kFull, proj(kR, anchor(kA)), Logic::kGodel, 3),
               std::length_error);
}

}  // namespace
}  // namespace fuzzqe
