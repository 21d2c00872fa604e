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

#include "fuzzqe/knowledge_graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fuzzqe/error.hpp"
#include "toy.hpp"

namespace fuzzqe {
namespace {

using testing::kA;
using testing::kB;
using testing::kC;
using testing::kD;
using testing::kR;
using testing::kS;

std::vector<EntityId> to_vec(std::span<const EntityId> s) { return {s.begin(), s.end()}; }

TEST(KnowledgeGraph, ToyNeighbors) {
  const KnowledgeGraph kg = testing::toy_graph();
  EXPECT_EQ(to_vec(kg.neighbors(GraphView::kFull, kA, kR, Direction::kForward)),
            (std::vector<EntityId>{kB, kC}));
  EXPECT_TRUE(kg.neighbors(GraphView::kFull, kD, kR, Direction::kForward).empty());
  EXPECT_EQ(to_vec(kg.neighbors(GraphView::kFull, kD, kS, Direction::kInverse)),
            (std::vector<EntityId>{kB}));
}

TEST(KnowledgeGraph, EmptyHeldOutSplitsCollapseViews) {
  const KnowledgeGraph kg = testing::toy_graph();
  EXPECT_TRUE(kg.valid_edges().empty());
  EXPECT_TRUE(kg.test_edges().empty());
  const auto train = kg.view_edges(GraphView::kTrain);
  const auto tv = kg.view_edges(GraphView::kTrainValid);
  EXPECT_TRUE(std::equal(train.begin(), train.end(), tv.begin(), tv.end()));
}

TEST(KnowledgeGraph, SortsAndDeduplicatesSplits) {
  const KnowledgeGraph kg({"x", "y"}, {"r"}, {{1, 0, 0}, {0, 0, 1}, {1, 0, 0}}, {}, {});
  ASSERT_EQ(kg.train_edges().size(), 2u);
  EXPECT_TRUE(std::is_sorted(kg.train_edges().begin(), kg.train_edges().end()));
}

TEST(KnowledgeGraph, RejectsDanglingIds) {
  EXPECT_THROW(KnowledgeGraph({"x"}, {"r"}, {{0, 0, 1}}, {}, {}), DataError);
  EXPECT_THROW(KnowledgeGraph({"x", "y"}, {"r"}, {{0, 1, 1}}, {}, {}), DataError);
}

TEST(KnowledgeGraph, ViewsNestOnRandomGraphs) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> ent(0, 29), rel(0, 2), split(0, 9);
  std::vector<std::string> names(30), rels{"r0", "r1", "r2"};
  for (int i = 0; i < 30; ++i) names[i] = "e" + std::to_string(i);
  std::vector<Triple> tr, va, te;
  for (int i = 0; i < 300; ++i) {
    const Triple t{ent(rng), rel(rng), ent(rng)};
    const int s = split(rng);
    (s == 0 ? va : s == 1 ? te : tr).push_back(t);
  }
  const KnowledgeGraph kg(names, rels, tr, va, te);
  for (EntityId x = 0; x < 30; ++x) {
    for (RelationId r = 0; r < 3; ++r) {
      for (auto dir : {Direction::kForward, Direction::kInverse}) {
        const auto small = to_vec(kg.neighbors(GraphView::kTrain, x, r, dir));
        const auto mid = to_vec(kg.neighbors(GraphView::kTrainValid, x, r, dir));
        const auto big = to_vec(kg.neighbors(GraphView::kFull, x, r, dir));
        EXPECT_TRUE(std::includes(mid.begin(), mid.end(), small.begin(), small.end()));
        EXPECT_TRUE(std::includes(big.begin(), big.end(), mid.begin(), mid.end()));
      }
    }
  }
  EXPECT_TRUE(kg.has_edge(GraphView::kFull, te.front()));
}

TEST(KnowledgeGraph, SaveLoadRoundTrip) {
  testing::TempDir dir("fzqe_kg");
  const KnowledgeGraph kg = testing::toy_graph({{kC, kS, kD}}, {{kD, kR, kA}});
  save_graph(kg, dir.path());
  const KnowledgeGraph back = load_graph(dir.path());
  EXPECT_EQ(back.entity_names(), kg.entity_names());
  EXPECT_EQ(back.relation_names(), kg.relation_names());
  for (auto s : {Split::kTrain, Split::kValid, Split::kTest}) {
    EXPECT_TRUE(std::ranges::equal(back.edges(s), kg.edges(s)));
  }
}

TEST(KnowledgeGraph, MalformedFileNamesTheLine) {
  testing::TempDir dir("fzqe_kg_bad");
  save_graph(testing::toy_graph(), dir.path());
  std::ofstream(dir.path() / "train.tsv", std::ios::app) << "0\tnot-a-number\t1\n";
  try {
    load_graph(dir.path());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("train.tsv"), std::string::npos);
  }
}

TEST(KnowledgeGraph, MissingDirectoryNamesThePath) {
  try {
    load_graph("/nonexistent/fzqe");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/fzqe"), std::string::npos);
  }
}

}  // namespace
}  // namespace fuzzqe
