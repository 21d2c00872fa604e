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

#include "fuzzqe/query_gen.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "fuzzqe/error.hpp"
#include "fuzzqe/oracle.hpp"
#include "fuzzqe/synthetic.hpp"
#include "fuzzqe/verify.hpp"
#include "toy.hpp"

namespace fuzzqe {
namespace {

using testing::kA;
using testing::kB;
using testing::kD;
using testing::kR;
using testing::kS;

KnowledgeGraph small_synthetic() {
  SyntheticConfig sc;
  sc.num_clusters = 8;
  sc.cluster_size = 6;
  sc.num_relations = 4;
  sc.held_out = 0.2;
  sc.seed = 3;
  return make_synthetic_graph(sc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(QueryGen, OneHopInstancesAreExistingEdges) {
  const KnowledgeGraph kg = testing::toy_graph();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const QueryNode q = sample_structure_instance(rng, kg, GraphView::kTrain, "1p");
    ASSERT_EQ(q.op, Op::kProj);
    const EntityId h = q.args.at(0).id;
    EXPECT_FALSE(kg.neighbors(GraphView::kTrain, h, q.id, Direction::kForward).empty());
  }
}

TEST(QueryGen, TwoHopOnAChainHasOneInstance) {
  const KnowledgeGraph kg({"a", "b", "c", "d"}, {"r", "s"}, {{kA, kR, kB}, {kB, kS, kD}}, {},
                          {});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(sample_structure_instance(rng, kg, GraphView::kTrain, "2p"),
              proj(kS, proj(kR, anchor(kA))));
  }
}

TEST(QueryGen, EveryInstanceHasAnswers) {
  const KnowledgeGraph kg = small_synthetic();
  std::mt19937_64 rng(3);
  for (const auto& tag : canonical_tags()) {
    for (int i = 0; i < 20; ++i) {
      auto q = try_sample_structure_instance(rng, kg, GraphView::kTrain, tag);
      if (!q) continue;
      EXPECT_EQ(classify(*q), tag);
      EXPECT_FALSE(answer_query(kg, GraphView::kTrain, *q).empty()) << tag;
    }
  }
}

TEST(QueryGen, TrainCountsAreMetWithDistinctQueries) {
  std::mt19937_64 rng(4);
  const KnowledgeGraph kg = random_graph(rng, 40, 3, 200);
  GenConfig cfg;
  cfg.counts[Split::kTrain]["1p"] = 10;
  const GenOutput out = generate(kg, cfg);
  const auto& list = out.queries.at(Split::kTrain).at("1p");
  ASSERT_EQ(list.size(), 10u);
  std::set<std::uint64_t> hashes;
  for (const auto& q : list) {
    hashes.insert(structural_hash(q.query.root));
    EXPECT_EQ(q.easy, answer_query(kg, GraphView::kTrain, q.query.root));
    EXPECT_FALSE(q.easy.empty());
    EXPECT_TRUE(q.hard.empty());
  }
  EXPECT_EQ(hashes.size(), 10u);
}

TEST(QueryGen, EvalQueriesHaveHardAnswersWithinTheCap) {
  const KnowledgeGraph kg = small_synthetic();
  GenConfig cfg;
  cfg.max_answers = 20;
  for (const auto& tag : canonical_tags()) {
    cfg.counts[Split::kValid][tag] = 15;
    cfg.counts[Split::kTest][tag] = 15;
  }
  const GenOutput out = generate(kg, cfg, 2);
  std::size_t total = 0;
  for (const auto& [split, per_tag] : out.queries) {
    const GraphView eval_view = split == Split::kValid ? GraphView::kTrain : GraphView::kTrainValid;
    for (const auto& [tag, list] : per_tag) {
      for (const auto& q : list) {
        ++total;
        EXPECT_FALSE(q.hard.empty());
        EXPECT_LE(q.easy.size() + q.hard.size(), 20u);
        const AnswerSplit s = split_answers(kg, q.query.root, eval_view);
        EXPECT_EQ(s.easy, q.easy);
        EXPECT_EQ(s.hard, q.hard);
        EXPECT_EQ(classify(q.query.root), tag);
      }
    }
  }
  EXPECT_GT(total, 200u);
}

TEST(QueryGen, HeldOutEdgeSurfacesAsHardAnswer) {
  // A star: a links to many entities through r, x2 links to the rest through
  // t, and the test split adds a-r->b.
  std::vector<std::string> names{"a", "b"};
  std::vector<Triple> train;
  for (EntityId e = 2; e < 12; ++e) {
    names.push_back("x" + std::to_string(e));
    train.push_back({0, 0, e});
    train.push_back({e, 1, 0});
  }
  for (EntityId e = 3; e < 12; ++e) train.push_back({2, 2, e});
  train.push_back({1, 1, 0});
  const KnowledgeGraph kg(names, {"r", "s", "t"}, train, {}, {{0, 0, 1}});
  GenConfig cfg;
  cfg.counts[Split::kTest]["2in"] = 20;
  const GenOutput out = generate(kg, cfg);
  bool found = false;
  for (const auto& q : out.queries.at(Split::kTest).at("2in")) {
    for (EntityId h : q.hard) found = found || h == 1;
  }
  EXPECT_TRUE(found);
}

TEST(QueryGen, ShortfallIsReported) {
  const KnowledgeGraph kg = testing::toy_graph();
  GenConfig cfg;
  cfg.counts[Split::kTrain]["1p"] = 10;
  cfg.max_retries = 16;
  const GenOutput out = generate(kg, cfg);
  EXPECT_EQ(out.achieved(Split::kTrain, "1p"), 2u);
  ASSERT_EQ(out.shortfalls.size(), 1u);
  const auto m = manifest_json(out, cfg);
  EXPECT_EQ(m["splits"]["train"]["1p"]["requested"], 10);
  EXPECT_EQ(m["splits"]["train"]["1p"]["achieved"], 2);
}

TEST(QueryGen, DeterministicAcrossRunsAndThreadCounts) {
  const KnowledgeGraph kg = small_synthetic();
  GenConfig cfg;
  cfg.seed = 99;
  for (const auto& tag : {"2p", "3in", "pni", "up"}) {
    cfg.counts[Split::kTrain][tag] = 20;
    cfg.counts[Split::kTest][tag] = 10;
  }
  testing::TempDir a("fzqe_gen_a"), b("fzqe_gen_b");
  write_generated(a.path(), generate(kg, cfg, 1), cfg);
  write_generated(b.path(), generate(kg, cfg, 3), cfg);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    ++files;
    EXPECT_EQ(slurp(entry.path()), slurp(b.path() / entry.path().filename()))
        << entry.path().filename();
  }
  EXPECT_EQ(files, 9u);
}

TEST(QueryGen, RejectsUnknownTags) {
  GenConfig cfg;
  cfg.counts[Split::kTrain]["4p"] = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace fuzzqe
