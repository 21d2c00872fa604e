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

#include "fuzzqe/evaluator.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuzzqe/error.hpp"
#include "fuzzqe/query_gen.hpp"
#include "fuzzqe/synthetic.hpp"

namespace fuzzqe {
namespace {

double harmonic_over_n(std::size_t n) {
  double h = 0.0;
  for (std::size_t r = n; r >= 1; --r) h += 1.0 / static_cast<double>(r);
  return h / static_cast<double>(n);
}

LabeledQuery labeled(std::string tag, std::vector<EntityId> easy, std::vector<EntityId> hard) {
  LabeledQuery q;
  q.query = {proj(0, anchor(0)), std::move(tag)};
  q.easy = std::move(easy);
  q.hard = std::move(hard);
  return q;
}

TEST(FilteredRank, HandExamples) {
  const std::vector<double> s{0.9, 0.5, 0.1};
  EXPECT_EQ(filtered_rank(s, 1, {}), 2.0);
  const std::vector<EntityId> f{1};
  EXPECT_EQ(filtered_rank(s, 2, f), 2.0);
  const std::vector<double> flat(5, 0.3);
  for (EntityId t = 0; t < 5; ++t) EXPECT_EQ(filtered_rank(flat, t, {}), 3.0);
}

TEST(Evaluate, MacroAveragesReciprocalRanks) {
  QueriesByTag qs;
  qs["1p"] = {labeled("1p", {}, {0}), labeled("1p", {}, {1})};
  // Entity 0 tops both score vectors: RR 1 then RR 1/2.
  const EvalReport r = evaluate_scores(qs, [](const QueryNode&) {
    return std::vector<double>{0.9, 0.5, 0.1};
  });
  EXPECT_DOUBLE_EQ(r.per_structure.at("1p").mrr, 0.75);
  EXPECT_DOUBLE_EQ(r.per_structure.at("1p").hits1, 0.5);
  EXPECT_EQ(r.per_structure.at("1p").n_queries, 2u);
}

TEST(Evaluate, KnownAnswersAreFiltered) {
  QueriesByTag qs;
  qs["2p"] = {labeled("2p", {0}, {1})};
  const EvalReport r = evaluate_scores(qs, [](const QueryNode&) {
    return std::vector<double>{0.9, 0.5, 0.1};
  });
  EXPECT_DOUBLE_EQ(r.per_structure.at("2p").mrr, 1.0);
  ASSERT_TRUE(r.avg_epfo.has_value());
  EXPECT_FALSE(r.avg_neg.has_value());
  EXPECT_FALSE(r.per_structure.contains("1p"));
}

TEST(Evaluate, QueriesWithoutHardAnswersAreRejected) {
  QueriesByTag qs;
  qs["1p"] = {labeled("1p", {0}, {})};
  EXPECT_THROW(evaluate_scores(qs, [](const QueryNode&) { return std::vector<double>(3); }),
               DataError);
}

TEST(RandomBaseline, HarmonicSums) {
  const std::vector<LabeledQuery> one{labeled("1p", {}, {3})};
  EXPECT_NEAR(random_baseline_mrr(100, one), harmonic_over_n(100), 1e-15);
  EXPECT_NEAR(random_baseline_mrr(100, one), 0.0519, 5e-5);
  EXPECT_DOUBLE_EQ(random_baseline_mrr(2, one), 0.75);
  double prev = 0.0;
  for (std::size_t known = 0; known < 50; ++known) {
    std::vector<EntityId> easy;
    for (std::size_t i = 0; i < known; ++i) easy.push_back(static_cast<EntityId>(i + 1));
    const std::vector<LabeledQuery> q{labeled("1p", easy, {0})};
    const double b = random_baseline_mrr(100, q);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(RandomBaseline, MonteCarloAgreement) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QueriesByTag qs;
  auto& list = qs["1p"];
  for (int i = 0; i < 4000; ++i) list.push_back(labeled("1p", {1, 2}, {static_cast<EntityId>(i % 50) + 3}));
  std::vector<std::vector<double>> draws(list.size());
  std::size_t next = 0;
  const EvalReport r = evaluate_scores(qs, [&](const QueryNode&) {
    std::vector<double> s(60);
    for (auto& x : s) x = u(rng);
    draws[next++] = s;
    return s;
  });
  // Per-query RR has variance below 1/4; 3 standard errors.
  const double se = 0.5 / std::sqrt(static_cast<double>(list.size()));
  EXPECT_NEAR(r.per_structure.at("1p").mrr, random_baseline_mrr(60, list), 3 * se);
}

TEST(RandomBaseline, UntrainedModelSitsNearTheBaseline) {
  SyntheticConfig sc;
  sc.num_clusters = 10;
  const KnowledgeGraph kg = make_synthetic_graph(sc);
  GenConfig g;
  g.counts[Split::kTest]["1p"] = 400;
  const GenOutput out = generate(kg, g);
  const auto& list = out.queries.at(Split::kTest).at("1p");
  ModelConfig c;
  c.dim = 16;
  c.num_bases = 2;
  QueriesByTag qs;
  qs["1p"] = list;
  double mean = 0.0;
  const int models = 10;
  for (int seed = 0; seed < models; ++seed) {
    const Parameters p = init_parameters(kg.num_entities(), kg.num_relations(), c, seed);
    mean += evaluate(p, c, qs).per_structure.at("1p").mrr / models;
  }
  const double base = random_baseline_mrr(kg.num_entities(), list);
  const double se = 0.5 / std::sqrt(static_cast<double>(list.size() * models));
  EXPECT_NEAR(mean, base, 3 * se);
}

TEST(Report, JsonAndCsv) {
  EvalReport r;
  r.per_structure["1p"] = {0.5, 0.25, 0.5, 0.75, 4};
  r.per_structure["2in"] = {0.2, 0.1, 0.2, 0.3, 2};
  compute_aggregates(r);
  const auto j = report_to_json(r);
  EXPECT_DOUBLE_EQ(j.at("avg_epfo").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j.at("avg_neg").get<double>(), 0.2);
  const std::string csv = report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tag,mrr,hits1,hits3,hits10,n");
  EXPECT_NE(csv.find("1p,0.500000,0.250000,0.500000,0.750000,4"), std::string::npos);
}

}  // namespace
}  // namespace fuzzqe
