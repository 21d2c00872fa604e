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

#include "fuzzqe/model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuzzqe/checkpoint.hpp"
#include "fuzzqe/error.hpp"
#include "toy.hpp"

namespace fuzzqe {
namespace {

ModelConfig small_config(std::size_t d, std::size_t k, Logic logic = Logic::kProduct,
                         NormMode norm = NormMode::kL1,
                         Activation g = Activation::kLogistic) {
  ModelConfig c;
  c.dim = d;
  c.num_bases = k;
  c.logic = logic;
  c.norm = norm;
  c.activation = g;
  return c;
}

TEST(Model, SoftmaxByHand) {
  const ModelConfig c = small_config(2, 1);
  Parameters p(1, 1, 2, 1);
  p.entity_theta = {std::log(3.0), 0.0};
  const FuzzyVec e = entity_embedding(p, c, 0);
  EXPECT_NEAR(e[0], 0.75, 1e-15);
  EXPECT_NEAR(e[1], 0.25, 1e-15);
}

TEST(Model, ZeroThetaIsSymmetric) {
  Parameters p(1, 1, 4, 1);
  const FuzzyVec l1 = entity_embedding(p, small_config(4, 1), 0);
  const FuzzyVec l2 = entity_embedding(p, small_config(4, 1, Logic::kProduct, NormMode::kL2), 0);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(l1[i], 0.25);
    EXPECT_DOUBLE_EQ(l2[i], 0.5);
  }
}

TEST(Model, RelationMapBasisCombinations) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Parameters p(2, 1, 3, 2);
  for (auto& x : p.bases_M) x = n(rng);
  for (auto& x : p.bases_v) x = n(rng);

  p.rel_coeff = {1.0, 0.0};
  RelationMap m = relation_map(p, 0);
  EXPECT_EQ(m.weight, std::vector<double>(p.bases_M.begin(), p.bases_M.begin() + 9));
  EXPECT_EQ(m.bias, std::vector<double>(p.bases_v.begin(), p.bases_v.begin() + 3));

  p.rel_coeff = {0.0, 0.0};
  m = relation_map(p, 0);
  for (double x : m.weight) EXPECT_EQ(x, 0.0);
  for (double x : m.bias) EXPECT_EQ(x, 0.0);

  std::copy(p.bases_M.begin(), p.bases_M.begin() + 9, p.bases_M.begin() + 9);
  p.rel_coeff = {1.0, -1.0};
  m = relation_map(p, 0);
  for (double x : m.weight) EXPECT_EQ(x, 0.0);
}

TEST(Model, ZeroMapProjection) {
  Parameters p(1, 1, 4, 1);
  std::fill(p.ln_gain.begin(), p.ln_gain.end(), 1.0);
  const FuzzyVec s = FuzzyVec::filled(4, 0.3);
  const FuzzyVec logistic = project(p, small_config(4, 1), 0, s);
  const FuzzyVec rect = project(
      p, small_config(4, 1, Logic::kProduct, NormMode::kL1, Activation::kBoundedRectifier), 0, s);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(logistic[i], 0.5);
    EXPECT_EQ(rect[i], 0.0);
  }
}

TEST(Model, ProjectionStaysInTheUnitCube) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Activation g : {Activation::kLogistic, Activation::kBoundedRectifier}) {
    const ModelConfig c = small_config(6, 2, Logic::kProduct, NormMode::kL1, g);
    for (int t = 0; t < 1000; ++t) {
      Parameters p(1, 1, 6, 2);
      for (auto* v : {&p.bases_M, &p.bases_v, &p.rel_coeff, &p.ln_gain, &p.ln_bias}) {
        for (auto& x : *v) x = n(rng);
      }
      std::vector<double> s(6);
      for (auto& x : s) x = u(rng);
      const FuzzyVec out = project(p, c, 0, FuzzyVec(s));
      for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_GE(out[i], 0.0);
        EXPECT_LE(out[i], 1.0);
      }
    }
  }
}

class EmbedTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = small_config(8, 2);
    params_ = init_parameters(5, 3, config_, 11);
  }
  ModelConfig config_;
  Parameters params_;
};

TEST_F(EmbedTest, OneHopIsAProjection) {
  const FuzzyVec q = embed_query(params_, config_, proj(1, anchor(2)));
  EXPECT_EQ(q, project(params_, config_, 1, entity_embedding(params_, config_, 2)));
}

TEST_F(EmbedTest, DoubleNegationIsExact) {
  const QueryNode b = conj({proj(0, anchor(1)), proj(2, anchor(3))});
  EXPECT_EQ(embed_query(params_, config_, negation(negation(b))), embed_query(params_, config_, b));
}

TEST_F(EmbedTest, GodelIntersectionIsIdempotent) {
  config_.logic = Logic::kGodel;
  const QueryNode b = proj(0, anchor(1));
  EXPECT_EQ(embed_query(params_, config_, conj({b, b})), embed_query(params_, config_, b));
}

TEST_F(EmbedTest, ScoreDefinitions) {
  const FuzzyVec e = entity_embedding(params_, config_, 0);
  std::vector<double> onehot(8, 0.0);
  onehot[3] = 1.0;
  const FuzzyVec q = embed_query(params_, config_, proj(0, anchor(1)));
  EXPECT_EQ(score(q, FuzzyVec(onehot)), q[3]);
  EXPECT_NEAR(score(FuzzyVec::ones(8), e), 1.0, 1e-15);
  EXPECT_EQ(score(FuzzyVec::zeros(8), e), 0.0);
}

TEST_F(EmbedTest, ScoreAllMatchesPerEntityScoring) {
  const FuzzyVec q = embed_query(params_, config_, proj(2, proj(1, anchor(4))));
  const auto all = score_all(params_, config_, q);
  ASSERT_EQ(all.size(), 5u);
  std::size_t best = 0;
  double best_score = -1.0;
  for (EntityId e = 0; e < 5; ++e) {
    double s = 0.0;
    const FuzzyVec p = entity_embedding(params_, config_, e);
    for (std::size_t i = 0; i < 8; ++i) s += q[i] * p[i];
    EXPECT_NEAR(all[e], s, 1e-12);
    if (s > best_score) best_score = s, best = e;
  }
  EXPECT_EQ(top_k(all, 1).at(0).entity, static_cast<EntityId>(best));
  for (double x : score_all(params_, config_, FuzzyVec::zeros(8))) EXPECT_EQ(x, 0.0);
}

TEST_F(EmbedTest, EncoderAgreesWithFreeFunctions) {
  const Encoder enc(params_, config_, {.precompute_relations = true});
  const QueryNode q = conj({proj(0, anchor(1)), negation(proj(2, anchor(3)))});
  const FuzzyVec s = enc.embed(q);
  EXPECT_EQ(s, embed_query(params_, config_, q));
  const auto a = enc.score_all(s), b = score_all(params_, config_, s);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
}

TEST(TopK, OrderingAndExclusion) {
  const std::vector<double> s{0.1, 0.9, 0.5};
  EXPECT_EQ(top_k(s, 2), (std::vector<ScoredEntity>{{1, 0.9}, {2, 0.5}}));
  const std::vector<EntityId> ex{1};
  EXPECT_EQ(top_k(s, 2, ex), (std::vector<ScoredEntity>{{2, 0.5}, {0, 0.1}}));
  const std::vector<double> flat(4, 0.2);
  const auto t = top_k(flat, 4);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i].entity, static_cast<EntityId>(i));
  EXPECT_EQ(top_k(s, 10).size(), 3u);
}

TEST(Model, RejectsLukasiewiczForEmbedding) {
  ModelConfig c;
  c.logic = Logic::kLukasiewicz;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  testing::TempDir dir("fzqe_ck");
  const ModelConfig c = small_config(6, 3, Logic::kGodel, NormMode::kL2,
                                     Activation::kBoundedRectifier);
  const Parameters p = init_parameters(7, 2, c, 5);
  const auto file = dir.path() / "m.ckpt";
  save_checkpoint(file, p, c);
  const Checkpoint back = load_checkpoint(file);
  EXPECT_EQ(back.config, c);
  EXPECT_EQ(back.params, p);
}

TEST(Checkpoint, TruncatedFileIsRejected) {
  testing::TempDir dir("fzqe_ck_bad");
  const ModelConfig c = small_config(4, 1);
  const auto file = dir.path() / "m.ckpt";
  save_checkpoint(file, init_parameters(3, 1, c, 1), c);
  std::filesystem::resize_file(file, std::filesystem::file_size(file) - 8);
  EXPECT_THROW(load_checkpoint(file), DataError);
}

}  // namespace
}  // namespace fuzzqe
