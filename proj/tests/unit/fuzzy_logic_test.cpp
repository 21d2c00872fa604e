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

#include "fuzzqe/fuzzy_logic.hpp"

#include <random>

#include <gtest/gtest.h>

#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

constexpr Logic kAll[] = {Logic::kProduct, Logic::kGodel, Logic::kLukasiewicz};

FuzzyVec random_vec(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(d);
  for (auto& x : v) x = u(rng);
  return FuzzyVec(v);
}

TEST(FuzzyLogic, ProductExamples) {
  EXPECT_EQ(tnorm(Logic::kProduct, FuzzyVec({0.5, 1.0}), FuzzyVec({0.5, 0.0})).vector(),
            (std::vector<double>{0.25, 0.0}));
  EXPECT_EQ(tconorm(Logic::kProduct, FuzzyVec({0.5}), FuzzyVec({0.5})).vector(),
            (std::vector<double>{0.75}));
}

TEST(FuzzyLogic, LukasiewiczExample) {
  EXPECT_EQ(tnorm(Logic::kLukasiewicz, FuzzyVec({0.6}), FuzzyVec({0.3})).vector(),
            (std::vector<double>{0.0}));
}

TEST(FuzzyLogic, Negation) {
  EXPECT_EQ(negate(FuzzyVec::ones(3)), FuzzyVec::zeros(3));
  const FuzzyVec n = negate(FuzzyVec({0.3, 0.7}));
  EXPECT_DOUBLE_EQ(n[0], 0.7);
  EXPECT_DOUBLE_EQ(n[1], 0.3);
}

TEST(FuzzyLogic, BoundaryConditions) {
  std::mt19937_64 rng(1);
  for (Logic l : kAll) {
    for (int i = 0; i < 200; ++i) {
      const FuzzyVec a = random_vec(rng, 8);
      EXPECT_EQ(tnorm(l, a, FuzzyVec::ones(8)), a);
      EXPECT_EQ(tconorm(l, a, FuzzyVec::zeros(8)), a);
    }
  }
}

TEST(FuzzyLogic, DeMorganDuality) {
  std::mt19937_64 rng(2);
  for (Logic l : kAll) {
    for (int i = 0; i < 1000; ++i) {
      const FuzzyVec a = random_vec(rng, 4), b = random_vec(rng, 4);
      const FuzzyVec lhs = tconorm(l, a, b);
      const FuzzyVec rhs = negate(tnorm(l, negate(a), negate(b)));
      for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-12);
    }
  }
}

TEST(FuzzyLogic, DoubleNegationOnExactlyRepresentableValues) {
  const FuzzyVec v({0.0, 0.25, 0.5, 0.75, 1.0});
  EXPECT_EQ(negate(negate(v)), v);
}

TEST(FuzzyLogic, Folds) {
  std::mt19937_64 rng(3);
  const FuzzyVec a = random_vec(rng, 5), b = random_vec(rng, 5), c = random_vec(rng, 5);
  const std::vector<FuzzyVec> abc{a, b, c};
  const FuzzyVec p = fold_conj(Logic::kProduct, abc);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(p[i], a[i] * b[i] * c[i]);
  const std::vector<FuzzyVec> ab{a, b};
  const FuzzyVec m = fold_disj(Logic::kGodel, ab);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(m[i], std::max(a[i], b[i]));
  for (Logic l : kAll) {
    const std::vector<FuzzyVec> one{a};
    EXPECT_EQ(fold_conj(l, one), a);
  }
  EXPECT_THROW(fold_conj(Logic::kProduct, std::span<const FuzzyVec>{}), std::invalid_argument);
}

TEST(FuzzyLogic, DomainChecks) {
  EXPECT_THROW(FuzzyVec({1.5}), NumericError);
  EXPECT_THROW(FuzzyVec({std::nan("")}), NumericError);
  EXPECT_EQ(FuzzyVec({1.0 + 1e-12})[0], 1.0);
  EXPECT_THROW(tnorm(Logic::kGodel, FuzzyVec::ones(2), FuzzyVec::ones(3)), std::invalid_argument);
}

TEST(FuzzyLogic, ProductConormNeverBelowMax) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    const double a = u(rng), b = u(rng);
    const double s = t_conorm(Logic::kProduct, a, b);
    EXPECT_GE(s, std::max(a, b));
    EXPECT_EQ(s, t_conorm(Logic::kProduct, b, a));
  }
}

}  // namespace
}  // namespace fuzzqe
