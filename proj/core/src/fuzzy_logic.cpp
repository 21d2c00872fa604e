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

#include <cmath>
#include <stdexcept>
#include <string>

#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

void check_dims(const FuzzyVec& a, const FuzzyVec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("fuzzy vector dimension mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

template <typename BinaryOp>
FuzzyVec elementwise(const FuzzyVec& a, const FuzzyVec& b, BinaryOp op) {
  check_dims(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return FuzzyVec(std::move(out));
}

}  // namespace

std::string_view to_string(Logic logic) {
  switch (logic) {
    case Logic::kProduct:
      return "product";
    case Logic::kGodel:
      return "godel";
    case Logic::kLukasiewicz:
      return "lukasiewicz";
  }
  return "?";
}

Logic parse_logic(std::string_view text) {
  if (text == "product") return Logic::kProduct;
  if (text == "godel" || text == "goedel" || text == "min") return Logic::kGodel;
  if (text == "lukasiewicz") return Logic::kLukasiewicz;
  throw ConfigError("unknown logic '" + std::string(text) +
                    "' (expected product, godel or lukasiewicz)");
}

FuzzyVec::FuzzyVec(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double& v = values_[i];
    if (!std::isfinite(v) || v < -kDomainSlack || v > 1.0 + kDomainSlack) {
      throw NumericError("fuzzy vector entry " + std::to_string(i) + " = " +
                         std::to_string(v) + " outside [0,1]");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
}

FuzzyVec FuzzyVec::filled(std::size_t d, double value) {
  return FuzzyVec(std::vector<double>(d, value));
}

FuzzyVec tnorm(Logic logic, const FuzzyVec& a, const FuzzyVec& b) {
  return elementwise(a, b, [logic](double x, double y) { return t_norm(logic, x, y); });
}

FuzzyVec tconorm(Logic logic, const FuzzyVec& a, const FuzzyVec& b) {
  return elementwise(a, b, [logic](double x, double y) { return t_conorm(logic, x, y); });
}

FuzzyVec negate(const FuzzyVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = negator(v[i]);
  return FuzzyVec(std::move(out));
}

FuzzyVec fold_conj(Logic logic, std::span<const FuzzyVec> vs) {
  if (vs.empty()) throw std::invalid_argument("fold_conj of an empty list");
  FuzzyVec acc = vs[0];
  for (std::size_t i = 1; i < vs.size(); ++i) acc = tnorm(logic, acc, vs[i]);
  return acc;
}

FuzzyVec fold_disj(Logic logic, std::span<const FuzzyVec> vs) {
  if (vs.empty()) throw std::invalid_argument("fold_disj of an empty list");
  FuzzyVec acc = vs[0];
  for (std::size_t i = 1; i < vs.size(); ++i) acc = tconorm(logic, acc, vs[i]);
  return acc;
}

}  // namespace fuzzqe
