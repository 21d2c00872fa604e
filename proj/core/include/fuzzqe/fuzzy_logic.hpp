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

#ifndef FUZZQE_FUZZY_LOGIC_HPP_
#define FUZZQE_FUZZY_LOGIC_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fuzzqe {

// t-norm based logic systems. Product and Godel drive query embedding;
// Lukasiewicz is available to the algebra only.
enum class Logic { kProduct, kGodel, kLukasiewicz };

std::string_view to_string(Logic logic);
Logic parse_logic(std::string_view text);

inline double t_norm(Logic logic, double a, double b) {
  switch (logic) {
    case Logic::kProduct:
      return a * b;
    case Logic::kGodel:
      return std::min(a, b);
    case Logic::kLukasiewicz:
      // a - (1 - b) rather than a + b - 1 keeps t(a, 1) = a exact.
      return std::max(a - (1.0 - b), 0.0);
  }
  return 0.0;
}

inline double t_conorm(Logic logic, double a, double b) {
  switch (logic) {
    case Logic::kProduct: {
      // a + b - ab arranged as hi + lo (1 - hi): symmetric in its arguments
      // and never below max(a, b) after rounding.
      const double hi = std::max(a, b);
      const double lo = std::min(a, b);
      return hi + lo * (1.0 - hi);
    }
    case Logic::kGodel:
      return std::max(a, b);
    case Logic::kLukasiewicz:
      return std::min(a + b, 1.0);
  }
  return 0.0;
}

inline double negator(double a) { return 1.0 - a; }

// Entries outside [-kDomainSlack, 1 + kDomainSlack] are rejected; entries
// inside the slack are clamped to [0, 1].
inline constexpr double kDomainSlack = 1e-9;

// A point of the fuzzy space [0,1]^d. Entry i is the membership degree of
// the i-th cell of a fixed partition of the entity universe; the all-ones
// vector is the universe and the all-zeros vector the empty set.
class FuzzyVec {
 public:
  FuzzyVec() = default;
  // Throws NumericError on non-finite or out-of-domain entries.
  explicit FuzzyVec(std::vector<double> values);

  static FuzzyVec filled(std::size_t d, double value);
  static FuzzyVec ones(std::size_t d) { return filled(d, 1.0); }
  static FuzzyVec zeros(std::size_t d) { return filled(d, 0.0); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  friend bool operator==(const FuzzyVec&, const FuzzyVec&) = default;

 private:
  std::vector<double> values_;
};

// Elementwise operators; throw std::invalid_argument on dimension mismatch.
FuzzyVec tnorm(Logic logic, const FuzzyVec& a, const FuzzyVec& b);
FuzzyVec tconorm(Logic logic, const FuzzyVec& a, const FuzzyVec& b);
FuzzyVec negate(const FuzzyVec& v);

// Left folds of the binary operators; throw std::invalid_argument when empty.
FuzzyVec fold_conj(Logic logic, std::span<const FuzzyVec> vs);
FuzzyVec fold_disj(Logic logic, std::span<const FuzzyVec> vs);

}  // namespace fuzzqe

#endif  // FUZZQE_FUZZY_LOGIC_HPP_
