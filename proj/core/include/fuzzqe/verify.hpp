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

#ifndef FUZZQE_VERIFY_HPP_
#define FUZZQE_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/model.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

// Outcome of one self-check suite run by `fuzzqe verify`.
struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t cases = 0;
  std::size_t violations = 0;
  double seconds = 0.0;
  // Suite-specific headline number, e.g. the largest gradient error.
  double metric = 0.0;
  std::vector<std::string> failures;  // first few, for diagnostics
};

struct LawSuiteOptions {
  std::size_t triples = 10000;
  std::size_t dim = 16;
  std::uint64_t seed = 1;
};

// Connective laws on random vector triples under product and Godel logic:
// commutativity, associativity, elimination, amplification, De Morgan
// duality, boundary values and monotonicity.
SuiteResult run_logic_law_suite(const LawSuiteOptions& options = {});

struct ScoreSuiteOptions {
  std::size_t configs_per_structure = 1000;
  std::size_t dim = 8;
  std::uint64_t seed = 2;
};

// Score-level consequences of the laws for every structure: conjunction
// never raises and disjunction never lowers a score, double negation is
// exact, and phi(q) + phi(not q) equals the entity's L1 mass.
SuiteResult run_score_law_suite(const ScoreSuiteOptions& options = {});

struct GradientSuiteOptions {
  std::size_t dim = 8;
  std::size_t num_entities = 20;
  std::size_t num_relations = 4;
  std::size_t num_bases = 2;
  std::size_t batch = 3;
  std::size_t negatives = 4;
  std::size_t coordinates = 240;
  double h = 1e-6;
  double tolerance = 1e-4;
  std::uint64_t seed = 3;
};

// backward() against central differences for every structure under both
// logics, both activations and both normalizations. metric = max error.
SuiteResult run_gradient_suite(const GradientSuiteOptions& options = {});

struct OracleSuiteOptions {
  std::size_t graphs = 20;
  std::size_t queries = 1000;
  std::size_t num_entities = 50;
  std::size_t num_relations = 4;
  std::size_t edges = 250;
  std::uint64_t seed = 4;
};

// Fuzzy-set evaluation on crisp inputs against set traversal.
SuiteResult run_oracle_suite(const OracleSuiteOptions& options = {});

// Uniformly random graph with every edge in the training split.
KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t num_entities,
                            std::size_t num_relations, std::size_t edges);

// Template for `tag` with uniformly random anchors and relations.
QueryNode random_instance(std::mt19937_64& rng, std::string_view tag,
                          std::size_t num_entities, std::size_t num_relations);

}  // namespace fuzzqe

#endif  // FUZZQE_VERIFY_HPP_
