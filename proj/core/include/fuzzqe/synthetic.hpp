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

#ifndef FUZZQE_SYNTHETIC_HPP_
#define FUZZQE_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>

#include "fuzzqe/knowledge_graph.hpp"

namespace fuzzqe {

// Clustered graph whose relations compose: every relation maps each cluster
// to one target cluster, and a head links to each member of its target
// cluster with probability `edge_prob`. Multi-hop queries therefore have
// answers that a model can generalize to from one-hop structure.
struct SyntheticConfig {
  std::size_t num_clusters = 30;
  std::size_t cluster_size = 10;
  std::size_t num_relations = 6;
  double edge_prob = 0.5;
  // Extra uniformly random edges, as a fraction of the structured ones.
  double noise = 0.02;
  // Fraction of edges withheld from training, split evenly into valid/test.
  double held_out = 0.1;
  std::uint64_t seed = 7;
};

KnowledgeGraph make_synthetic_graph(const SyntheticConfig& config);

}  // namespace fuzzqe

#endif  // FUZZQE_SYNTHETIC_HPP_
