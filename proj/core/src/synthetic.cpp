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

#include "fuzzqe/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "fuzzqe/error.hpp"

namespace fuzzqe {

KnowledgeGraph make_synthetic_graph(const SyntheticConfig& config) {
  if (config.num_clusters < 1 || config.cluster_size < 1 || config.num_relations < 1) {
    throw ConfigError("synthetic graph needs clusters, members and relations");
  }
  if (!(config.edge_prob > 0.0 && config.edge_prob <= 1.0) || config.noise < 0.0 ||
      !(config.held_out >= 0.0 && config.held_out < 1.0)) {
    throw ConfigError("synthetic graph probabilities out of range");
  }
  const std::size_t n = config.num_clusters * config.cluster_size;
  std::mt19937_64 rng(config.seed);
  std::bernoulli_distribution link(config.edge_prob);
  std::uniform_int_distribution<std::size_t> cluster_dist(0, config.num_clusters - 1);

  std::set<Triple> edges;
  for (std::size_t r = 0; r < config.num_relations; ++r) {
    for (std::size_t c = 0; c < config.num_clusters; ++c) {
      const std::size_t target = cluster_dist(rng);
      for (std::size_t i = 0; i < config.cluster_size; ++i) {
        const auto h = static_cast<EntityId>(c * config.cluster_size + i);
        for (std::size_t j = 0; j < config.cluster_size; ++j) {
          if (!link(rng)) continue;
          const auto t = static_cast<EntityId>(target * config.cluster_size + j);
          edges.insert({h, static_cast<RelationId>(r), t});
        }
      }
    }
  }
  const auto noise_edges =
      static_cast<std::size_t>(config.noise * static_cast<double>(edges.size()));
  std::uniform_int_distribution<EntityId> entity_dist(0, static_cast<EntityId>(n - 1));
  std::uniform_int_distribution<RelationId> relation_dist(
      0, static_cast<RelationId>(config.num_relations - 1));
  for (std::size_t i = 0; i < noise_edges; ++i) {
    edges.insert({entity_dist(rng), relation_dist(rng), entity_dist(rng)});
  }

  std::vector<Triple> all(edges.begin(), edges.end());
  std::shuffle(all.begin(), all.end(), rng);
  const auto held = static_cast<std::size_t>(config.held_out * static_cast<double>(all.size()));
  const std::size_t n_valid = held / 2;
  std::vector<Triple> valid(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_valid));
  std::vector<Triple> test(all.begin() + static_cast<std::ptrdiff_t>(n_valid),
                           all.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<Triple> train(all.begin() + static_cast<std::ptrdiff_t>(held), all.end());

  std::vector<std::string> entity_names(n);
  for (std::size_t e = 0; e < n; ++e) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "c%02zu_m%02zu", e / config.cluster_size,
                  e % config.cluster_size);
    entity_names[e] = buf;
  }
  std::vector<std::string> relation_names(config.num_relations);
  for (std::size_t r = 0; r < config.num_relations; ++r) {
    relation_names[r] = "rel" + std::to_string(r);
  }
  return KnowledgeGraph(std::move(entity_names), std::move(relation_names), std::move(train),
                        std::move(valid), std::move(test));
}

}  // namespace fuzzqe
