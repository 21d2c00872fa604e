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

#ifndef FUZZQE_QUERY_GEN_HPP_
#define FUZZQE_QUERY_GEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

struct GenConfig {
  // Requested query counts per split and structure tag.
  std::map<Split, std::map<std::string, std::size_t>> counts;
  // Cap on |easy u hard| for validation and test queries.
  std::size_t max_answers = 100;
  std::uint64_t seed = 0;
  // Attempts allowed per emitted query, and per negated branch.
  std::size_t max_retries = 128;

  // Throws ConfigError.
  void validate() const;
};

struct GenOutput {
  std::map<Split, std::map<std::string, std::vector<LabeledQuery>>> queries;
  // Human-readable notes about (split, tag) pairs that fell short.
  std::vector<std::string> shortfalls;

  std::size_t achieved(Split split, const std::string& tag) const;
};

// Entities' incoming edges from a set of held-out triples, used to steer
// validation and test walks through missing edges.
using IncomingEdges = std::vector<std::vector<std::pair<RelationId, EntityId>>>;

struct WalkOptions {
  std::size_t max_retries = 128;
  // When set, each projection step prefers a held-out incoming edge of the
  // current entity with probability 1/2.
  const IncomingEdges* held_out = nullptr;
};

// One attempt at instantiating the template for `tag` by a backward walk
// from a random answer. Returns nullopt on a dead end.
std::optional<QueryNode> try_sample_structure_instance(std::mt19937_64& rng,
                                                       const KnowledgeGraph& kg,
                                                       GraphView view, std::string_view tag,
                                                       const WalkOptions& options = {});

// Retries the walk up to options.max_retries times; throws DataError when
// every attempt dead-ends. The result has nonempty answers on `view`.
QueryNode sample_structure_instance(std::mt19937_64& rng, const KnowledgeGraph& kg,
                                    GraphView view, std::string_view tag,
                                    const WalkOptions& options = {});

// Independent stream per (seed, split, tag).
std::mt19937_64 stream_for(std::uint64_t seed, Split split, std::string_view tag);

GenOutput generate(const KnowledgeGraph& kg, const GenConfig& config,
                   std::size_t threads = 1);

// Writes <split>-<tag>.jsonl per nonempty request plus manifest.json.
void write_generated(const std::filesystem::path& dir, const GenOutput& output,
                     const GenConfig& config);

nlohmann::ordered_json manifest_json(const GenOutput& output, const GenConfig& config);

}  // namespace fuzzqe

#endif  // FUZZQE_QUERY_GEN_HPP_
