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

#ifndef FUZZQE_KNOWLEDGE_GRAPH_HPP_
#define FUZZQE_KNOWLEDGE_GRAPH_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fuzzqe {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Split { kTrain = 0, kValid = 1, kTest = 2 };

// Cumulative graph views. kTrain < kTrainValid < kFull; each view contains
// every edge of the smaller ones.
enum class GraphView { kTrain = 0, kTrainValid = 1, kFull = 2 };

enum class Direction { kForward, kInverse };

std::string_view to_string(GraphView view);
std::string_view to_string(Split split);
GraphView parse_view(std::string_view text);

// Immutable multi-relational graph with per-view adjacency. Safe for
// concurrent readers once constructed.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Validates ids, sorts and deduplicates each split, and builds forward and
  // inverse indices for all three views. Throws DataError on dangling ids.
  KnowledgeGraph(std::vector<std::string> entity_names,
                 std::vector<std::string> relation_names,
                 std::vector<Triple> train, std::vector<Triple> valid,
                 std::vector<Triple> test);

  std::size_t num_entities() const { return entity_names_.size(); }
  std::size_t num_relations() const { return relation_names_.size(); }

  const std::string& entity_name(EntityId e) const;
  const std::string& relation_name(RelationId r) const;
  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const {
    return relation_names_;
  }

  std::span<const Triple> edges(Split split) const {
    return splits_[static_cast<std::size_t>(split)];
  }
  std::span<const Triple> train_edges() const { return edges(Split::kTrain); }
  std::span<const Triple> valid_edges() const { return edges(Split::kValid); }
  std::span<const Triple> test_edges() const { return edges(Split::kTest); }

  // Deduplicated, lexicographically sorted edge set of a view.
  std::span<const Triple> view_edges(GraphView view) const {
    return view_edges_[static_cast<std::size_t>(view)];
  }

  // Sorted tails (forward) or heads (inverse) adjacent to `e` through `r`.
  // Throws std::out_of_range on bad ids.
  std::span<const EntityId> neighbors(GraphView view, EntityId e, RelationId r,
                                      Direction direction) const;

  // All (relation, neighbor) pairs adjacent to `e`, sorted.
  std::span<const std::pair<RelationId, EntityId>> incident(
      GraphView view, EntityId e, Direction direction) const;

  bool has_edge(GraphView view, const Triple& t) const;

 private:
  struct Adjacency {
    std::vector<std::size_t> offsets;  // size num_entities + 1
    std::vector<std::pair<RelationId, EntityId>> entries;
    std::vector<EntityId> targets;  // entries[i].second, contiguous for spans
  };

  static Adjacency build_adjacency(std::span<const Triple> edges,
                                   std::size_t num_entities, bool inverse);
  const Adjacency& adjacency(GraphView view, Direction direction) const;
  void check_entity(EntityId e) const;
  void check_relation(RelationId r) const;

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::array<std::vector<Triple>, 3> splits_;
  std::array<std::vector<Triple>, 3> view_edges_;
  std::array<Adjacency, 3> forward_;
  std::array<Adjacency, 3> inverse_;
};

// Reads entities.tsv, relations.tsv, train.tsv, valid.tsv and test.tsv from
// `dir`. Throws DataError naming file and line on malformed input.
KnowledgeGraph load_graph(const std::filesystem::path& dir);

// Writes the same five files; the inverse of load_graph.
void save_graph(const KnowledgeGraph& kg, const std::filesystem::path& dir);

}  // namespace fuzzqe

#endif  // FUZZQE_KNOWLEDGE_GRAPH_HPP_
