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

#ifndef FUZZQE_QUERY_HPP_
#define FUZZQE_QUERY_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuzzqe/knowledge_graph.hpp"

namespace fuzzqe {

enum class Op : std::uint8_t { kAnchor, kProj, kAnd, kOr, kNot };

std::string_view to_string(Op op);

// One node of a tree-shaped query. `id` is the entity of an anchor or the
// relation of a projection and is unused otherwise.
struct QueryNode {
  Op op = Op::kAnchor;
  std::int32_t id = 0;
  std::vector<QueryNode> args;

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

QueryNode anchor(EntityId e);
QueryNode proj(RelationId r, QueryNode child);
QueryNode conj(std::vector<QueryNode> children);
QueryNode disj(std::vector<QueryNode> children);
QueryNode negation(QueryNode child);

struct Query {
  QueryNode root;
  std::string structure_tag = "custom";

  friend bool operator==(const Query&, const Query&) = default;
};

// Query with its answer split. Train records keep all observed answers in
// `easy` and leave `hard` empty.
struct LabeledQuery {
  Query query;
  std::vector<EntityId> easy;
  std::vector<EntityId> hard;

  // Sorted union of easy and hard.
  std::vector<EntityId> all_answers() const;
};

struct IdLimits {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
};

// Arity and id-range checks on any subtree. Throws DataError.
void validate_node(const QueryNode& node, std::optional<IdLimits> limits = {});

// validate_node plus the root rules: the root may be neither a bare anchor
// nor a negation.
void validate_query(const QueryNode& root, std::optional<IdLimits> limits = {});

// Children of every And/Or sorted by structural hash; the result is a fixed
// representative of all child orderings.
QueryNode canonicalize(QueryNode node);

// Hash of the canonical form; equal for queries equal up to And/Or ordering.
std::uint64_t structural_hash(const QueryNode& node);

// Id-free canonical shape string such as "i(p(a),n(p(a)))".
std::string shape_signature(const QueryNode& node);

// The fourteen benchmark structures in reporting order.
const std::vector<std::string>& canonical_tags();
const std::vector<std::string>& epfo_tags();
const std::vector<std::string>& negation_tags();
bool is_canonical_tag(std::string_view tag);

// Template trees for every canonical tag. Placeholder ids are distinct small
// integers so anchors and relations of different branches differ.
const std::map<std::string, QueryNode>& canonical_templates();

// Canonical tag whose template matches the shape up to And/Or child order,
// or "custom".
std::string classify(const QueryNode& node);

// Wire format: {"op":"anchor","ent":int} | {"op":"proj","rel":int,"arg":obj}
// | {"op":"and"|"or","args":[...]} | {"op":"not","arg":obj}.
nlohmann::ordered_json encode_query(const QueryNode& node);
std::string encode_query_string(const QueryNode& node);
QueryNode parse_query(const nlohmann::json& json,
                      std::optional<IdLimits> limits = {});
QueryNode parse_query_string(std::string_view text,
                             std::optional<IdLimits> limits = {});

// JSON-Lines record {"tag":str,"query":obj,"easy":[int],"hard":[int]}.
nlohmann::ordered_json encode_labeled(const LabeledQuery& q);
LabeledQuery parse_labeled(const nlohmann::json& json,
                           std::optional<IdLimits> limits = {});

std::vector<LabeledQuery> read_labeled_queries(
    const std::filesystem::path& file, std::optional<IdLimits> limits = {});
void write_labeled_queries(const std::filesystem::path& file,
                           std::span<const LabeledQuery> queries);

}  // namespace fuzzqe

#endif  // FUZZQE_QUERY_HPP_
