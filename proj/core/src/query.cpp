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

#include "fuzzqe/query.hpp"

#include <algorithm>
#include <fstream>

#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DataError("invalid query: " + message);
}

void check_limits(const QueryNode& node, const std::optional<IdLimits>& limits) {
  if (node.op == Op::kAnchor) {
    require(node.id >= 0 && (!limits || static_cast<std::size_t>(node.id) <
                                            limits->num_entities),
            "entity id " + std::to_string(node.id) + " out of range");
  } else if (node.op == Op::kProj) {
    require(node.id >= 0 && (!limits || static_cast<std::size_t>(node.id) <
                                            limits->num_relations),
            "relation id " + std::to_string(node.id) + " out of range");
  }
}

std::vector<std::string> sorted_child_signatures(const QueryNode& node) {
  std::vector<std::string> parts;
  parts.reserve(node.args.size());
  for (const QueryNode& c : node.args) parts.push_back(shape_signature(c));
  std::sort(parts.begin(), parts.end());
  return parts;
}

std::int32_t read_id(const json& j, const char* key) {
  auto it = j.find(key);
  require(it != j.end() && it->is_number_integer(),
          std::string("missing integer field '") + key + "'");
  const auto value = it->get<std::int64_t>();
  require(value >= 0 && value <= INT32_MAX,
          std::string("field '") + key + "' out of range");
  return static_cast<std::int32_t>(value);
}

const json& read_single_child(const json& j) {
  auto it = j.find("arg");
  require(it != j.end(), "missing field 'arg'");
  require(it->is_object(), "'arg' must be exactly one query object");
  return *it;
}

QueryNode parse_node(const json& j, const std::optional<IdLimits>& limits) {
  require(j.is_object(), "query node must be a JSON object");
  auto op_it = j.find("op");
  require(op_it != j.end() && op_it->is_string(), "missing string field 'op'");
  const auto& op = op_it->get_ref<const std::string&>();
  QueryNode node;
  if (op == "anchor") {
    node = anchor(read_id(j, "ent"));
  } else if (op == "proj") {
    node = proj(read_id(j, "rel"), parse_node(read_single_child(j), limits));
  } else if (op == "not") {
    node = negation(parse_node(read_single_child(j), limits));
  } else if (op == "and" || op == "or") {
    auto it = j.find("args");
    require(it != j.end() && it->is_array(), "missing array field 'args'");
    require(it->size() >= 2, "'" + op + "' needs at least two arguments, got " +
                                 std::to_string(it->size()));
    std::vector<QueryNode> children;
    children.reserve(it->size());
    for (const json& c : *it) children.push_back(parse_node(c, limits));
    node = op == "and" ? conj(std::move(children)) : disj(std::move(children));
  } else {
    require(false, "unknown op '" + op + "'");
  }
  check_limits(node, limits);
  return node;
}

std::vector<EntityId> parse_id_list(const json& j, const char* key,
                                    const std::optional<IdLimits>& limits) {
  auto it = j.find(key);
  if (it == j.end()) return {};
  if (!it->is_array()) throw DataError(std::string("'") + key + "' must be an array");
  std::vector<EntityId> ids;
  ids.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_number_integer()) {
      throw DataError(std::string("'") + key + "' must hold integers");
    }
    const auto id = v.get<std::int64_t>();
    if (id < 0 || (limits && static_cast<std::size_t>(id) >= limits->num_entities) ||
        id > INT32_MAX) {
      throw DataError("answer id " + std::to_string(id) + " out of range");
    }
    ids.push_back(static_cast<EntityId>(id));
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

std::string_view to_string(Op op) {
  switch (op) {
    case Op::kAnchor:
      return "anchor";
    case Op::kProj:
      return "proj";
    case Op::kAnd:
      return "and";
    case Op::kOr:
      return "or";
    case Op::kNot:
      return "not";
  }
  return "?";
}

QueryNode anchor(EntityId e) { return QueryNode{Op::kAnchor, e, {}}; }

QueryNode proj(RelationId r, QueryNode child) {
  QueryNode node{Op::kProj, r, {}};
  node.args.push_back(std::move(child));
  return node;
}

QueryNode conj(std::vector<QueryNode> children) {
  return QueryNode{Op::kAnd, 0, std::move(children)};
}

QueryNode disj(std::vector<QueryNode> children) {
  return QueryNode{Op::kOr, 0, std::move(children)};
}

QueryNode negation(QueryNode child) {
  QueryNode node{Op::kNot, 0, {}};
  node.args.push_back(std::move(child));
  return node;
}

std::vector<EntityId> LabeledQuery::all_answers() const {
  std::vector<EntityId> out;
  out.reserve(easy.size() + hard.size());
  std::set_union(easy.begin(), easy.end(), hard.begin(), hard.end(),
                 std::back_inserter(out));
  return out;
}

void validate_node(const QueryNode& node, std::optional<IdLimits> limits) {
  switch (node.op) {
    case Op::kAnchor:
      require(node.args.empty(), "anchor must be a leaf");
      break;
    case Op::kProj:
    case Op::kNot:
      require(node.args.size() == 1, std::string(to_string(node.op)) +
                                         " needs exactly one argument, got " +
                                         std::to_string(node.args.size()));
      break;
    case Op::kAnd:
    case Op::kOr:
      require(node.args.size() >= 2, std::string(to_string(node.op)) +
                                         " needs at least two arguments, got " +
                                         std::to_string(node.args.size()));
      break;
  }
  check_limits(node, limits);
  for (const QueryNode& c : node.args) validate_node(c, limits);
}

void validate_query(const QueryNode& root, std::optional<IdLimits> limits) {
  require(root.op != Op::kAnchor, "root cannot be a bare anchor");
  require(root.op != Op::kNot, "root cannot be a negation");
  validate_node(root, limits);
}

QueryNode canonicalize(QueryNode node) {
  for (QueryNode& c : node.args) c = canonicalize(std::move(c));
  if (node.op == Op::kAnd || node.op == Op::kOr) {
    std::vector<std::pair<std::pair<std::uint64_t, std::string>, QueryNode>> keyed;
    keyed.reserve(node.args.size());
    for (QueryNode& c : node.args) {
      std::string enc = encode_query_string(c);
      const std::uint64_t h = fnv1a(enc);
      keyed.push_back({{h, std::move(enc)}, std::move(c)});
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    node.args.clear();
    for (auto& [key, c] : keyed) node.args.push_back(std::move(c));
  }
  return node;
}

std::uint64_t structural_hash(const QueryNode& node) {
  return fnv1a(encode_query_string(canonicalize(node)));
}

std::string shape_signature(const QueryNode& node) {
  switch (node.op) {
    case Op::kAnchor:
      return "a";
    case Op::kProj:
      return "p(" + shape_signature(node.args.at(0)) + ")";
    case Op::kNot:
      return "n(" + shape_signature(node.args.at(0)) + ")";
    case Op::kAnd:
    case Op::kOr: {
      std::string out = node.op == Op::kAnd ? "i(" : "u(";
      const auto parts = sorted_child_signatures(node);
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
      }
      return out + ")";
    }
  }
  return "?";
}

const std::vector<std::string>& canonical_tags() {
  static const std::vector<std::string> tags = {
      "1p", "2p", "3p", "2i", "3i", "ip", "pi", "2u", "up",
      "2in", "3in", "inp", "pin", "pni"};
  return tags;
}

const std::vector<std::string>& epfo_tags() {
  static const std::vector<std::string> tags = {"1p", "2p", "3p", "2i", "3i",
                                                "pi", "ip", "2u", "up"};
  return tags;
}

const std::vector<std::string>& negation_tags() {
  static const std::vector<std::string> tags = {"2in", "3in", "inp", "pin", "pni"};
  return tags;
}

bool is_canonical_tag(std::string_view tag) {
  const auto& tags = canonical_tags();
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const std::map<std::string, QueryNode>& canonical_templates() {
  static const std::map<std::string, QueryNode> templates = [] {
    std::map<std::string, QueryNode> t;
    t["1p"] = proj(0, anchor(0));
    t["2p"] = proj(1, proj(0, anchor(0)));
    t["3p"] = proj(2, proj(1, proj(0, anchor(0))));
    t["2i"] = conj({proj(0, anchor(0)), proj(1, anchor(1))});
    t["3i"] = conj({proj(0, anchor(0)), proj(1, anchor(1)), proj(2, anchor(2))});
    t["ip"] = proj(2, conj({proj(0, anchor(0)), proj(1, anchor(1))}));
    t["pi"] = conj({proj(1, proj(0, anchor(0))), proj(2, anchor(1))});
    t["2u"] = disj({proj(0, anchor(0)), proj(1, anchor(1))});
    t["up"] = proj(2, disj({proj(0, anchor(0)), proj(1, anchor(1))}));
    t["2in"] = conj({proj(0, anchor(0)), negation(proj(1, anchor(1)))});
    t["3in"] = conj({proj(0, anchor(0)), proj(1, anchor(1)),
                     negation(proj(2, anchor(2)))});
    t["inp"] = proj(2, conj({proj(0, anchor(0)), negation(proj(1, anchor(1)))}));
    t["pin"] = conj({proj(1, proj(0, anchor(0))), negation(proj(2, anchor(1)))});
    t["pni"] = conj({negation(proj(1, proj(0, anchor(0)))), proj(2, anchor(1))});
    return t;
  }();
  return templates;
}

std::string classify(const QueryNode& node) {
  static const std::map<std::string, std::string> by_shape = [] {
    std::map<std::string, std::string> m;
    for (const auto& [tag, tmpl] : canonical_templates()) {
      m[shape_signature(tmpl)] = tag;
    }
    return m;
  }();
  auto it = by_shape.find(shape_signature(node));
  return it == by_shape.end() ? "custom" : it->second;
}

ordered_json encode_query(const QueryNode& node) {
  ordered_json j;
  j["op"] = std::string(to_string(node.op));
  switch (node.op) {
    case Op::kAnchor:
      j["ent"] = node.id;
      break;
    case Op::kProj:
      j["rel"] = node.id;
      j["arg"] = encode_query(node.args.at(0));
      break;
    case Op::kNot:
      j["arg"] = encode_query(node.args.at(0));
      break;
    case Op::kAnd:
    case Op::kOr: {
      ordered_json args = ordered_json::array();
      for (const QueryNode& c : node.args) args.push_back(encode_query(c));
      j["args"] = std::move(args);
      break;
    }
  }
  return j;
}

std::string encode_query_string(const QueryNode& node) {
  return encode_query(node).dump();
}

QueryNode parse_query(const json& j, std::optional<IdLimits> limits) {
  return parse_node(j, limits);
}

QueryNode parse_query_string(std::string_view text,
                             std::optional<IdLimits> limits) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed query JSON: ") + e.what());
  }
  return parse_query(j, limits);
}

ordered_json encode_labeled(const LabeledQuery& q) {
  ordered_json j;
  j["tag"] = q.query.structure_tag;
  j["query"] = encode_query(q.query.root);
  j["easy"] = q.easy;
  j["hard"] = q.hard;
  return j;
}

LabeledQuery parse_labeled(const json& j, std::optional<IdLimits> limits) {
  if (!j.is_object()) throw DataError("labeled query must be a JSON object");
  auto q_it = j.find("query");
  if (q_it == j.end()) throw DataError("labeled query lacks 'query'");
  LabeledQuery out;
  out.query.root = parse_query(*q_it, limits);
  validate_query(out.query.root, limits);
  auto tag_it = j.find("tag");
  out.query.structure_tag = (tag_it != j.end() && tag_it->is_string())
                                ? tag_it->get<std::string>()
                                : classify(out.query.root);
  out.easy = parse_id_list(j, "easy", limits);
  out.hard = parse_id_list(j, "hard", limits);
  std::vector<EntityId> overlap;
  std::set_intersection(out.easy.begin(), out.easy.end(), out.hard.begin(),
                        out.hard.end(), std::back_inserter(overlap));
  if (!overlap.empty()) {
    throw DataError("easy and hard answers overlap at entity " +
                    std::to_string(overlap.front()));
  }
  return out;
}

std::vector<LabeledQuery> read_labeled_queries(const std::filesystem::path& file,
                                               std::optional<IdLimits> limits) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::vector<LabeledQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_labeled(json::parse(line), limits));
    } catch (const json::parse_error& e) {
      throw DataError(file.string() + ":" + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

void write_labeled_queries(const std::filesystem::path& file,
                           std::span<const LabeledQuery> queries) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  for (const LabeledQuery& q : queries) out << encode_labeled(q).dump() << '\n';
}

}  // namespace fuzzqe
