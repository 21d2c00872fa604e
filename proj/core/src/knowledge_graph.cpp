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

#include "fuzzqe/knowledge_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

void sort_unique(std::vector<Triple>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

std::vector<Triple> merge_unique(std::span<const Triple> a,
                                 std::span<const Triple> b) {
  std::vector<Triple> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

std::string location(const std::filesystem::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

// Splits on tabs; a trailing CR is tolerated.
std::vector<std::string_view> split_tabs(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool parse_int(std::string_view text, std::int64_t& value) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  return in;
}

std::vector<std::string> read_vocabulary(const std::filesystem::path& file) {
  std::ifstream in = open_input(file);
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    std::int64_t id = 0;
    if (fields.size() != 2 || !parse_int(fields[0], id)) {
      throw DataError(location(file, line_no) +
                      ": malformed line, expected id<TAB>name");
    }
    if (id < static_cast<std::int64_t>(names.size())) {
      throw DataError(location(file, line_no) + ": duplicate id " +
                      std::to_string(id));
    }
    if (id != static_cast<std::int64_t>(names.size())) {
      throw DataError(location(file, line_no) + ": ids must be contiguous from 0, got " +
                      std::to_string(id));
    }
    std::string name(fields[1]);
    if (!seen.insert(name).second) {
      throw DataError(location(file, line_no) + ": duplicate name '" + name + "'");
    }
    names.push_back(std::move(name));
  }
  return names;
}

std::vector<Triple> read_triples(const std::filesystem::path& file,
                                 std::size_t num_entities,
                                 std::size_t num_relations) {
  std::ifstream in = open_input(file);
  std::vector<Triple> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    std::int64_t h = 0, r = 0, t = 0;
    if (fields.size() != 3 || !parse_int(fields[0], h) ||
        !parse_int(fields[1], r) || !parse_int(fields[2], t)) {
      throw DataError(location(file, line_no) +
                      ": malformed line, expected head<TAB>relation<TAB>tail");
    }
    const auto ne = static_cast<std::int64_t>(num_entities);
    const auto nr = static_cast<std::int64_t>(num_relations);
    if (h < 0 || h >= ne || t < 0 || t >= ne) {
      throw DataError(location(file, line_no) + ": dangling entity id");
    }
    if (r < 0 || r >= nr) {
      throw DataError(location(file, line_no) + ": dangling relation id");
    }
    edges.push_back({static_cast<EntityId>(h), static_cast<RelationId>(r),
                     static_cast<EntityId>(t)});
  }
  return edges;
}

}  // namespace

std::string_view to_string(GraphView view) {
  switch (view) {
    case GraphView::kTrain:
      return "train";
    case GraphView::kTrainValid:
      return "train+valid";
    case GraphView::kFull:
      return "full";
  }
  return "?";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "?";
}

GraphView parse_view(std::string_view text) {
  if (text == "train") return GraphView::kTrain;
  if (text == "train+valid" || text == "trainvalid") return GraphView::kTrainValid;
  if (text == "full") return GraphView::kFull;
  throw ConfigError("unknown graph view '" + std::string(text) +
                    "' (expected train, train+valid or full)");
}

KnowledgeGraph::KnowledgeGraph(std::vector<std::string> entity_names,
                               std::vector<std::string> relation_names,
                               std::vector<Triple> train,
                               std::vector<Triple> valid,
                               std::vector<Triple> test)
    : entity_names_(std::move(entity_names)),
      relation_names_(std::move(relation_names)) {
  splits_ = {std::move(train), std::move(valid), std::move(test)};
  const auto ne = static_cast<EntityId>(entity_names_.size());
  const auto nr = static_cast<RelationId>(relation_names_.size());
  for (std::size_t s = 0; s < splits_.size(); ++s) {
    for (const Triple& t : splits_[s]) {
      if (t.head < 0 || t.head >= ne || t.tail < 0 || t.tail >= ne ||
          t.relation < 0 || t.relation >= nr) {
        throw DataError("dangling id in " +
                        std::string(to_string(static_cast<Split>(s))) +
                        " edge (" + std::to_string(t.head) + ", " +
                        std::to_string(t.relation) + ", " +
                        std::to_string(t.tail) + ")");
      }
    }
    sort_unique(splits_[s]);
  }
  view_edges_[0] = splits_[0];
  view_edges_[1] = merge_unique(view_edges_[0], splits_[1]);
  view_edges_[2] = merge_unique(view_edges_[1], splits_[2]);
  for (std::size_t v = 0; v < 3; ++v) {
    forward_[v] = build_adjacency(view_edges_[v], entity_names_.size(), false);
    inverse_[v] = build_adjacency(view_edges_[v], entity_names_.size(), true);
  }
}

KnowledgeGraph::Adjacency KnowledgeGraph::build_adjacency(
    std::span<const Triple> edges, std::size_t num_entities, bool inverse) {
  Adjacency adj;
  adj.offsets.assign(num_entities + 1, 0);
  for (const Triple& t : edges) {
    ++adj.offsets[static_cast<std::size_t>(inverse ? t.tail : t.head) + 1];
  }
  for (std::size_t i = 1; i < adj.offsets.size(); ++i) {
    adj.offsets[i] += adj.offsets[i - 1];
  }
  adj.entries.resize(edges.size());
  std::vector<std::size_t> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
  for (const Triple& t : edges) {
    const auto src = static_cast<std::size_t>(inverse ? t.tail : t.head);
    adj.entries[cursor[src]++] = {t.relation, inverse ? t.head : t.tail};
  }
  for (std::size_t e = 0; e < num_entities; ++e) {
    std::sort(adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[e]),
              adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[e + 1]));
  }
  adj.targets.resize(adj.entries.size());
  for (std::size_t i = 0; i < adj.entries.size(); ++i) {
    adj.targets[i] = adj.entries[i].second;
  }
  return adj;
}

const KnowledgeGraph::Adjacency& KnowledgeGraph::adjacency(
    GraphView view, Direction direction) const {
  const auto v = static_cast<std::size_t>(view);
  return direction == Direction::kForward ? forward_[v] : inverse_[v];
}

void KnowledgeGraph::check_entity(EntityId e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= entity_names_.size()) {
    throw std::out_of_range("entity id " + std::to_string(e) + " out of range");
  }
}

void KnowledgeGraph::check_relation(RelationId r) const {
  if (r < 0 || static_cast<std::size_t>(r) >= relation_names_.size()) {
    throw std::out_of_range("relation id " + std::to_string(r) +
                            " out of range");
  }
}

const std::string& KnowledgeGraph::entity_name(EntityId e) const {
  check_entity(e);
  return entity_names_[static_cast<std::size_t>(e)];
}

const std::string& KnowledgeGraph::relation_name(RelationId r) const {
  check_relation(r);
  return relation_names_[static_cast<std::size_t>(r)];
}

std::span<const EntityId> KnowledgeGraph::neighbors(GraphView view, EntityId e,
                                                    RelationId r,
                                                    Direction direction) const {
  check_entity(e);
  check_relation(r);
  const Adjacency& adj = adjacency(view, direction);
  const auto first = adj.entries.begin() +
                     static_cast<std::ptrdiff_t>(adj.offsets[static_cast<std::size_t>(e)]);
  const auto last = adj.entries.begin() +
                    static_cast<std::ptrdiff_t>(adj.offsets[static_cast<std::size_t>(e) + 1]);
  const auto lo = std::lower_bound(
      first, last, r, [](const auto& entry, RelationId rel) { return entry.first < rel; });
  const auto hi = std::upper_bound(
      lo, last, r, [](RelationId rel, const auto& entry) { return rel < entry.first; });
  const auto begin = static_cast<std::size_t>(lo - adj.entries.begin());
  return {adj.targets.data() + begin, static_cast<std::size_t>(hi - lo)};
}

std::span<const std::pair<RelationId, EntityId>> KnowledgeGraph::incident(
    GraphView view, EntityId e, Direction direction) const {
  check_entity(e);
  const Adjacency& adj = adjacency(view, direction);
  const std::size_t begin = adj.offsets[static_cast<std::size_t>(e)];
  const std::size_t end = adj.offsets[static_cast<std::size_t>(e) + 1];
  return {adj.entries.data() + begin, end - begin};
}

bool KnowledgeGraph::has_edge(GraphView view, const Triple& t) const {
  const auto edges = view_edges(view);
  return std::binary_search(edges.begin(), edges.end(), t);
}

KnowledgeGraph load_graph(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("knowledge graph directory not found: " + dir.string());
  }
  auto entities = read_vocabulary(dir / "entities.tsv");
  auto relations = read_vocabulary(dir / "relations.tsv");
  auto train = read_triples(dir / "train.tsv", entities.size(), relations.size());
  auto valid = read_triples(dir / "valid.tsv", entities.size(), relations.size());
  auto test = read_triples(dir / "test.tsv", entities.size(), relations.size());
  return KnowledgeGraph(std::move(entities), std::move(relations),
                        std::move(train), std::move(valid), std::move(test));
}

void save_graph(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_vocab = [&](const std::string& name,
                         const std::vector<std::string>& names) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << i << '\t' << names[i] << '\n';
    }
  };
  auto write_edges = [&](const std::string& name, std::span<const Triple> edges) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    for (const Triple& t : edges) {
      out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
    }
  };
  write_vocab("entities.tsv", kg.entity_names());
  write_vocab("relations.tsv", kg.relation_names());
  write_edges("train.tsv", kg.train_edges());
  write_edges("valid.tsv", kg.valid_edges());
  write_edges("test.tsv", kg.test_edges());
}

}  // namespace fuzzqe
