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

#include "fuzzqe/query_gen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fuzzqe/error.hpp"
#include "fuzzqe/oracle.hpp"
#include "fuzzqe/parallel.hpp"

namespace fuzzqe {
namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename T>
const T& pick(std::mt19937_64& rng, std::span<const T> items) {
  std::uniform_int_distribution<std::size_t> dist(0, items.size() - 1);
  return items[dist(rng)];
}

class Walker {
 public:
  Walker(std::mt19937_64& rng, const KnowledgeGraph& kg, GraphView view,
         const WalkOptions& options)
      : rng_(rng), kg_(kg), view_(view), options_(options) {}

  std::optional<QueryNode> build(const QueryNode& tmpl, EntityId target) {
    switch (tmpl.op) {
      case Op::kAnchor:
        return anchor(target);
      case Op::kProj: {
        const auto edge = incoming(target);
        if (!edge) return std::nullopt;
        auto child = build(tmpl.args.at(0), edge->second);
        if (!child) return std::nullopt;
        return proj(edge->first, std::move(*child));
      }
      case Op::kNot:
        return std::nullopt;
      case Op::kAnd:
        return build_conjunction(tmpl, target);
      case Op::kOr: {
        std::vector<QueryNode> children;
        for (const auto& c : tmpl.args) {
          auto child = build(c, target);
          if (!child) return std::nullopt;
          children.push_back(std::move(*child));
        }
        if (!distinct(children)) return std::nullopt;
        return disj(std::move(children));
      }
    }
    return std::nullopt;
  }

  EntityId random_target() {
    if (options_.held_out && coin()) {
      const auto& held = held_out_edges();
      if (!held.empty()) return pick<Triple>(rng_, held).tail;
    }
    const auto edges = kg_.view_edges(view_);
    if (edges.empty()) throw DataError("cannot sample queries from an empty graph view");
    return pick(rng_, edges).tail;
  }

 private:
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  const std::vector<Triple>& held_out_edges() {
    if (!held_cache_built_) {
      for (std::size_t t = 0; t < options_.held_out->size(); ++t) {
        for (const auto& [r, h] : (*options_.held_out)[t]) {
          held_cache_.push_back({h, r, static_cast<EntityId>(t)});
        }
      }
      held_cache_built_ = true;
    }
    return held_cache_;
  }

  std::optional<std::pair<RelationId, EntityId>> incoming(EntityId t) {
    if (options_.held_out && coin()) {
      const auto& held = (*options_.held_out)[static_cast<std::size_t>(t)];
      if (!held.empty()) {
        return pick<std::pair<RelationId, EntityId>>(rng_, held);
      }
    }
    const auto inc = kg_.incident(view_, t, Direction::kInverse);
    if (inc.empty()) return std::nullopt;
    return pick(rng_, inc);
  }

  std::optional<QueryNode> build_conjunction(const QueryNode& tmpl, EntityId target) {
    std::vector<QueryNode> children(tmpl.args.size());
    std::vector<std::size_t> negated;
    AnswerSet positive;
    bool first = true;
    for (std::size_t i = 0; i < tmpl.args.size(); ++i) {
      if (tmpl.args[i].op == Op::kNot) {
        negated.push_back(i);
        continue;
      }
      auto child = build(tmpl.args[i], target);
      if (!child) return std::nullopt;
      AnswerSet ans = answer_query(kg_, view_, *child);
      if (first) {
        positive = std::move(ans);
        first = false;
      } else {
        AnswerSet both;
        std::set_intersection(positive.begin(), positive.end(), ans.begin(), ans.end(),
                              std::back_inserter(both));
        positive = std::move(both);
      }
      children[i] = std::move(*child);
    }
    // A negated branch is grown from another positive answer so that it
    // actually removes something, and must not contain the target.
    std::vector<EntityId> candidates;
    for (EntityId e : positive) {
      if (e != target) candidates.push_back(e);
    }
    for (std::size_t i : negated) {
      bool done = false;
      for (std::size_t attempt = 0; attempt < options_.max_retries && !done; ++attempt) {
        EntityId from;
        if (!candidates.empty()) {
          from = pick<EntityId>(rng_, candidates);
        } else {
          from = pick(rng_, kg_.view_edges(view_)).tail;
        }
        auto sub = build(tmpl.args[i].args.at(0), from);
        if (!sub) continue;
        const AnswerSet ans = answer_query(kg_, view_, *sub);
        if (std::binary_search(ans.begin(), ans.end(), target)) continue;
        children[i] = negation(std::move(*sub));
        done = true;
      }
      if (!done) return std::nullopt;
    }
    if (!distinct(children)) return std::nullopt;
    return conj(std::move(children));
  }

  static bool distinct(const std::vector<QueryNode>& children) {
    std::set<std::string> seen;
    for (const auto& c : children) {
      if (!seen.insert(encode_query_string(canonicalize(c))).second) return false;
    }
    return true;
  }

  std::mt19937_64& rng_;
  const KnowledgeGraph& kg_;
  GraphView view_;
  const WalkOptions& options_;
  bool held_cache_built_ = false;
  std::vector<Triple> held_cache_;
};

GraphView sampling_view(Split split) {
  switch (split) {
    case Split::kTrain:
      return GraphView::kTrain;
    case Split::kValid:
      return GraphView::kTrainValid;
    case Split::kTest:
      return GraphView::kFull;
  }
  return GraphView::kTrain;
}

IncomingEdges incoming_of(const KnowledgeGraph& kg, Split split) {
  IncomingEdges out(kg.num_entities());
  for (const auto& t : kg.edges(split)) {
    out[static_cast<std::size_t>(t.tail)].emplace_back(t.relation, t.head);
  }
  return out;
}

struct Job {
  Split split;
  std::string tag;
  std::size_t count;
};

std::vector<LabeledQuery> run_job(const KnowledgeGraph& kg, const GenConfig& config,
                                  const Job& job, std::string& shortfall) {
  std::mt19937_64 rng = stream_for(config.seed, job.split, job.tag);
  const GraphView view = sampling_view(job.split);
  IncomingEdges held;
  WalkOptions options;
  options.max_retries = config.max_retries;
  if (job.split != Split::kTrain) {
    held = incoming_of(kg, job.split);
    options.held_out = &held;
  }
  const QueryNode& tmpl = canonical_templates().at(job.tag);
  Walker walker(rng, kg, view, options);

  std::vector<LabeledQuery> out;
  std::set<std::string> seen;
  std::size_t failures = 0;
  while (out.size() < job.count && failures < config.max_retries) {
    auto q = walker.build(tmpl, walker.random_target());
    if (!q) {
      ++failures;
      continue;
    }
    LabeledQuery lq;
    lq.query.root = std::move(*q);
    lq.query.structure_tag = job.tag;
    if (job.split == Split::kTrain) {
      lq.easy = answer_query(kg, GraphView::kTrain, lq.query.root);
      if (lq.easy.empty()) {
        ++failures;
        continue;
      }
    } else {
      const GraphView eval_view =
          job.split == Split::kValid ? GraphView::kTrain : GraphView::kTrainValid;
      AnswerSplit split = split_answers(kg, lq.query.root, eval_view);
      if (split.hard.empty() ||
          split.easy.size() + split.hard.size() > config.max_answers) {
        ++failures;
        continue;
      }
      lq.easy = std::move(split.easy);
      lq.hard = std::move(split.hard);
    }
    if (!seen.insert(encode_query_string(canonicalize(lq.query.root))).second) {
      ++failures;
      continue;
    }
    failures = 0;
    out.push_back(std::move(lq));
  }
  if (out.size() < job.count) {
    shortfall = std::string(to_string(job.split)) + "-" + job.tag + ": requested " +
                std::to_string(job.count) + ", achieved " + std::to_string(out.size());
  }
  return out;
}

}  // namespace

void GenConfig::validate() const {
  if (max_answers < 1) throw ConfigError("gen.max_answers must be at least 1");
  if (max_retries < 1) throw ConfigError("gen.max_retries must be at least 1");
  for (const auto& [split, per_tag] : counts) {
    for (const auto& [tag, n] : per_tag) {
      if (!is_canonical_tag(tag)) throw ConfigError("unknown structure tag '" + tag + "'");
    }
  }
}

std::size_t GenOutput::achieved(Split split, const std::string& tag) const {
  auto it = queries.find(split);
  if (it == queries.end()) return 0;
  auto jt = it->second.find(tag);
  return jt == it->second.end() ? 0 : jt->second.size();
}

std::optional<QueryNode> try_sample_structure_instance(std::mt19937_64& rng,
                                                       const KnowledgeGraph& kg,
                                                       GraphView view, std::string_view tag,
                                                       const WalkOptions& options) {
  const auto& templates = canonical_templates();
  auto it = templates.find(std::string(tag));
  if (it == templates.end()) throw ConfigError("unknown structure tag '" + std::string(tag) + "'");
  Walker walker(rng, kg, view, options);
  return walker.build(it->second, walker.random_target());
}

QueryNode sample_structure_instance(std::mt19937_64& rng, const KnowledgeGraph& kg,
                                    GraphView view, std::string_view tag,
                                    const WalkOptions& options) {
  for (std::size_t attempt = 0; attempt < options.max_retries; ++attempt) {
    auto q = try_sample_structure_instance(rng, kg, view, tag, options);
    if (q) return std::move(*q);
  }
  throw DataError("could not instantiate structure " + std::string(tag) + " after " +
                  std::to_string(options.max_retries) + " attempts");
}

std::mt19937_64 stream_for(std::uint64_t seed, Split split, std::string_view tag) {
  const std::uint64_t h = fnv1a(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(split), static_cast<std::uint32_t>(h),
                    static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

GenOutput generate(const KnowledgeGraph& kg, const GenConfig& config, std::size_t threads) {
  config.validate();
  std::vector<Job> jobs;
  for (const auto& [split, per_tag] : config.counts) {
    for (const auto& [tag, n] : per_tag) {
      if (n > 0) jobs.push_back({split, tag, n});
    }
  }
  std::vector<std::vector<LabeledQuery>> results(jobs.size());
  std::vector<std::string> shortfalls(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    results[i] = run_job(kg, config, jobs[i], shortfalls[i]);
  });
  GenOutput out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out.queries[jobs[i].split][jobs[i].tag] = std::move(results[i]);
    if (!shortfalls[i].empty()) out.shortfalls.push_back(shortfalls[i]);
  }
  return out;
}

nlohmann::ordered_json manifest_json(const GenOutput& output, const GenConfig& config) {
  nlohmann::ordered_json m;
  m["seed"] = config.seed;
  m["max_answers"] = config.max_answers;
  m["max_retries"] = config.max_retries;
  nlohmann::ordered_json splits = nlohmann::ordered_json::object();
  for (const auto& [split, per_tag] : config.counts) {
    nlohmann::ordered_json tags = nlohmann::ordered_json::object();
    for (const auto& tag : canonical_tags()) {
      auto it = per_tag.find(tag);
      if (it == per_tag.end()) continue;
      tags[tag] = {{"requested", it->second}, {"achieved", output.achieved(split, tag)}};
    }
    splits[std::string(to_string(split))] = tags;
  }
  m["splits"] = splits;
  m["shortfalls"] = output.shortfalls;
  return m;
}

void write_generated(const std::filesystem::path& dir, const GenOutput& output,
                     const GenConfig& config) {
  std::filesystem::create_directories(dir);
  for (const auto& [split, per_tag] : output.queries) {
    for (const auto& [tag, list] : per_tag) {
      write_labeled_queries(dir / (std::string(to_string(split)) + "-" + tag + ".jsonl"),
                            list);
    }
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw DataError("cannot write " + (dir / "manifest.json").string());
  out << manifest_json(output, config).dump(2) << '\n';
}

}  // namespace fuzzqe
