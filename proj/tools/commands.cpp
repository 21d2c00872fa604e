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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <spdlog/spdlog.h>

#include "fuzzqe/checkpoint.hpp"
#include "fuzzqe/error.hpp"
#include "fuzzqe/oracle.hpp"
#include "fuzzqe/query_gen.hpp"
#include "fuzzqe/trainer.hpp"
#include "fuzzqe/verify.hpp"

namespace fuzzqe::cli {
namespace {

std::filesystem::path split_file(const std::filesystem::path& dir, Split split,
                                 const std::string& tag) {
  return dir / (std::string(to_string(split)) + "-" + tag + ".jsonl");
}

void print_suite(const SuiteResult& r) {
  std::printf("%-18s %s  cases=%zu violations=%zu time=%.2fs", r.name.c_str(),
              r.passed ? "PASS" : "FAIL", r.cases, r.violations, r.seconds);
  if (r.name == "gradient check") std::printf(" max_rel_error=%.3e threshold=1e-4", r.metric);
  std::printf("\n");
  for (const auto& f : r.failures) std::printf("  %s\n", f.c_str());
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
}

}  // namespace

QueriesByTag load_split(const std::filesystem::path& dir, Split split,
                        std::optional<IdLimits> limits) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("query directory " + dir.string() + " does not exist");
  }
  QueriesByTag out;
  for (const auto& tag : canonical_tags()) {
    const auto file = split_file(dir, split, tag);
    if (!std::filesystem::exists(file)) continue;
    auto queries = read_labeled_queries(file, limits);
    for (auto& q : queries) {
      if (q.query.structure_tag != tag) {
        throw DataError(file.string() + ": record tagged '" + q.query.structure_tag +
                        "' in a file for " + tag);
      }
    }
    out[tag] = std::move(queries);
  }
  return out;
}

int cmd_synth_kg(const SyntheticConfig& config, const std::filesystem::path& out) {
  const KnowledgeGraph kg = make_synthetic_graph(config);
  save_graph(kg, out);
  std::printf("wrote %zu entities, %zu relations, %zu/%zu/%zu train/valid/test edges to %s\n",
              kg.num_entities(), kg.num_relations(), kg.train_edges().size(),
              kg.valid_edges().size(), kg.test_edges().size(), out.string().c_str());
  return kExitOk;
}

int cmd_gen_queries(const RunConfig& config) {
  config.gen.validate();
  if (config.out_dir.empty()) throw ConfigError("gen-queries needs --out");
  const KnowledgeGraph kg = load_graph(config.kg_dir);
  echo_config(config);
  const GenOutput out = generate(kg, config.gen, config.threads);
  write_generated(config.out_dir, out, config.gen);
  for (const auto& s : out.shortfalls) spdlog::warn("shortfall: {}", s);
  std::printf("%s\n", manifest_json(out, config.gen).dump(2).c_str());
  return kExitOk;
}

int cmd_train(const RunConfig& config, bool resume) {
  config.model.validate();
  TrainConfig train = config.train;
  train.threads = config.threads;
  train.validate();
  if (config.out_dir.empty()) throw ConfigError("train needs --out");
  if (config.queries_dir.empty()) throw ConfigError("train needs --queries");
  const KnowledgeGraph kg = load_graph(config.kg_dir);
  const IdLimits limits{kg.num_entities(), kg.num_relations()};

  QueriesByTag train_queries;
  for (const auto& tag : train.structures) {
    const auto file = split_file(config.queries_dir, Split::kTrain, tag);
    if (std::filesystem::exists(file)) {
      train_queries[tag] = read_labeled_queries(file, limits);
    } else if (tag == "1p") {
      spdlog::info("{} not found; using every (head, relation) pair of the train split",
                   file.string());
      train_queries[tag] = make_1p_queries(kg, GraphView::kTrain);
    } else {
      throw DataError("missing training queries " + file.string());
    }
  }
  const QueriesByTag valid = load_split(config.queries_dir, Split::kValid, limits);
  if (valid.empty()) spdlog::warn("no validation queries; early stopping is disabled");
  echo_config(config);
  TrainOptions options;
  options.resume = resume;
  const TrainResult result =
      fuzzqe::train(train, config.model, kg, train_queries, valid, config.out_dir, options);
  std::printf("finished at step %zu; best validation avg MRR %.4f at step %zu%s\n",
              result.state.step, result.state.best_valid, result.state.best_step,
              result.early_stopped ? " (early stop)" : "");
  return kExitOk;
}

int cmd_eval(const RunConfig& config, Split split) {
  if (config.checkpoint.empty()) throw ConfigError("eval needs --checkpoint");
  if (config.queries_dir.empty()) throw ConfigError("eval needs --queries");
  if (config.out_dir.empty()) throw ConfigError("eval needs --out");
  const Checkpoint ck = load_checkpoint(config.checkpoint);
  const IdLimits limits{ck.params.num_entities, ck.params.num_relations};
  const QueriesByTag queries = load_split(config.queries_dir, split, limits);
  for (const auto& tag : canonical_tags()) {
    if (!queries.contains(tag)) spdlog::warn("no {} queries for structure {}", to_string(split), tag);
  }
  if (queries.empty()) throw DataError("no query files found in " + config.queries_dir.string());
  echo_config(config);
  const Encoder encoder(ck.params, ck.config);
  EvalReport report = evaluate(encoder, queries, config.threads);
  nlohmann::ordered_json j = report_to_json(report);
  nlohmann::ordered_json baseline = nlohmann::ordered_json::object();
  for (const auto& [tag, list] : queries) {
    baseline[tag] = random_baseline_mrr(ck.params.num_entities, list);
  }
  j["random_baseline_mrr"] = baseline;
  const std::string stem = "eval_" + std::string(to_string(split));
  write_file(config.out_dir / (stem + ".json"), j.dump(2) + "\n");
  const std::string csv = report_to_csv(report);
  write_file(config.out_dir / (stem + ".csv"), csv);
  std::printf("%s", csv.c_str());
  if (report.avg_epfo) std::printf("avg_epfo,%.6f\n", *report.avg_epfo);
  if (report.avg_neg) std::printf("avg_neg,%.6f\n", *report.avg_neg);
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
  return kExitOk;
}

int cmd_answer(const AnswerArgs& args) {
  if (args.checkpoint.empty() && !args.exact) {
    throw ConfigError("answer needs --checkpoint, --exact, or both");
  }
  if (args.k == 0) throw ConfigError("-k must be at least 1");
  std::optional<KnowledgeGraph> kg;
  if (!args.kg_dir.empty()) kg = load_graph(args.kg_dir);
  if (args.exact && !kg) throw ConfigError("answer --exact needs --kg");
  std::optional<IdLimits> limits;
  if (kg) limits = IdLimits{kg->num_entities(), kg->num_relations()};
  auto name = [&](EntityId e) { return kg ? kg->entity_name(e) : std::string("-"); };

  std::vector<EntityId> exact;
  if (args.exact) {
    const QueryNode q = parse_query_string(args.query, limits);
    exact = answer_query(*kg, args.view, q);
    std::printf("exact answers (%zu) on %s:\n", exact.size(),
                std::string(to_string(args.view)).c_str());
    for (EntityId e : exact) std::printf("%d\t%s\n", e, name(e).c_str());
  }
  if (!args.checkpoint.empty()) {
    const Checkpoint ck = load_checkpoint(args.checkpoint);
    if (kg && (kg->num_entities() != ck.params.num_entities ||
               kg->num_relations() != ck.params.num_relations)) {
      throw DataError("checkpoint does not match the graph");
    }
    const QueryNode q =
        parse_query_string(args.query, IdLimits{ck.params.num_entities, ck.params.num_relations});
    const Encoder encoder(ck.params, ck.config);
    const auto scores = encoder.score_all(encoder.embed(q));
    const auto top = top_k(scores, args.k);
    std::printf("rank\tid\tname\tscore\n");
    for (std::size_t i = 0; i < top.size(); ++i) {
      std::printf("%zu\t%d\t%s\t%.9g\n", i + 1, top[i].entity, name(top[i].entity).c_str(),
                  top[i].score);
    }
    if (args.exact) {
      std::size_t hit = 0;
      for (const auto& s : top) hit += std::binary_search(exact.begin(), exact.end(), s.entity);
      const std::size_t denom = std::min(args.k, exact.size());
      std::printf("overlap@%zu\t%.6f\t(%zu of %zu)\n", args.k,
                  denom == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(denom), hit,
                  denom);
    }
  }
  return kExitOk;
}

int cmd_verify(const std::string& mode, std::uint64_t seed) {
  std::vector<SuiteResult> results;
  if (mode == "laws") {
    LawSuiteOptions laws;
    laws.seed = seed;
    ScoreSuiteOptions scores;
    scores.seed = seed + 1;
    results.push_back(run_logic_law_suite(laws));
    results.push_back(run_score_law_suite(scores));
  } else if (mode == "gradcheck") {
    GradientSuiteOptions g;
    g.seed = seed;
    results.push_back(run_gradient_suite(g));
  } else if (mode == "oracle") {
    OracleSuiteOptions o;
    o.seed = seed;
    results.push_back(run_oracle_suite(o));
  } else {
    throw ConfigError("unknown verify mode '" + mode + "' (expected laws, gradcheck or oracle)");
  }
  bool ok = true;
  for (const auto& r : results) {
    print_suite(r);
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitVerify;
}

}  // namespace fuzzqe::cli
