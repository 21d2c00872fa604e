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

#include "fuzzqe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fuzzqe/backward.hpp"
#include "fuzzqe/checkpoint.hpp"
#include "fuzzqe/error.hpp"
#include "fuzzqe/oracle.hpp"

namespace fuzzqe {
namespace {

constexpr const char* kBest = "best.ckpt";
constexpr const char* kLast = "last.ckpt";
constexpr const char* kOptimizer = "optimizer.state";
constexpr const char* kState = "train_state.json";
constexpr const char* kLog = "train_log.jsonl";

struct Pool {
  std::string tag;
  std::vector<const QueryNode*> queries;
  std::vector<std::vector<EntityId>> answers;
};

nlohmann::ordered_json state_to_json(const TrainState& s) {
  std::ostringstream rng;
  rng << s.rng;
  return {{"step", s.step},
          {"best_valid", s.best_valid},
          {"best_step", s.best_step},
          {"steps_since_improvement", s.steps_since_improvement},
          {"loss_sum", s.loss_sum},
          {"loss_count", s.loss_count},
          {"rng", rng.str()}};
}

TrainState state_from_json(const nlohmann::json& j) {
  TrainState s;
  try {
    s.step = j.at("step").get<std::size_t>();
    s.best_valid = j.at("best_valid").get<double>();
    s.best_step = j.at("best_step").get<std::size_t>();
    s.steps_since_improvement = j.at("steps_since_improvement").get<std::size_t>();
    s.loss_sum = j.at("loss_sum").get<double>();
    s.loss_count = j.at("loss_count").get<std::size_t>();
    std::istringstream rng(j.at("rng").get<std::string>());
    rng >> s.rng;
    if (!rng) throw DataError("bad rng state");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed training state: ") + e.what());
  }
  return s;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::vector<EntityId> complement(std::span<const EntityId> answers, std::size_t n) {
  std::vector<EntityId> out;
  std::size_t j = 0;
  for (std::size_t e = 0; e < n; ++e) {
    const auto id = static_cast<EntityId>(e);
    while (j < answers.size() && answers[j] < id) ++j;
    if (j < answers.size() && answers[j] == id) continue;
    out.push_back(id);
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
  if (k_neg < 1) throw ConfigError("train.k_neg must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("train.weight_decay must be non-negative");
  if (!std::isfinite(gamma)) throw ConfigError("train.gamma must be finite");
  if (!(zq_eps > 0.0)) throw ConfigError("train.zq_eps must be positive");
  if (eval_every < 1) throw ConfigError("train.eval_every must be at least 1");
  if (patience_steps > max_steps) {
    throw ConfigError("train.patience_steps must not exceed train.max_steps");
  }
  if (structures.empty()) throw ConfigError("train.structures must not be empty");
  for (const auto& tag : structures) {
    if (!is_canonical_tag(tag)) throw ConfigError("unknown structure tag '" + tag + "'");
  }
  if (threads < 1) throw ConfigError("threads must be at least 1");
}

AdamWConfig TrainConfig::optimizer() const {
  AdamWConfig c;
  c.lr = lr;
  c.weight_decay = weight_decay;
  return c;
}

std::vector<EntityId> sample_negatives(std::mt19937_64& rng, std::size_t num_entities,
                                       std::span<const EntityId> answers, std::size_t k) {
  if (num_entities == 0) throw DataError("cannot sample negatives from an empty graph");
  if (answers.size() >= num_entities) {
    throw DataError("answer set covers every entity; no negatives exist");
  }
  std::vector<EntityId> out;
  out.reserve(k);
  if (answers.size() * 2 > num_entities) {
    const auto pool = complement(answers, num_entities);
    if (pool.empty()) throw DataError("answer set covers every entity; no negatives exist");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < k; ++i) out.push_back(pool[pick(rng)]);
    return out;
  }
  std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(num_entities - 1));
  while (out.size() < k) {
    const EntityId e = pick(rng);
    if (!std::binary_search(answers.begin(), answers.end(), e)) out.push_back(e);
  }
  return out;
}

std::vector<EntityId> sample_negatives(std::mt19937_64& rng, const KnowledgeGraph& kg,
                                       const QueryNode& q, std::size_t k) {
  const AnswerSet answers = answer_query(kg, GraphView::kTrain, q);
  return sample_negatives(rng, kg.num_entities(), answers, k);
}

std::vector<LabeledQuery> make_1p_queries(const KnowledgeGraph& kg, GraphView view) {
  std::vector<LabeledQuery> out;
  const auto edges = kg.view_edges(view);
  for (std::size_t i = 0; i < edges.size();) {
    const Triple& first = edges[i];
    LabeledQuery q;
    q.query.root = proj(first.relation, anchor(first.head));
    q.query.structure_tag = "1p";
    std::size_t j = i;
    while (j < edges.size() && edges[j].head == first.head &&
           edges[j].relation == first.relation) {
      q.easy.push_back(edges[j].tail);
      ++j;
    }
    out.push_back(std::move(q));
    i = j;
  }
  return out;
}

double average_mrr(const EvalReport& report) {
  if (report.per_structure.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [tag, m] : report.per_structure) sum += m.mrr;
  return sum / static_cast<double>(report.per_structure.size());
}

TrainResult train(const TrainConfig& config, const ModelConfig& model,
                  const KnowledgeGraph& kg, const QueriesByTag& train_queries,
                  const QueriesByTag& valid_queries, const std::filesystem::path& out_dir,
                  const TrainOptions& options) {
  config.validate();
  model.validate();
  const std::size_t num_entities = kg.num_entities();

  std::vector<Pool> pools;
  for (const auto& tag : config.structures) {
    auto it = train_queries.find(tag);
    if (it == train_queries.end() || it->second.empty()) {
      spdlog::warn("no training queries for structure {}; skipping it", tag);
      continue;
    }
    Pool pool{tag, {}, {}};
    for (const auto& q : it->second) {
      auto answers = q.all_answers();
      if (answers.empty() || answers.size() >= num_entities) continue;
      pool.queries.push_back(&q.query.root);
      pool.answers.push_back(std::move(answers));
    }
    if (pool.answers.size() != it->second.size()) {
      spdlog::warn("{}: {} queries without usable answers are skipped", tag,
                   it->second.size() - pool.answers.size());
    }
    if (!pool.answers.empty()) pools.push_back(std::move(pool));
  }
  if (pools.empty()) throw DataError("no training queries for any configured structure");

  std::filesystem::create_directories(out_dir);
  const LossConfig loss = config.loss();

  Parameters params;
  OptimizerState opt;
  TrainState state;
  if (options.resume) {
    const Checkpoint ck = load_checkpoint(out_dir / kLast);
    if (!(ck.config == model)) {
      throw ConfigError("resume: checkpoint model configuration differs from the requested one");
    }
    params = ck.params;
    opt = load_optimizer_state(out_dir / kOptimizer, params, config.optimizer());
    std::ifstream in(out_dir / kState);
    if (!in) throw DataError("resume: missing " + (out_dir / kState).string());
    state = state_from_json(nlohmann::json::parse(in, nullptr, false));
    spdlog::info("resuming at step {}", state.step);
  } else {
    params = options.init ? *options.init
                          : init_parameters(num_entities, kg.num_relations(), model, config.seed);
    if (params.num_entities != num_entities || params.num_relations != kg.num_relations()) {
      throw ConfigError("initial parameters do not match the graph");
    }
    opt = OptimizerState(params, config.optimizer());
    state.rng.seed(config.seed ^ 0x9E3779B97F4A7C15ULL);
    std::ofstream(out_dir / kLog, std::ios::trunc);
  }

  TrainResult result;
  result.best_params = params;
  if (options.resume && std::filesystem::exists(out_dir / kBest)) {
    result.best_params = load_checkpoint(out_dir / kBest).params;
  }

  auto evaluate_point = [&]() {
    nlohmann::ordered_json rec;
    rec["step"] = state.step;
    rec["train_loss"] = state.loss_count > 0
                            ? nlohmann::ordered_json(state.loss_sum /
                                                     static_cast<double>(state.loss_count))
                            : nlohmann::ordered_json(nullptr);
    state.loss_sum = 0.0;
    state.loss_count = 0;
    if (!valid_queries.empty()) {
      const EvalReport report = evaluate(params, model, valid_queries, config.threads);
      const double avg = average_mrr(report);
      rec["valid_avg_mrr"] = avg;
      nlohmann::ordered_json per = nlohmann::ordered_json::object();
      for (const auto& [tag, m] : report.per_structure) per[tag] = m.mrr;
      rec["per_structure_mrr"] = per;
      if (avg > state.best_valid) {
        state.best_valid = avg;
        state.best_step = state.step;
        result.best_params = params;
        save_checkpoint(out_dir / kBest, params, model);
      }
      state.steps_since_improvement = state.step - state.best_step;
      spdlog::info("step {} loss {} valid avg MRR {:.4f} (best {:.4f} at {})", state.step,
                   rec["train_loss"].dump(), avg, state.best_valid, state.best_step);
    } else {
      rec["valid_avg_mrr"] = nullptr;
      rec["per_structure_mrr"] = nlohmann::ordered_json::object();
      result.best_params = params;
      save_checkpoint(out_dir / kBest, params, model);
    }
    save_checkpoint(out_dir / kLast, params, model);
    save_optimizer_state(out_dir / kOptimizer, opt);
    write_text(out_dir / kState, state_to_json(state).dump(2) + "\n");
    std::ofstream log(out_dir / kLog, std::ios::app);
    log << rec.dump() << '\n';
    if (options.on_eval) options.on_eval(rec);
  };

  if (!options.resume) evaluate_point();

  std::vector<TrainExample> batch(config.batch_size);
  while (state.step < config.max_steps) {
    if (state.steps_since_improvement >= config.patience_steps && !valid_queries.empty() &&
        state.step > 0) {
      result.early_stopped = true;
      spdlog::info("early stop at step {}: no improvement for {} steps", state.step,
                   state.steps_since_improvement);
      break;
    }
    const Pool& pool = pools[state.step % pools.size()];
    std::uniform_int_distribution<std::size_t> pick_query(0, pool.answers.size() - 1);
    for (auto& ex : batch) {
      const std::size_t qi = pick_query(state.rng);
      const auto& answers = pool.answers[qi];
      std::uniform_int_distribution<std::size_t> pick_answer(0, answers.size() - 1);
      ex.query = pool.queries[qi];
      ex.positive = answers[pick_answer(state.rng)];
      ex.negatives = sample_negatives(state.rng, num_entities, answers, config.k_neg);
    }
    BackwardResult br;
    try {
      br = backward(params, model, loss, batch, config.threads);
    } catch (const NumericError& e) {
      spdlog::error("step {}: {}; dumping state", state.step, e.what());
      save_checkpoint(out_dir / "failed.ckpt", params, model);
      throw;
    }
    adamw_step(opt, params, br.grads);
    ++state.step;
    state.loss_sum += br.loss;
    ++state.loss_count;
    if (state.step % config.eval_every == 0 || state.step == config.max_steps) {
      evaluate_point();
    }
  }
  result.state = state;
  return result;
}

}  // namespace fuzzqe
