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

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "fuzzqe/error.hpp"

namespace {

using fuzzqe::cli::RunConfig;

// Flags shared by the config-driven subcommands. Values set here win over
// the config file.
struct Overrides {
  std::string config;
  std::string kg, queries, out, checkpoint;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> dim, bases;
  std::optional<std::string> logic, norm, activation;
  std::optional<std::size_t> batch_size, k_neg, max_steps, patience, eval_every;
  std::optional<double> gamma, lr, weight_decay;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> structures;

  void add_paths(CLI::App* app, bool checkpoint_flag) {
    app->add_option("--config", config, "JSON run configuration");
    app->add_option("--kg", kg, "Knowledge graph directory");
    app->add_option("--queries", queries, "Query directory");
    app->add_option("--out", out, "Output directory");
    if (checkpoint_flag) app->add_option("--checkpoint", checkpoint, "Checkpoint file");
    app->add_option("--threads", threads, "Worker threads (default FUZZQE_THREADS or 1)");
  }

  void add_model(CLI::App* app) {
    app->add_option("--dim", dim, "Embedding dimension d");
    app->add_option("--bases", bases, "Number of relation bases K");
    app->add_option("--logic", logic, "product or godel");
    app->add_option("--norm", norm, "l1 or l2");
    app->add_option("--activation", activation, "logistic or bounded_rectifier");
  }

  void add_train(CLI::App* app) {
    app->add_option("--batch-size", batch_size);
    app->add_option("--k-neg", k_neg, "Negatives per positive");
    app->add_option("--max-steps", max_steps);
    app->add_option("--patience", patience, "Early-stopping patience in steps");
    app->add_option("--eval-every", eval_every);
    app->add_option("--gamma", gamma, "Loss margin");
    app->add_option("--lr", lr, "AdamW learning rate");
    app->add_option("--weight-decay", weight_decay);
    app->add_option("--structures", structures, "Comma-separated training structures");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : fuzzqe::cli::load_run_config(config);
    if (config.empty()) c.threads = fuzzqe::cli::default_threads();
    if (!kg.empty()) c.kg_dir = kg;
    if (!queries.empty()) c.queries_dir = queries;
    if (!out.empty()) c.out_dir = out;
    if (!checkpoint.empty()) c.checkpoint = checkpoint;
    if (threads) c.threads = *threads;
    if (c.threads == 0) throw fuzzqe::ConfigError("--threads must be at least 1");
    if (dim) c.model.dim = *dim;
    if (bases) c.model.num_bases = *bases;
    if (logic) c.model.logic = fuzzqe::parse_logic(*logic);
    if (norm) c.model.norm = fuzzqe::parse_norm_mode(*norm);
    if (activation) c.model.activation = fuzzqe::parse_activation(*activation);
    if (batch_size) c.train.batch_size = *batch_size;
    if (k_neg) c.train.k_neg = *k_neg;
    if (max_steps) c.train.max_steps = *max_steps;
    if (patience) {
      c.train.patience_steps = *patience;
    } else if (max_steps && c.train.patience_steps > *max_steps) {
      c.train.patience_steps = *max_steps;
    }
    if (eval_every) c.train.eval_every = *eval_every;
    if (gamma) c.train.gamma = *gamma;
    if (lr) c.train.lr = *lr;
    if (weight_decay) c.train.weight_decay = *weight_decay;
    if (seed) {
      c.train.seed = *seed;
      c.gen.seed = *seed;
    }
    if (structures) c.train.structures = fuzzqe::cli::split_list(*structures);
    return c;
  }
};

fuzzqe::Split parse_split_flag(const std::string& s) {
  if (s == "valid") return fuzzqe::Split::kValid;
  if (s == "test") return fuzzqe::Split::kTest;
  throw fuzzqe::ConfigError("--split must be valid or test");
}

int run(int argc, char** argv) {
  CLI::App app{"Fuzzy-logic query embedding over knowledge graphs"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  fuzzqe::SyntheticConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth-kg", "Write a clustered synthetic graph");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--clusters", synth.num_clusters);
  synth_cmd->add_option("--cluster-size", synth.cluster_size);
  synth_cmd->add_option("--relations", synth.num_relations);
  synth_cmd->add_option("--edge-prob", synth.edge_prob);
  synth_cmd->add_option("--noise", synth.noise);
  synth_cmd->add_option("--held-out", synth.held_out);
  synth_cmd->add_option("--seed", synth.seed);

  Overrides gen;
  auto* gen_cmd = app.add_subcommand("gen-queries", "Sample labeled queries from a graph");
  gen.add_paths(gen_cmd, false);
  gen_cmd->add_option("--seed", gen.seed);

  Overrides train;
  bool resume = false;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train.add_paths(train_cmd, false);
  train.add_model(train_cmd);
  train.add_train(train_cmd);
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_flag("--resume", resume, "Continue from last.ckpt in --out");

  Overrides eval;
  std::string eval_split = "test";
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval.add_paths(eval_cmd, true);
  eval_cmd->add_option("--split", eval_split, "valid or test");

  fuzzqe::cli::AnswerArgs answer;
  std::string answer_ckpt, answer_kg, answer_view = "full";
  auto* answer_cmd = app.add_subcommand("answer", "Rank entities for one query");
  answer_cmd->add_option("--checkpoint", answer_ckpt);
  answer_cmd->add_option("--kg", answer_kg);
  answer_cmd->add_option("query", answer.query, "Query JSON")->required();
  answer_cmd->add_option("-k", answer.k, "Rows to print");
  answer_cmd->add_flag("--exact", answer.exact, "Exact traversal over --kg");
  answer_cmd->add_option("--view", answer_view, "Graph view for --exact");

  std::string verify_mode;
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("mode", verify_mode, "laws, gradcheck or oracle")->required();
  verify_cmd->add_option("--seed", verify_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fuzzqe::cli::kExitOk : fuzzqe::cli::kExitConfig;
  }

  spdlog::set_default_logger(spdlog::stderr_color_st("fuzzqe"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (*synth_cmd) return fuzzqe::cli::cmd_synth_kg(synth, synth_out);
  if (*gen_cmd) return fuzzqe::cli::cmd_gen_queries(gen.resolve());
  if (*train_cmd) return fuzzqe::cli::cmd_train(train.resolve(), resume);
  if (*eval_cmd) return fuzzqe::cli::cmd_eval(eval.resolve(), parse_split_flag(eval_split));
  if (*answer_cmd) {
    answer.checkpoint = answer_ckpt;
    answer.kg_dir = answer_kg;
    answer.view = fuzzqe::parse_view(answer_view);
    return fuzzqe::cli::cmd_answer(answer);
  }
  return fuzzqe::cli::cmd_verify(verify_mode, verify_seed);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fuzzqe::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return fuzzqe::cli::kExitConfig;
  } catch (const fuzzqe::VerificationError& e) {
    std::fprintf(stderr, "verification failed: %s\n", e.what());
    return fuzzqe::cli::kExitVerify;
  } catch (const fuzzqe::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return fuzzqe::cli::kExitData;
  } catch (const fuzzqe::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return fuzzqe::cli::kExitData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return fuzzqe::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return fuzzqe::cli::kExitData;
  }
}
