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

#ifndef FUZZQE_TOOLS_COMMANDS_HPP_
#define FUZZQE_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fuzzqe/evaluator.hpp"
#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/synthetic.hpp"
#include "run_config.hpp"

namespace fuzzqe::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerify = 3;

int cmd_synth_kg(const SyntheticConfig& config, const std::filesystem::path& out);
int cmd_gen_queries(const RunConfig& config);
int cmd_train(const RunConfig& config, bool resume);
int cmd_eval(const RunConfig& config, Split split);

struct AnswerArgs {
  std::filesystem::path checkpoint;
  std::filesystem::path kg_dir;
  std::string query;  // JSON text
  std::size_t k = 10;
  bool exact = false;
  GraphView view = GraphView::kFull;
};
int cmd_answer(const AnswerArgs& args);

int cmd_verify(const std::string& mode, std::uint64_t seed);

// <split>-<tag>.jsonl for every canonical tag present in `dir`.
QueriesByTag load_split(const std::filesystem::path& dir, Split split,
                        std::optional<IdLimits> limits = {});

}  // namespace fuzzqe::cli

#endif  // FUZZQE_TOOLS_COMMANDS_HPP_
