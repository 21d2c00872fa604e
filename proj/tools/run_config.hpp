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

#ifndef FUZZQE_TOOLS_RUN_CONFIG_HPP_
#define FUZZQE_TOOLS_RUN_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fuzzqe/model.hpp"
#include "fuzzqe/query_gen.hpp"
#include "fuzzqe/trainer.hpp"

namespace fuzzqe::cli {

// Everything a subcommand needs, merged from a JSON file and flags.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  GenConfig gen;
  std::filesystem::path kg_dir;
  std::filesystem::path queries_dir;
  std::filesystem::path out_dir;
  std::filesystem::path checkpoint;
  std::size_t threads = 1;
};

// Overlays the keys present in `j` onto `config`. Unknown keys and wrongly
// typed values raise ConfigError naming the key.
void apply_json(RunConfig& config, const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& file);
nlohmann::ordered_json to_json(const RunConfig& config);

// Writes resolved_config.json into the output directory.
void echo_config(const RunConfig& config);

// FUZZQE_THREADS if set and valid, else 1.
std::size_t default_threads();

std::vector<std::string> split_list(const std::string& text);

}  // namespace fuzzqe::cli

#endif  // FUZZQE_TOOLS_RUN_CONFIG_HPP_
