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

#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fuzzqe/error.hpp"

namespace fuzzqe::cli {
namespace {

template <typename T>
T get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::size_t get_count(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

void require_object(const nlohmann::json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("config key '" + key + "' must be an object");
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw ConfigError("unknown split '" + s + "' (expected train, valid or test)");
}

void apply_model(ModelConfig& m, const nlohmann::json& j) {
  require_object(j, "model");
  for (const auto& [key, v] : j.items()) {
    const std::string k = "model." + key;
    if (key == "d") {
      m.dim = get_count(v, k);
    } else if (key == "K") {
      m.num_bases = get_count(v, k);
    } else if (key == "logic") {
      m.logic = parse_logic(get<std::string>(v, k));
    } else if (key == "norm") {
      m.norm = parse_norm_mode(get<std::string>(v, k));
    } else if (key == "g") {
      m.activation = parse_activation(get<std::string>(v, k));
    } else if (key == "ln_eps") {
      m.ln_eps = get<double>(v, k);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

void apply_train(TrainConfig& t, const nlohmann::json& j) {
  require_object(j, "train");
  for (const auto& [key, v] : j.items()) {
    const std::string k = "train." + key;
    if (key == "batch_size") {
      t.batch_size = get_count(v, k);
    } else if (key == "k_neg") {
      t.k_neg = get_count(v, k);
    } else if (key == "gamma") {
      t.gamma = get<double>(v, k);
    } else if (key == "lr") {
      t.lr = get<double>(v, k);
    } else if (key == "weight_decay") {
      t.weight_decay = get<double>(v, k);
    } else if (key == "max_steps") {
      t.max_steps = get_count(v, k);
    } else if (key == "patience_steps") {
      t.patience_steps = get_count(v, k);
    } else if (key == "eval_every") {
      t.eval_every = get_count(v, k);
    } else if (key == "seed") {
      t.seed = get<std::uint64_t>(v, k);
    } else if (key == "structures") {
      t.structures = get<std::vector<std::string>>(v, k);
    } else if (key == "zq_eps") {
      t.zq_eps = get<double>(v, k);
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

void apply_gen(GenConfig& g, const nlohmann::json& j) {
  require_object(j, "gen");
  for (const auto& [key, v] : j.items()) {
    const std::string k = "gen." + key;
    if (key == "seed") {
      g.seed = get<std::uint64_t>(v, k);
    } else if (key == "max_answers") {
      g.max_answers = get_count(v, k);
    } else if (key == "max_retries") {
      g.max_retries = get_count(v, k);
    } else if (key == "counts") {
      require_object(v, k);
      for (const auto& [split, per_tag] : v.items()) {
        require_object(per_tag, k + "." + split);
        auto& dst = g.counts[parse_split(split)];
        for (const auto& [tag, n] : per_tag.items()) {
          dst[tag] = get_count(n, k + "." + split + "." + tag);
        }
      }
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
}

}  // namespace

void apply_json(RunConfig& c, const nlohmann::json& j) {
  require_object(j, "<root>");
  for (const auto& [key, v] : j.items()) {
    if (key == "model") {
      apply_model(c.model, v);
    } else if (key == "train") {
      apply_train(c.train, v);
    } else if (key == "gen") {
      apply_gen(c.gen, v);
    } else if (key == "kg") {
      c.kg_dir = get<std::string>(v, key);
    } else if (key == "queries") {
      c.queries_dir = get<std::string>(v, key);
    } else if (key == "out") {
      c.out_dir = get<std::string>(v, key);
    } else if (key == "checkpoint") {
      c.checkpoint = get<std::string>(v, key);
    } else if (key == "threads") {
      c.threads = get_count(v, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + file.string() + " is not valid JSON");
  RunConfig c;
  c.threads = default_threads();
  apply_json(c, j);
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["kg"] = c.kg_dir.string();
  j["queries"] = c.queries_dir.string();
  j["out"] = c.out_dir.string();
  j["checkpoint"] = c.checkpoint.string();
  j["threads"] = c.threads;
  j["model"] = {{"d", c.model.dim},
                {"K", c.model.num_bases},
                {"logic", to_string(c.model.logic)},
                {"norm", to_string(c.model.norm)},
                {"g", to_string(c.model.activation)},
                {"ln_eps", c.model.ln_eps}};
  j["train"] = {{"batch_size", c.train.batch_size},
                {"k_neg", c.train.k_neg},
                {"gamma", c.train.gamma},
                {"lr", c.train.lr},
                {"weight_decay", c.train.weight_decay},
                {"max_steps", c.train.max_steps},
                {"patience_steps", c.train.patience_steps},
                {"eval_every", c.train.eval_every},
                {"seed", c.train.seed},
                {"structures", c.train.structures},
                {"zq_eps", c.train.zq_eps}};
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [split, per_tag] : c.gen.counts) {
    nlohmann::ordered_json tags = nlohmann::ordered_json::object();
    for (const auto& [tag, n] : per_tag) tags[tag] = n;
    counts[std::string(to_string(split))] = tags;
  }
  j["gen"] = {{"seed", c.gen.seed},
              {"max_answers", c.gen.max_answers},
              {"max_retries", c.gen.max_retries},
              {"counts", counts}};
  return j;
}

void echo_config(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const auto file = config.out_dir / "resolved_config.json";
  std::ofstream out(file);
  if (!out) throw DataError("cannot write " + file.string());
  out << to_json(config).dump(2) << '\n';
}

std::size_t default_threads() {
  const char* env = std::getenv("FUZZQE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("FUZZQE_THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace fuzzqe::cli
