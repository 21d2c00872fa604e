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

#ifndef FUZZQE_CHECKPOINT_HPP_
#define FUZZQE_CHECKPOINT_HPP_

#include <filesystem>
#include <span>
#include <string>

#include "fuzzqe/model.hpp"

namespace fuzzqe {

struct Checkpoint {
  ModelConfig config;
  Parameters params;
};

// Header line
//   FZQE1 d=<d> K=<K> E=<E> R=<R> logic=<..> norm=<..> g=<..> ln_eps=<..>
// followed by little-endian float64 arrays in canonical tensor order.
void save_checkpoint(const std::filesystem::path& file, const Parameters& params,
                     const ModelConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& file);

std::string checkpoint_header(const Parameters& params, const ModelConfig& config);

// Raw little-endian float64 stream helpers shared with optimizer-state files.
void write_f64(std::ostream& out, std::span<const double> values);
void read_f64(std::istream& in, std::span<double> values, const std::string& what);

}  // namespace fuzzqe

#endif  // FUZZQE_CHECKPOINT_HPP_
