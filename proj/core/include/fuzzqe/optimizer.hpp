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

#ifndef FUZZQE_OPTIMIZER_HPP_
#define FUZZQE_OPTIMIZER_HPP_

#include <cstdint>
#include <filesystem>

#include "fuzzqe/model.hpp"

namespace fuzzqe {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct OptimizerState {
  AdamWConfig hyper;
  Parameters first_moment;
  Parameters second_moment;
  std::uint64_t step = 0;

  OptimizerState() = default;
  OptimizerState(const Parameters& shape, AdamWConfig hyper);
};

// One AdamW update with bias-corrected moments. Decoupled weight decay
// touches bases_M, bases_v and rel_coeff only.
void adamw_step(OptimizerState& state, Parameters& params, const Gradients& grads);

// Moments as raw float64 arrays behind a one-line header carrying the step.
void save_optimizer_state(const std::filesystem::path& file,
                          const OptimizerState& state);
OptimizerState load_optimizer_state(const std::filesystem::path& file,
                                    const Parameters& shape, AdamWConfig hyper);

}  // namespace fuzzqe

#endif  // FUZZQE_OPTIMIZER_HPP_
