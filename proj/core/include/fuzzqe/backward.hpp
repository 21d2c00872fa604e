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

#ifndef FUZZQE_BACKWARD_HPP_
#define FUZZQE_BACKWARD_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fuzzqe/loss.hpp"
#include "fuzzqe/model.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

// One training triple. `query` is borrowed and must outlive the batch.
struct TrainExample {
  const QueryNode* query = nullptr;
  EntityId positive = 0;
  std::vector<EntityId> negatives;
};

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
};

// Mean batch loss and its exact gradient with respect to every parameter
// tensor. The batch is split into `threads` contiguous shards whose partial
// gradients are reduced in shard order, so a fixed thread count gives
// bit-identical results. Throws NumericError on a non-finite loss or gradient.
BackwardResult backward(const Parameters& params, const ModelConfig& model,
                        const LossConfig& loss, std::span<const TrainExample> batch,
                        std::size_t threads = 1);

// Mean batch loss evaluated through the inference Encoder, a code path
// independent of backward(). Optionally records the piecewise regime.
double batch_loss(const Parameters& params, const ModelConfig& model,
                  const LossConfig& loss, std::span<const TrainExample> batch,
                  BranchTrace* trace = nullptr);

// |a - n| / max(|a|, |n|, 1e-8).
double relative_error(double analytic, double numeric);

struct CoordinateCheck {
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  // Perturbing by +-h moved the function onto a different smooth piece.
  bool excluded = false;
};

// Central differences (f(x+h) - f(x-h)) / (x+h - (x-h)) at each listed
// coordinate of `x`, the denominator being the step actually taken,
// compared against `analytic`. `f` evaluates at the current contents of `x`
// and may fill the trace; coordinates whose +-h probes change the trace are
// marked excluded. `x` is restored on return.
std::vector<CoordinateCheck> finite_difference_check(
    std::span<double> x, std::span<const double> analytic,
    std::span<const std::size_t> coordinates, double h,
    const std::function<long double(BranchTrace*)>& f);

struct GradCheckOptions {
  double h = 1e-6;
  // Evaluate the reference loss in extended precision. Parameters and
  // perturbations stay 64-bit; only the loss arithmetic is widened, which
  // lowers the rounding floor of the difference quotient below the
  // smallest gradients a random model produces.
  bool extended_reference = true;
  // Total coordinates sampled, spread evenly over the six tensors.
  std::size_t num_coordinates = 240;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double loss_discrepancy = 0.0;  // |backward loss - batch_loss|
};

// Loss of a batch computed by a standalone evaluator templated on the
// scalar type. Shares no code with backward() or the Encoder.
long double reference_loss(const Parameters& params, const ModelConfig& model,
                           const LossConfig& loss, std::span<const TrainExample> batch,
                           bool extended, BranchTrace* trace = nullptr);

// Compares backward() with central differences of reference_loss().
GradCheckReport grad_check(const Parameters& params, const ModelConfig& model,
                           const LossConfig& loss, std::span<const TrainExample> batch,
                           const GradCheckOptions& options = {});

}  // namespace fuzzqe

#endif  // FUZZQE_BACKWARD_HPP_
