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

#include "fuzzqe/optimizer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fuzzqe/checkpoint.hpp"
#include "fuzzqe/error.hpp"

namespace fuzzqe {
namespace {

constexpr std::string_view kMagic = "FZQEOPT1";

bool decayed(std::string_view tensor) {
  return tensor == "bases_M" || tensor == "bases_v" || tensor == "rel_coeff";
}

}  // namespace

OptimizerState::OptimizerState(const Parameters& shape, AdamWConfig h)
    : hyper(h),
      first_moment(Parameters::zeros_like(shape)),
      second_moment(Parameters::zeros_like(shape)) {}

void adamw_step(OptimizerState& state, Parameters& params, const Gradients& grads) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment)) {
    throw std::invalid_argument("adamw_step: shape mismatch");
  }
  const AdamWConfig& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);

  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = state.first_moment.tensors();
  auto v = state.second_moment.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double decay = decayed(p[k].name) ? 1.0 - h.lr * h.weight_decay : 1.0;
    for (std::size_t i = 0; i < p[k].values.size(); ++i) {
      const double gi = g[k].values[i];
      m[k].values[i] = h.beta1 * m[k].values[i] + (1.0 - h.beta1) * gi;
      v[k].values[i] = h.beta2 * v[k].values[i] + (1.0 - h.beta2) * gi * gi;
      const double mhat = m[k].values[i] / c1;
      const double vhat = v[k].values[i] / c2;
      p[k].values[i] = p[k].values[i] * decay - h.lr * mhat / (std::sqrt(vhat) + h.eps);
    }
  }
}

void save_optimizer_state(const std::filesystem::path& file,
                          const OptimizerState& state) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << kMagic << " step=" << state.step
        << " size=" << state.first_moment.total_size() << '\n';
    for (const auto& t : state.first_moment.tensors()) write_f64(out, t.values);
    for (const auto& t : state.second_moment.tensors()) write_f64(out, t.values);
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

OptimizerState load_optimizer_state(const std::filesystem::path& file,
                                    const Parameters& shape, AdamWConfig hyper) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open optimizer state " + file.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, step_tok, size_tok;
  hs >> magic >> step_tok >> size_tok;
  if (magic != kMagic || step_tok.rfind("step=", 0) != 0 ||
      size_tok.rfind("size=", 0) != 0) {
    throw DataError(file.string() + " is not an optimizer state file");
  }
  OptimizerState state(shape, hyper);
  std::size_t size = 0;
  const std::string sv = size_tok.substr(5);
  const std::string st = step_tok.substr(5);
  auto r1 = std::from_chars(st.data(), st.data() + st.size(), state.step);
  auto r2 = std::from_chars(sv.data(), sv.data() + sv.size(), size);
  if (r1.ec != std::errc() || r2.ec != std::errc()) {
    throw DataError(file.string() + ": bad optimizer header");
  }
  if (size != shape.total_size()) {
    throw DataError(file.string() + ": optimizer state does not match the model shape");
  }
  for (auto& t : state.first_moment.tensors()) read_f64(in, t.values, "first moment");
  for (auto& t : state.second_moment.tensors()) read_f64(in, t.values, "second moment");
  return state;
}

}  // namespace fuzzqe
