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

#include "fuzzqe/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fuzzqe/error.hpp"
#include "fuzzqe/linalg.hpp"

namespace fuzzqe {
namespace {

constexpr std::uint32_t kBelow = 0;
constexpr std::uint32_t kInside = 1;
constexpr std::uint32_t kAbove = 2;

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
  }
}

void fold_children(Logic logic, bool conjunction,
                   std::span<const std::vector<double>> children,
                   std::vector<double>& out, BranchTrace* trace) {
  out = children[0];
  const std::size_t d = out.size();
  std::vector<std::uint32_t> winner(trace && logic == Logic::kGodel ? d : 0, 0);
  for (std::size_t c = 1; c < children.size(); ++c) {
    const std::vector<double>& next = children[c];
    for (std::size_t i = 0; i < d; ++i) {
      if (logic == Logic::kGodel) {
        const bool take = conjunction ? next[i] < out[i] : next[i] > out[i];
        if (take) {
          out[i] = next[i];
          if (!winner.empty()) winner[i] = static_cast<std::uint32_t>(c);
        }
      } else {
        out[i] = conjunction ? t_norm(logic, out[i], next[i])
                             : t_conorm(logic, out[i], next[i]);
      }
    }
  }
  if (trace && !winner.empty()) {
    trace->codes.insert(trace->codes.end(), winner.begin(), winner.end());
  }
}

// Shared by the free functions and the Encoder. `relation(r)` yields a
// RelationMap-like object, `entity(e, out)` writes p_e.
template <typename RelationFn, typename EntityFn>
void embed_node(const QueryNode& node, const Parameters& params,
                const ModelConfig& config, RelationFn& relation, EntityFn& entity,
                BranchTrace* trace, std::vector<double>& out) {
  const std::size_t d = config.dim;
  switch (node.op) {
    case Op::kAnchor:
      out.resize(d);
      entity(node.id, std::span<double>(out));
      return;
    case Op::kProj: {
      std::vector<double> input;
      embed_node(node.args.at(0), params, config, relation, entity, trace, input);
      out.resize(d);
      const auto& map = relation(node.id);
      project_into(*map, params, config, input, out);
      if (trace && config.activation == Activation::kBoundedRectifier) {
        // Regime codes are recomputed from the pre-activation. The output of
        // the rectifier equals the clamped pre-activation, so an output of 0
        // or 1 marks a clamped entry.
        for (double v : out) {
          trace->codes.push_back(v <= 0.0 ? kBelow : (v >= 1.0 ? kAbove : kInside));
        }
      }
      return;
    }
    case Op::kNot: {
      // Double negation is the identity; skipping the pair keeps it exact.
      if (node.args.at(0).op == Op::kNot) {
        embed_node(node.args[0].args.at(0), params, config, relation, entity, trace, out);
        return;
      }
      embed_node(node.args.at(0), params, config, relation, entity, trace, out);
      for (double& v : out) v = negator(v);
      return;
    }
    case Op::kAnd:
    case Op::kOr: {
      if (node.args.empty()) throw std::invalid_argument("empty and/or node");
      std::vector<std::vector<double>> children(node.args.size());
      for (std::size_t c = 0; c < node.args.size(); ++c) {
        embed_node(node.args[c], params, config, relation, entity, trace,
                   children[c]);
      }
      fold_children(config.logic, node.op == Op::kAnd, children, out, trace);
      return;
    }
  }
}

void check_entity(const Parameters& params, EntityId e) {
  if (e < 0 || static_cast<std::size_t>(e) >= params.num_entities) {
    throw std::out_of_range("entity id " + std::to_string(e) + " out of range");
  }
}

void check_relation(const Parameters& params, RelationId r) {
  if (r < 0 || static_cast<std::size_t>(r) >= params.num_relations) {
    throw std::out_of_range("relation id " + std::to_string(r) + " out of range");
  }
}

}  // namespace

std::string_view to_string(NormMode mode) {
  return mode == NormMode::kL1 ? "L1" : "L2";
}

std::string_view to_string(Activation activation) {
  return activation == Activation::kLogistic ? "logistic" : "bounded_rectifier";
}

NormMode parse_norm_mode(std::string_view text) {
  if (text == "L1" || text == "l1") return NormMode::kL1;
  if (text == "L2" || text == "l2") return NormMode::kL2;
  throw ConfigError("unknown norm mode '" + std::string(text) + "' (expected L1 or L2)");
}

Activation parse_activation(std::string_view text) {
  if (text == "logistic") return Activation::kLogistic;
  if (text == "bounded_rectifier" || text == "rectifier") {
    return Activation::kBoundedRectifier;
  }
  throw ConfigError("unknown activation '" + std::string(text) +
                    "' (expected logistic or bounded_rectifier)");
}

void ModelConfig::validate() const {
  if (dim < 2) throw ConfigError("model.d must be at least 2");
  if (num_bases < 1) throw ConfigError("model.K must be at least 1");
  if (!(ln_eps > 0.0)) throw ConfigError("model.ln_eps must be positive");
  if (logic == Logic::kLukasiewicz) {
    throw ConfigError(
        "Lukasiewicz logic cannot be used for query embedding: its "
        "connectives saturate at 0 and 1 and block gradient flow; use product "
        "or godel");
  }
}

Parameters::Parameters(std::size_t ne, std::size_t nr, std::size_t d,
                       std::size_t k)
    : num_entities(ne),
      num_relations(nr),
      dim(d),
      num_bases(k),
      entity_theta(ne * d, 0.0),
      bases_M(k * d * d, 0.0),
      bases_v(k * d, 0.0),
      rel_coeff(nr * k, 0.0),
      ln_gain(d, 0.0),
      ln_bias(d, 0.0) {}

std::vector<Parameters::TensorRef> Parameters::tensors() {
  return {{"entity_theta", entity_theta}, {"bases_M", bases_M},
          {"bases_v", bases_v},           {"rel_coeff", rel_coeff},
          {"ln_gain", ln_gain},           {"ln_bias", ln_bias}};
}

std::vector<Parameters::ConstTensorRef> Parameters::tensors() const {
  return {{"entity_theta", entity_theta}, {"bases_M", bases_M},
          {"bases_v", bases_v},           {"rel_coeff", rel_coeff},
          {"ln_gain", ln_gain},           {"ln_bias", ln_bias}};
}

std::size_t Parameters::total_size() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.values.size();
  return n;
}

bool Parameters::same_shape(const Parameters& other) const {
  return num_entities == other.num_entities &&
         num_relations == other.num_relations && dim == other.dim &&
         num_bases == other.num_bases;
}

bool Parameters::all_finite() const {
  for (const auto& t : tensors()) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void Parameters::add(const Parameters& other) {
  if (!same_shape(other)) throw std::invalid_argument("parameter shape mismatch");
  auto mine = tensors();
  const auto theirs = other.tensors();
  for (std::size_t t = 0; t < mine.size(); ++t) {
    for (std::size_t i = 0; i < mine[t].values.size(); ++i) {
      mine[t].values[i] += theirs[t].values[i];
    }
  }
}

void Parameters::scale(double factor) {
  for (auto& t : tensors()) {
    for (double& v : t.values) v *= factor;
  }
}

Parameters init_parameters(std::size_t num_entities, std::size_t num_relations,
                           const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Parameters p(num_entities, num_relations, config.dim, config.num_bases);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double basis_std = 1.0 / std::sqrt(static_cast<double>(config.dim));
  const double coeff_std = 1.0 / std::sqrt(static_cast<double>(config.num_bases));
  for (double& v : p.entity_theta) v = unit(rng);
  for (double& v : p.bases_M) v = basis_std * unit(rng);
  for (double& v : p.rel_coeff) v = coeff_std * unit(rng);
  std::fill(p.ln_gain.begin(), p.ln_gain.end(), 1.0);
  return p;
}

RelationMap relation_map(const Parameters& params, RelationId r) {
  check_relation(params, r);
  const std::size_t d = params.dim;
  RelationMap map{std::vector<double>(d * d, 0.0), std::vector<double>(d, 0.0)};
  const auto alpha = params.coeff(r);
  for (std::size_t j = 0; j < params.num_bases; ++j) {
    const double a = alpha[j];
    if (a == 0.0) continue;
    linalg::axpy(a, params.bases_M.data() + j * d * d, map.weight.data(), d * d);
    linalg::axpy(a, params.bases_v.data() + j * d, map.bias.data(), d);
  }
  return map;
}

void entity_embedding_into(const Parameters& params, const ModelConfig& config,
                           EntityId e, std::span<double> out) {
  check_entity(params, e);
  const auto theta = params.theta(e);
  require_finite(theta, "entity parameters");
  const std::size_t d = theta.size();
  if (config.norm == NormMode::kL1) {
    const double m = *std::max_element(theta.begin(), theta.end());
    double z = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = std::exp(theta[i] - m);
      z += out[i];
    }
    for (std::size_t i = 0; i < d; ++i) out[i] /= z;
  } else {
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = linalg::logistic(theta[i]);
      sq += out[i] * out[i];
    }
    const double n = std::sqrt(sq);
    for (std::size_t i = 0; i < d; ++i) out[i] /= n;
  }
}

FuzzyVec entity_embedding(const Parameters& params, const ModelConfig& config,
                          EntityId e) {
  std::vector<double> out(params.dim);
  entity_embedding_into(params, config, e, out);
  return FuzzyVec(std::move(out));
}

void project_into(const RelationMap& map, const Parameters& params,
                  const ModelConfig& config, std::span<const double> input,
                  std::span<double> out) {
  const std::size_t d = config.dim;
  if (input.size() != d || out.size() != d) {
    throw std::invalid_argument("projection input has wrong dimension");
  }
  linalg::gemv(map.weight.data(), d, d, input.data(), out.data());
  double mean = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    out[i] += map.bias[i];
    mean += out[i];
  }
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double c = out[i] - mean;
    var += c * c;
  }
  var /= static_cast<double>(d);
  const double inv_std = 1.0 / std::sqrt(var + config.ln_eps);
  for (std::size_t i = 0; i < d; ++i) {
    const double y = params.ln_gain[i] * ((out[i] - mean) * inv_std) + params.ln_bias[i];
    out[i] = config.activation == Activation::kLogistic ? linalg::logistic(y)
                                                        : std::clamp(y, 0.0, 1.0);
  }
  require_finite(out, "projection output");
}

FuzzyVec project(const Parameters& params, const ModelConfig& config,
                 RelationId r, const FuzzyVec& s) {
  const RelationMap map = relation_map(params, r);
  std::vector<double> out(config.dim);
  project_into(map, params, config, s.values(), out);
  return FuzzyVec(std::move(out));
}

FuzzyVec embed_query(const Parameters& params, const ModelConfig& config,
                     const QueryNode& query) {
  auto relation = [&](RelationId r) {
    return std::make_shared<const RelationMap>(relation_map(params, r));
  };
  auto entity = [&](EntityId e, std::span<double> out) {
    entity_embedding_into(params, config, e, out);
  };
  std::vector<double> out;
  embed_node(query, params, config, relation, entity, nullptr, out);
  return FuzzyVec(std::move(out));
}

double score(std::span<const double> query_embedding,
             std::span<const double> entity) {
  if (query_embedding.size() != entity.size()) {
    throw std::invalid_argument("score: dimension mismatch");
  }
  return linalg::dot(query_embedding.data(), entity.data(), entity.size());
}

double score(const FuzzyVec& query_embedding, const FuzzyVec& entity) {
  return score(query_embedding.values(), entity.values());
}

std::vector<double> score_all(const Parameters& params, const ModelConfig& config,
                              const FuzzyVec& query_embedding) {
  return Encoder(params, config).score_all(query_embedding);
}

std::vector<ScoredEntity> top_k(std::span<const double> scores, std::size_t k,
                                std::span<const EntityId> exclude) {
  if (k == 0) throw std::invalid_argument("top_k: k must be at least 1");
  std::vector<EntityId> candidates;
  candidates.reserve(scores.size());
  for (std::size_t e = 0; e < scores.size(); ++e) {
    const auto id = static_cast<EntityId>(e);
    if (!std::binary_search(exclude.begin(), exclude.end(), id)) {
      candidates.push_back(id);
    }
  }
  const std::size_t n = std::min(k, candidates.size());
  auto better = [&](EntityId a, EntityId b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa > sb || (sa == sb && a < b);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                    candidates.end(), better);
  std::vector<ScoredEntity> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({candidates[i], scores[static_cast<std::size_t>(candidates[i])]});
  }
  return out;
}

Encoder::Encoder(const Parameters& params, const ModelConfig& config)
    : Encoder(params, config, Options{}) {}

Encoder::Encoder(const Parameters& params, const ModelConfig& config,
                 Options options)
    : params_(params), config_(config), options_(options) {
  config_.validate();
  if (params.dim != config.dim || params.num_bases != config.num_bases) {
    throw ConfigError("parameters do not match the model configuration");
  }
  const std::size_t d = config_.dim;
  entity_matrix_.resize(params.num_entities * d);
  for (std::size_t e = 0; e < params.num_entities; ++e) {
    entity_embedding_into(params_, config_, static_cast<EntityId>(e),
                          std::span<double>(entity_matrix_.data() + e * d, d));
  }
  if (options_.precompute_relations) {
    for (std::size_t r = 0; r < params.num_relations; ++r) {
      relation(static_cast<RelationId>(r));
    }
  }
}

std::shared_ptr<const RelationMap> Encoder::relation(RelationId r) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(r);
  if (it != cache_.end()) return it->second;
  auto map = std::make_shared<const RelationMap>(relation_map(params_, r));
  if (options_.relation_cache_capacity > 0 &&
      cache_.size() >= options_.relation_cache_capacity) {
    cache_.erase(cache_order_.front());
    cache_order_.pop_front();
  }
  cache_.emplace(r, map);
  cache_order_.push_back(r);
  return map;
}

FuzzyVec Encoder::embed(const QueryNode& query, BranchTrace* trace) const {
  auto relation_fn = [this](RelationId r) { return relation(r); };
  auto entity_fn = [this](EntityId e, std::span<double> out) {
    check_entity(params_, e);
    const auto row = entity(e);
    std::copy(row.begin(), row.end(), out.begin());
  };
  std::vector<double> out;
  embed_node(query, params_, config_, relation_fn, entity_fn, trace, out);
  return FuzzyVec(std::move(out));
}

std::vector<double> Encoder::score_all(const FuzzyVec& query_embedding) const {
  std::vector<double> out(params_.num_entities);
  score_all_into(query_embedding.values(), out);
  return out;
}

void Encoder::score_all_into(std::span<const double> query_embedding,
                             std::span<double> out) const {
  if (query_embedding.size() != config_.dim || out.size() != params_.num_entities) {
    throw std::invalid_argument("score_all: dimension mismatch");
  }
  linalg::gemv(entity_matrix_.data(), params_.num_entities, config_.dim,
               query_embedding.data(), out.data());
}

}  // namespace fuzzqe
