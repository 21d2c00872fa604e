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

#ifndef FUZZQE_MODEL_HPP_
#define FUZZQE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fuzzqe/fuzzy_logic.hpp"
#include "fuzzqe/knowledge_graph.hpp"
#include "fuzzqe/query.hpp"

namespace fuzzqe {

// How free entity parameters map onto the fuzzy space.
//   kL1: p = softmax(theta), entries sum to one.
//   kL2: p = sigma(theta) / ||sigma(theta)||_2, squares sum to one.
enum class NormMode { kL1, kL2 };

// Squashing function applied after layer normalization in a projection.
enum class Activation { kLogistic, kBoundedRectifier };

std::string_view to_string(NormMode mode);
std::string_view to_string(Activation activation);
NormMode parse_norm_mode(std::string_view text);
Activation parse_activation(std::string_view text);

struct ModelConfig {
  std::size_t dim = 800;
  std::size_t num_bases = 150;
  Logic logic = Logic::kProduct;
  NormMode norm = NormMode::kL1;
  Activation activation = Activation::kLogistic;
  double ln_eps = 1e-5;

  // Throws ConfigError. Lukasiewicz is refused: its outputs collapse onto
  // {0, 1} and starve the embedding of gradient.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All learnable tensors, row-major and flat.
//   entity_theta  E x d   free entity parameters
//   bases_M       K x d x d  basis transformations
//   bases_v       K x d   basis bias vectors
//   rel_coeff     R x K   per-relation basis coefficients
//   ln_gain, ln_bias  d   shared layer-norm affine
struct Parameters {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::size_t dim = 0;
  std::size_t num_bases = 0;

  std::vector<double> entity_theta;
  std::vector<double> bases_M;
  std::vector<double> bases_v;
  std::vector<double> rel_coeff;
  std::vector<double> ln_gain;
  std::vector<double> ln_bias;

  Parameters() = default;
  // Zero-filled tensors of the given shape.
  Parameters(std::size_t num_entities, std::size_t num_relations,
             std::size_t dim, std::size_t num_bases);

  static Parameters zeros_like(const Parameters& other) {
    return Parameters(other.num_entities, other.num_relations, other.dim,
                      other.num_bases);
  }

  std::span<const double> theta(EntityId e) const {
    return {entity_theta.data() + static_cast<std::size_t>(e) * dim, dim};
  }
  std::span<double> theta(EntityId e) {
    return {entity_theta.data() + static_cast<std::size_t>(e) * dim, dim};
  }
  std::span<const double> coeff(RelationId r) const {
    return {rel_coeff.data() + static_cast<std::size_t>(r) * num_bases, num_bases};
  }

  struct TensorRef {
    std::string_view name;
    std::span<double> values;
  };
  struct ConstTensorRef {
    std::string_view name;
    std::span<const double> values;
  };
  // Canonical tensor order, also the checkpoint order.
  std::vector<TensorRef> tensors();
  std::vector<ConstTensorRef> tensors() const;

  std::size_t total_size() const;
  bool same_shape(const Parameters& other) const;
  bool all_finite() const;
  // this += other (shapes must match).
  void add(const Parameters& other);
  void scale(double factor);

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Gradients share the parameter layout.
using Gradients = Parameters;

// Random initialization: theta ~ N(0, 1), bases ~ N(0, 1/d), coefficients
// ~ N(0, 1/K), basis biases zero, layer-norm gain one and bias zero.
Parameters init_parameters(std::size_t num_entities, std::size_t num_relations,
                           const ModelConfig& config, std::uint64_t seed);

// W_r = sum_j alpha_{r,j} M_j and b_r = sum_j alpha_{r,j} v_j.
struct RelationMap {
  std::vector<double> weight;  // d x d
  std::vector<double> bias;    // d
};

RelationMap relation_map(const Parameters& params, RelationId r);

// Normalized entity embedding written into `out` (size d).
void entity_embedding_into(const Parameters& params, const ModelConfig& config,
                           EntityId e, std::span<double> out);
FuzzyVec entity_embedding(const Parameters& params, const ModelConfig& config,
                          EntityId e);

// g(LN(W s + b)) for a given relation map; `out` has size d.
void project_into(const RelationMap& map, const Parameters& params,
                  const ModelConfig& config, std::span<const double> input,
                  std::span<double> out);
FuzzyVec project(const Parameters& params, const ModelConfig& config,
                 RelationId r, const FuzzyVec& s);

// Piecewise-regime record of a forward pass: one code per rectifier entry
// (below, inside or above [0,1]) and per Godel selection. Two evaluations
// with equal traces lie on the same smooth piece of the loss.
struct BranchTrace {
  std::vector<std::uint32_t> codes;
};

// Bottom-up query embedding. Accepts any subtree, including a negation at
// the root, so that logic laws can be checked on sub-queries.
FuzzyVec embed_query(const Parameters& params, const ModelConfig& config,
                     const QueryNode& query);

// phi(q, e) = S_q . p_e.
double score(const FuzzyVec& query_embedding, const FuzzyVec& entity);
double score(std::span<const double> query_embedding,
             std::span<const double> entity);

// Scores of every entity, one matrix-vector product against the
// materialized entity matrix.
std::vector<double> score_all(const Parameters& params, const ModelConfig& config,
                              const FuzzyVec& query_embedding);

struct ScoredEntity {
  EntityId entity = 0;
  double score = 0.0;

  friend bool operator==(const ScoredEntity&, const ScoredEntity&) = default;
};

// The k best entities outside `exclude` (sorted ids), by descending score,
// ties broken by ascending id. Returns fewer than k when candidates run out.
std::vector<ScoredEntity> top_k(std::span<const double> scores, std::size_t k,
                                std::span<const EntityId> exclude = {});

// Read-only inference session over a parameter snapshot: materializes the
// entity matrix once and caches relation maps. Concurrent use is safe.
class Encoder {
 public:
  struct Options {
    // Materialize every relation map up front.
    bool precompute_relations = false;
    // Maximum cached relation maps; 0 means unbounded. Eviction is FIFO.
    std::size_t relation_cache_capacity = 0;
  };

  Encoder(const Parameters& params, const ModelConfig& config);
  Encoder(const Parameters& params, const ModelConfig& config, Options options);

  const ModelConfig& config() const { return config_; }
  const Parameters& params() const { return params_; }
  std::size_t num_entities() const { return params_.num_entities; }

  FuzzyVec embed(const QueryNode& query, BranchTrace* trace = nullptr) const;

  // Row e of the entity matrix.
  std::span<const double> entity(EntityId e) const {
    return {entity_matrix_.data() + static_cast<std::size_t>(e) * config_.dim,
            config_.dim};
  }

  std::vector<double> score_all(const FuzzyVec& query_embedding) const;
  void score_all_into(std::span<const double> query_embedding,
                      std::span<double> out) const;

  std::shared_ptr<const RelationMap> relation(RelationId r) const;

 private:
  const Parameters& params_;
  ModelConfig config_;
  Options options_;
  std::vector<double> entity_matrix_;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<RelationId, std::shared_ptr<const RelationMap>> cache_;
  mutable std::deque<RelationId> cache_order_;
};

}  // namespace fuzzqe

#endif  // FUZZQE_MODEL_HPP_
