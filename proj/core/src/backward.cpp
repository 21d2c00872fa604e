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

#include "fuzzqe/backward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "fuzzqe/error.hpp"
#include "fuzzqe/linalg.hpp"

namespace fuzzqe {
namespace {

using RelationMaps = std::map<RelationId, RelationMap>;

struct RelationGrad {
  std::vector<double> weight;
  std::vector<double> bias;
};

// Per-shard accumulators. Only the rows and relations a shard touches are
// stored, so a shard never allocates the full basis tensor.
struct ShardGrads {
  std::map<EntityId, std::vector<double>> entity;
  std::map<RelationId, RelationGrad> relation;
  std::vector<double> ln_gain;
  std::vector<double> ln_bias;
  double loss_sum = 0.0;
};

struct TapeNode {
  Op op = Op::kAnchor;
  std::int32_t id = 0;
  std::vector<std::size_t> children;
  std::vector<double> out;
  // Projection: normalized pre-affine values and the pre-activation.
  std::vector<double> zhat;
  std::vector<double> pre;
  double inv_std = 0.0;
  // Godel connectives: index of the child selected per entry.
  std::vector<std::uint32_t> winner;
};

struct Context {
  const Parameters& params;
  const ModelConfig& model;
  const RelationMaps& maps;
};

void collect_relations(const QueryNode& q, std::vector<RelationId>& out) {
  if (q.op == Op::kProj) out.push_back(q.id);
  for (const auto& a : q.args) collect_relations(a, out);
}

std::size_t forward(const QueryNode& q, const Context& ctx, std::vector<TapeNode>& tape) {
  if (q.op == Op::kNot && q.args.size() == 1 && q.args[0].op == Op::kNot &&
      q.args[0].args.size() == 1) {
    return forward(q.args[0].args[0], ctx, tape);
  }
  const std::size_t d = ctx.model.dim;
  std::vector<std::size_t> children;
  children.reserve(q.args.size());
  for (const auto& a : q.args) children.push_back(forward(a, ctx, tape));

  TapeNode node;
  node.op = q.op;
  node.id = q.id;
  node.children = children;
  node.out.assign(d, 0.0);
  switch (q.op) {
    case Op::kAnchor:
      entity_embedding_into(ctx.params, ctx.model, q.id, node.out);
      break;
    case Op::kProj: {
      if (children.size() != 1) throw std::invalid_argument("projection arity");
      const RelationMap& map = ctx.maps.at(q.id);
      const std::vector<double>& input = tape[children[0]].out;
      std::vector<double> z(d);
      linalg::gemv(map.weight.data(), d, d, input.data(), z.data());
      double mean = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        z[i] += map.bias[i];
        mean += z[i];
      }
      mean /= static_cast<double>(d);
      double var = 0.0;
      for (std::size_t i = 0; i < d; ++i) var += (z[i] - mean) * (z[i] - mean);
      var /= static_cast<double>(d);
      node.inv_std = 1.0 / std::sqrt(var + ctx.model.ln_eps);
      node.zhat.resize(d);
      node.pre.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        node.zhat[i] = (z[i] - mean) * node.inv_std;
        node.pre[i] = ctx.params.ln_gain[i] * node.zhat[i] + ctx.params.ln_bias[i];
        node.out[i] = ctx.model.activation == Activation::kLogistic
                          ? linalg::logistic(node.pre[i])
                          : std::clamp(node.pre[i], 0.0, 1.0);
      }
      break;
    }
    case Op::kNot: {
      if (children.size() != 1) throw std::invalid_argument("negation arity");
      const auto& in = tape[children[0]].out;
      for (std::size_t i = 0; i < d; ++i) node.out[i] = negator(in[i]);
      break;
    }
    case Op::kAnd:
    case Op::kOr: {
      if (children.empty()) throw std::invalid_argument("empty and/or node");
      const bool conj = q.op == Op::kAnd;
      node.out = tape[children[0]].out;
      if (ctx.model.logic == Logic::kGodel) node.winner.assign(d, 0);
      for (std::size_t c = 1; c < children.size(); ++c) {
        const auto& next = tape[children[c]].out;
        for (std::size_t i = 0; i < d; ++i) {
          if (ctx.model.logic == Logic::kGodel) {
            if (conj ? next[i] < node.out[i] : next[i] > node.out[i]) {
              node.out[i] = next[i];
              node.winner[i] = static_cast<std::uint32_t>(c);
            }
          } else {
            node.out[i] = conj ? t_norm(ctx.model.logic, node.out[i], next[i])
                               : t_conorm(ctx.model.logic, node.out[i], next[i]);
          }
        }
      }
      break;
    }
  }
  tape.push_back(std::move(node));
  return tape.size() - 1;
}

// dL/dtheta_e from dL/dp_e, accumulated into the shard.
void entity_backward(const Context& ctx, EntityId e, std::span<const double> gp,
                     ShardGrads& acc) {
  const std::size_t d = ctx.model.dim;
  std::vector<double> p(d);
  entity_embedding_into(ctx.params, ctx.model, e, p);
  auto [it, inserted] = acc.entity.try_emplace(e);
  if (inserted) it->second.assign(d, 0.0);
  std::vector<double>& dtheta = it->second;
  const double gdotp = linalg::dot(gp.data(), p.data(), d);
  if (ctx.model.norm == NormMode::kL1) {
    for (std::size_t i = 0; i < d; ++i) dtheta[i] += p[i] * (gp[i] - gdotp);
  } else {
    const auto theta = ctx.params.theta(e);
    double sq = 0.0;
    std::vector<double> s(d);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = linalg::logistic(theta[i]);
      sq += s[i] * s[i];
    }
    const double n = std::sqrt(sq);
    for (std::size_t i = 0; i < d; ++i) {
      const double ds = (gp[i] - p[i] * gdotp) / n;
      dtheta[i] += ds * s[i] * (1.0 - s[i]);
    }
  }
}

void node_backward(const Context& ctx, std::vector<TapeNode>& tape,
                   std::vector<std::vector<double>>& grad, std::size_t idx,
                   ShardGrads& acc) {
  const std::size_t d = ctx.model.dim;
  const TapeNode& node = tape[idx];
  const std::vector<double>& g = grad[idx];
  auto child_grad = [&](std::size_t c) -> std::vector<double>& {
    auto& v = grad[node.children[c]];
    if (v.empty()) v.assign(d, 0.0);
    return v;
  };
  switch (node.op) {
    case Op::kAnchor:
      entity_backward(ctx, node.id, g, acc);
      return;
    case Op::kNot: {
      auto& gc = child_grad(0);
      for (std::size_t i = 0; i < d; ++i) gc[i] -= g[i];
      return;
    }
    case Op::kProj: {
      std::vector<double> gzhat(d);
      for (std::size_t i = 0; i < d; ++i) {
        double dact;
        if (ctx.model.activation == Activation::kLogistic) {
          dact = node.out[i] * (1.0 - node.out[i]);
        } else {
          dact = (node.pre[i] > 0.0 && node.pre[i] < 1.0) ? 1.0 : 0.0;
        }
        const double gy = g[i] * dact;
        acc.ln_gain[i] += gy * node.zhat[i];
        acc.ln_bias[i] += gy;
        gzhat[i] = gy * ctx.params.ln_gain[i];
      }
      double mean_g = 0.0;
      double mean_gz = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        mean_g += gzhat[i];
        mean_gz += gzhat[i] * node.zhat[i];
      }
      mean_g /= static_cast<double>(d);
      mean_gz /= static_cast<double>(d);
      std::vector<double> gz(d);
      for (std::size_t i = 0; i < d; ++i) {
        gz[i] = node.inv_std * (gzhat[i] - mean_g - node.zhat[i] * mean_gz);
      }
      auto [it, inserted] = acc.relation.try_emplace(node.id);
      if (inserted) {
        it->second.weight.assign(d * d, 0.0);
        it->second.bias.assign(d, 0.0);
      }
      const std::vector<double>& input = tape[node.children[0]].out;
      linalg::ger(1.0, gz.data(), d, input.data(), d, it->second.weight.data());
      linalg::axpy(1.0, gz.data(), it->second.bias.data(), d);
      linalg::gemv_t_acc(ctx.maps.at(node.id).weight.data(), d, d, gz.data(),
                         child_grad(0).data());
      return;
    }
    case Op::kAnd:
    case Op::kOr: {
      const std::size_t n = node.children.size();
      if (ctx.model.logic == Logic::kGodel) {
        for (std::size_t i = 0; i < d; ++i) child_grad(node.winner[i])[i] += g[i];
        return;
      }
      // Product logic: d(prod x_j)/dx_c = prod_{j != c} x_j, and the
      // probabilistic sum is 1 - prod (1 - x_j).
      const bool conj = node.op == Op::kAnd;
      for (std::size_t c = 0; c < n; ++c) {
        auto& gc = child_grad(c);
        for (std::size_t i = 0; i < d; ++i) {
          double others = 1.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (j == c) continue;
            const double x = tape[node.children[j]].out[i];
            others *= conj ? x : 1.0 - x;
          }
          gc[i] += g[i] * others;
        }
      }
      return;
    }
  }
}

void example_backward(const Context& ctx, const LossConfig& loss,
                      const TrainExample& ex, double weight, ShardGrads& acc) {
  const std::size_t d = ctx.model.dim;
  if (ex.query == nullptr) throw std::invalid_argument("training example without query");
  if (ex.negatives.empty()) throw std::invalid_argument("training example without negatives");
  std::vector<TapeNode> tape;
  const std::size_t root = forward(*ex.query, ctx, tape);
  const std::vector<double>& s = tape[root].out;

  const double norm = std::sqrt(linalg::dot(s.data(), s.data(), d));
  const double z = std::max(norm, loss.zq_eps);
  const double k = static_cast<double>(ex.negatives.size());

  std::vector<double> p_pos(d);
  entity_embedding_into(ctx.params, ctx.model, ex.positive, p_pos);
  const double phi_pos = linalg::dot(s.data(), p_pos.data(), d);
  const double a = phi_pos / z - loss.gamma;
  double value = -linalg::log_logistic(a);
  const double dphi_pos = -linalg::logistic(-a) / z;
  double dz = linalg::logistic(-a) * phi_pos / (z * z);

  std::vector<std::vector<double>> p_neg(ex.negatives.size(), std::vector<double>(d));
  std::vector<double> dphi_neg(ex.negatives.size());
  double neg_sum = 0.0;
  for (std::size_t i = 0; i < ex.negatives.size(); ++i) {
    entity_embedding_into(ctx.params, ctx.model, ex.negatives[i], p_neg[i]);
    const double phi = linalg::dot(s.data(), p_neg[i].data(), d);
    const double b = loss.gamma - phi / z;
    neg_sum += linalg::log_logistic(b);
    dphi_neg[i] = linalg::logistic(-b) / (k * z);
    dz -= linalg::logistic(-b) * phi / (k * z * z);
  }
  value -= neg_sum / k;
  acc.loss_sum += value;

  std::vector<std::vector<double>> grad(tape.size());
  std::vector<double>& gs = grad[root];
  gs.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double v = dphi_pos * p_pos[i];
    for (std::size_t n = 0; n < p_neg.size(); ++n) v += dphi_neg[n] * p_neg[n][i];
    if (norm > loss.zq_eps) v += dz * s[i] / norm;
    gs[i] = weight * v;
  }

  std::vector<double> gp(d);
  for (std::size_t i = 0; i < d; ++i) gp[i] = weight * dphi_pos * s[i];
  entity_backward(ctx, ex.positive, gp, acc);
  for (std::size_t n = 0; n < p_neg.size(); ++n) {
    for (std::size_t i = 0; i < d; ++i) gp[i] = weight * dphi_neg[n] * s[i];
    entity_backward(ctx, ex.negatives[n], gp, acc);
  }

  for (std::size_t idx = tape.size(); idx-- > 0;) {
    if (grad[idx].empty()) continue;
    node_backward(ctx, tape, grad, idx, acc);
  }
}

void require_finite_grads(const Gradients& g) {
  for (const auto& t : g.tensors()) {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      if (!std::isfinite(t.values[i])) {
        throw NumericError("non-finite gradient in " + std::string(t.name) +
                           " at index " + std::to_string(i));
      }
    }
  }
}

}  // namespace

BackwardResult backward(const Parameters& params, const ModelConfig& model,
                        const LossConfig& loss, std::span<const TrainExample> batch,
                        std::size_t threads) {
  model.validate();
  if (batch.empty()) throw std::invalid_argument("backward: empty batch");
  const std::size_t d = model.dim;

  RelationMaps maps;
  {
    std::vector<RelationId> rels;
    for (const auto& ex : batch) {
      if (ex.query) collect_relations(*ex.query, rels);
    }
    for (RelationId r : rels) {
      if (!maps.contains(r)) maps.emplace(r, relation_map(params, r));
    }
  }
  const Context ctx{params, model, maps};
  const double weight = 1.0 / static_cast<double>(batch.size());

  const std::size_t shards = std::clamp<std::size_t>(threads, 1, batch.size());
  std::vector<ShardGrads> parts(shards);
  std::vector<std::exception_ptr> errors(shards);
  auto run = [&](std::size_t s) {
    try {
      ShardGrads& acc = parts[s];
      acc.ln_gain.assign(d, 0.0);
      acc.ln_bias.assign(d, 0.0);
      const std::size_t lo = batch.size() * s / shards;
      const std::size_t hi = batch.size() * (s + 1) / shards;
      for (std::size_t i = lo; i < hi; ++i) {
        example_backward(ctx, loss, batch[i], weight, acc);
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) pool.emplace_back(run, s);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BackwardResult result;
  result.grads = Gradients::zeros_like(params);
  Gradients& g = result.grads;
  std::map<RelationId, RelationGrad> rel;
  double loss_sum = 0.0;
  for (auto& part : parts) {
    loss_sum += part.loss_sum;
    for (auto& [e, row] : part.entity) {
      linalg::axpy(1.0, row.data(), g.entity_theta.data() + static_cast<std::size_t>(e) * d, d);
    }
    linalg::axpy(1.0, part.ln_gain.data(), g.ln_gain.data(), d);
    linalg::axpy(1.0, part.ln_bias.data(), g.ln_bias.data(), d);
    for (auto& [r, rg] : part.relation) {
      auto [it, inserted] = rel.try_emplace(r);
      if (inserted) {
        it->second = std::move(rg);
      } else {
        linalg::axpy(1.0, rg.weight.data(), it->second.weight.data(), d * d);
        linalg::axpy(1.0, rg.bias.data(), it->second.bias.data(), d);
      }
    }
  }

  // W_r = sum_j alpha_rj M_j: chain rule onto the bases and coefficients.
  const std::size_t k = model.num_bases;
  for (const auto& [r, rg] : rel) {
    const auto alpha = params.coeff(r);
    double* dalpha = g.rel_coeff.data() + static_cast<std::size_t>(r) * k;
    for (std::size_t j = 0; j < k; ++j) {
      const double* m = params.bases_M.data() + j * d * d;
      const double* v = params.bases_v.data() + j * d;
      dalpha[j] += linalg::dot(rg.weight.data(), m, d * d) +
                   linalg::dot(rg.bias.data(), v, d);
      linalg::axpy(alpha[j], rg.weight.data(), g.bases_M.data() + j * d * d, d * d);
      linalg::axpy(alpha[j], rg.bias.data(), g.bases_v.data() + j * d, d);
    }
  }

  result.loss = loss_sum * weight;
  if (!std::isfinite(result.loss)) throw NumericError("non-finite training loss");
  require_finite_grads(g);
  return result;
}

double batch_loss(const Parameters& params, const ModelConfig& model,
                  const LossConfig& loss, std::span<const TrainExample> batch,
                  BranchTrace* trace) {
  if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
  const Encoder encoder(params, model);
  double total = 0.0;
  std::vector<std::span<const double>> negs;
  for (const auto& ex : batch) {
    if (ex.query == nullptr) throw std::invalid_argument("training example without query");
    const FuzzyVec s = encoder.embed(*ex.query, trace);
    auto in_range = [&](EntityId e) {
      if (e < 0 || static_cast<std::size_t>(e) >= params.num_entities) {
        throw std::out_of_range("entity id " + std::to_string(e) + " out of range");
      }
    };
    in_range(ex.positive);
    for (EntityId e : ex.negatives) in_range(e);
    negs.clear();
    for (EntityId e : ex.negatives) negs.push_back(encoder.entity(e));
    total += margin_loss(s.values(), encoder.entity(ex.positive), negs, loss);
    if (trace) {
      const double norm = std::sqrt(linalg::dot(s.values().data(), s.values().data(), s.size()));
      trace->codes.push_back(norm > loss.zq_eps ? 1u : 0u);
    }
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace fuzzqe
