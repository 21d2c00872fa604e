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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "fuzzqe/backward.hpp"

namespace fuzzqe {
namespace {

void collect_entities(const QueryNode& q, std::set<EntityId>& out) {
  if (q.op == Op::kAnchor) out.insert(q.id);
  for (const auto& a : q.args) collect_entities(a, out);
}

template <typename T>
T logistic(T x) {
  using std::exp;
  if (x >= 0) return T(1) / (T(1) + exp(-x));
  const T e = exp(x);
  return e / (T(1) + e);
}

template <typename T>
T log_logistic(T x) {
  using std::exp;
  using std::log1p;
  if (x >= 0) return -log1p(exp(-x));
  return x - log1p(exp(x));
}

template <typename T>
class Reference {
 public:
  Reference(const Parameters& p, const ModelConfig& m, BranchTrace* trace)
      : p_(p), m_(m), trace_(trace) {}

  std::vector<T> entity(EntityId e) const {
    using std::exp;
    using std::sqrt;
    if (e < 0 || static_cast<std::size_t>(e) >= p_.num_entities) {
      throw std::out_of_range("entity id out of range");
    }
    const std::size_t d = m_.dim;
    const auto theta = p_.theta(e);
    std::vector<T> out(d);
    T z = 0;
    if (m_.norm == NormMode::kL1) {
      T mx = theta[0];
      for (double v : theta) mx = std::max(mx, T(v));
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = exp(T(theta[i]) - mx);
        z += out[i];
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) {
        out[i] = logistic(T(theta[i]));
        z += out[i] * out[i];
      }
      z = sqrt(z);
    }
    for (T& v : out) v /= z;
    return out;
  }

  std::vector<T> embed(const QueryNode& q) {
    const std::size_t d = m_.dim;
    switch (q.op) {
      case Op::kAnchor:
        return entity(q.id);
      case Op::kNot: {
        auto v = embed(q.args.at(0));
        for (T& x : v) x = T(1) - x;
        return v;
      }
      case Op::kProj:
        return project(q.id, embed(q.args.at(0)));
      case Op::kAnd:
      case Op::kOr: {
        const bool conj = q.op == Op::kAnd;
        auto acc = embed(q.args.at(0));
        std::vector<std::uint32_t> winner(d, 0);
        for (std::size_t c = 1; c < q.args.size(); ++c) {
          const auto next = embed(q.args[c]);
          for (std::size_t i = 0; i < d; ++i) {
            if (m_.logic == Logic::kGodel) {
              if (conj ? next[i] < acc[i] : next[i] > acc[i]) {
                acc[i] = next[i];
                winner[i] = static_cast<std::uint32_t>(c);
              }
            } else {
              acc[i] = conj ? acc[i] * next[i] : acc[i] + next[i] - acc[i] * next[i];
            }
          }
        }
        if (trace_ && m_.logic == Logic::kGodel) {
          trace_->codes.insert(trace_->codes.end(), winner.begin(), winner.end());
        }
        return acc;
      }
    }
    return {};
  }

 private:
  std::vector<T> project(RelationId r, const std::vector<T>& s) {
    using std::sqrt;
    const std::size_t d = m_.dim;
    const std::size_t k = m_.num_bases;
    if (r < 0 || static_cast<std::size_t>(r) >= p_.num_relations) {
      throw std::out_of_range("relation id out of range");
    }
    std::vector<T> z(d, T(0));
    for (std::size_t j = 0; j < k; ++j) {
      const T a = p_.rel_coeff[static_cast<std::size_t>(r) * k + j];
      const double* m = p_.bases_M.data() + j * d * d;
      const double* v = p_.bases_v.data() + j * d;
      for (std::size_t row = 0; row < d; ++row) {
        T acc = v[row];
        for (std::size_t col = 0; col < d; ++col) acc += T(m[row * d + col]) * s[col];
        z[row] += a * acc;
      }
    }
    T mean = 0;
    for (T x : z) mean += x;
    mean /= T(d);
    T var = 0;
    for (T x : z) var += (x - mean) * (x - mean);
    var /= T(d);
    const T inv = T(1) / sqrt(var + T(m_.ln_eps));
    for (std::size_t i = 0; i < d; ++i) {
      const T y = T(p_.ln_gain[i]) * ((z[i] - mean) * inv) + T(p_.ln_bias[i]);
      if (m_.activation == Activation::kLogistic) {
        z[i] = logistic(y);
      } else {
        if (trace_) trace_->codes.push_back(y <= 0 ? 0u : (y >= 1 ? 2u : 1u));
        z[i] = std::clamp(y, T(0), T(1));
      }
    }
    return z;
  }

  const Parameters& p_;
  const ModelConfig& m_;
  BranchTrace* trace_;
};

template <typename T>
T reference_batch_loss(const Parameters& params, const ModelConfig& model,
                       const LossConfig& loss, std::span<const TrainExample> batch,
                       BranchTrace* trace) {
  using std::sqrt;
  Reference<T> ref(params, model, trace);
  T total = 0;
  for (const auto& ex : batch) {
    const std::vector<T> s = ref.embed(*ex.query);
    T sq = 0;
    for (T v : s) sq += v * v;
    const T norm = sqrt(sq);
    const T z = std::max(norm, T(loss.zq_eps));
    if (trace) trace->codes.push_back(norm > T(loss.zq_eps) ? 1u : 0u);
    auto phi = [&](EntityId e) {
      const auto p = ref.entity(e);
      T acc = 0;
      for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * p[i];
      return acc;
    };
    T value = -log_logistic(phi(ex.positive) / z - T(loss.gamma));
    T neg = 0;
    for (EntityId e : ex.negatives) neg += log_logistic(T(loss.gamma) - phi(e) / z);
    value -= neg / T(ex.negatives.size());
    total += value;
  }
  return total / T(batch.size());
}

std::vector<std::size_t> sample_indices(std::vector<std::size_t> pool, std::size_t n,
                                        std::mt19937_64& rng) {
  if (pool.size() <= n) return pool;
  std::vector<std::size_t> out;
  out.reserve(n);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), n, rng);
  return out;
}

}  // namespace

long double reference_loss(const Parameters& params, const ModelConfig& model,
                           const LossConfig& loss, std::span<const TrainExample> batch,
                           bool extended, BranchTrace* trace) {
  if (batch.empty()) throw std::invalid_argument("reference_loss: empty batch");
  for (const auto& ex : batch) {
    if (ex.query == nullptr || ex.negatives.empty()) {
      throw std::invalid_argument("reference_loss: incomplete training example");
    }
  }
  if (extended) {
    return reference_batch_loss<long double>(params, model, loss, batch, trace);
  }
  return reference_batch_loss<double>(params, model, loss, batch, trace);
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

std::vector<CoordinateCheck> finite_difference_check(
    std::span<double> x, std::span<const double> analytic,
    std::span<const std::size_t> coordinates, double h,
    const std::function<long double(BranchTrace*)>& f) {
  if (x.size() != analytic.size()) {
    throw std::invalid_argument("finite_difference_check: size mismatch");
  }
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_check: h must be positive");
  BranchTrace base;
  f(&base);
  std::vector<CoordinateCheck> out;
  out.reserve(coordinates.size());
  for (std::size_t i : coordinates) {
    if (i >= x.size()) throw std::out_of_range("finite_difference_check: coordinate");
    const double orig = x[i];
    BranchTrace plus_trace;
    BranchTrace minus_trace;
    const double up = orig + h;
    const double down = orig - h;
    x[i] = up;
    const long double plus = f(&plus_trace);
    x[i] = down;
    const long double minus = f(&minus_trace);
    x[i] = orig;
    CoordinateCheck c;
    c.index = i;
    c.analytic = analytic[i];
    c.numeric = static_cast<double>((plus - minus) / static_cast<long double>(up - down));
    c.rel_error = relative_error(c.analytic, c.numeric);
    c.excluded = plus_trace.codes != base.codes || minus_trace.codes != base.codes;
    out.push_back(c);
  }
  return out;
}

GradCheckReport grad_check(const Parameters& params, const ModelConfig& model,
                           const LossConfig& loss, std::span<const TrainExample> batch,
                           const GradCheckOptions& options) {
  const BackwardResult analytic = backward(params, model, loss, batch, 1);
  Parameters work = params;
  auto f = [&](BranchTrace* trace) {
    return reference_loss(work, model, loss, batch, options.extended_reference, trace);
  };

  GradCheckReport report;
  report.loss_discrepancy = static_cast<double>(std::abs(analytic.loss - f(nullptr)));

  // Entity coordinates come from rows the batch touches; other rows have a
  // zero gradient that says nothing about correctness.
  std::set<EntityId> used;
  for (const auto& ex : batch) {
    collect_entities(*ex.query, used);
    used.insert(ex.positive);
    used.insert(ex.negatives.begin(), ex.negatives.end());
  }

  std::mt19937_64 rng(options.seed);
  auto tensors = work.tensors();
  const auto grads = analytic.grads.tensors();
  const std::size_t per_tensor = std::max<std::size_t>(1, options.num_coordinates / tensors.size());
  for (std::size_t t = 0; t < tensors.size(); ++t) {
    std::vector<std::size_t> pool;
    if (tensors[t].name == "entity_theta") {
      for (EntityId e : used) {
        for (std::size_t i = 0; i < params.dim; ++i) {
          pool.push_back(static_cast<std::size_t>(e) * params.dim + i);
        }
      }
    } else {
      pool.resize(tensors[t].values.size());
      std::iota(pool.begin(), pool.end(), std::size_t{0});
    }
    const auto coords = sample_indices(std::move(pool), per_tensor, rng);
    const auto checks =
        finite_difference_check(tensors[t].values, grads[t].values, coords, options.h, f);
    for (const auto& c : checks) {
      if (c.excluded) {
        ++report.excluded;
        continue;
      }
      ++report.checked;
      if (c.rel_error > report.max_rel_error || report.worst_tensor.empty()) {
        report.max_rel_error = std::max(report.max_rel_error, c.rel_error);
        report.worst_tensor = std::string(tensors[t].name);
        report.worst_index = c.index;
        report.worst_analytic = c.analytic;
        report.worst_numeric = c.numeric;
      }
    }
  }
  return report;
}

}  // namespace fuzzqe
