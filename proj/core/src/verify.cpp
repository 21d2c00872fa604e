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

#include "fuzzqe/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fuzzqe/backward.hpp"
#include "fuzzqe/fuzzy_logic.hpp"
#include "fuzzqe/oracle.hpp"
#include "fuzzqe/query_gen.hpp"

namespace fuzzqe {
namespace {

constexpr std::size_t kMaxReported = 10;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void fail(SuiteResult& r, const std::string& what) {
  ++r.violations;
  if (r.failures.size() < kMaxReported) r.failures.push_back(what);
}

FuzzyVec random_fuzzy(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> special(0, 39);
  std::vector<double> v(d);
  for (double& x : v) {
    switch (special(rng)) {
      case 0:
        x = 0.0;
        break;
      case 1:
        x = 1.0;
        break;
      case 2:
        x = 0.5;
        break;
      default:
        x = unit(rng);
    }
  }
  return FuzzyVec(std::move(v));
}

void replace_ids(QueryNode& node, std::mt19937_64& rng, std::size_t ne, std::size_t nr) {
  if (node.op == Op::kAnchor) {
    node.id = std::uniform_int_distribution<EntityId>(0, static_cast<EntityId>(ne - 1))(rng);
  } else if (node.op == Op::kProj) {
    node.id = std::uniform_int_distribution<RelationId>(0, static_cast<RelationId>(nr - 1))(rng);
  }
  for (auto& a : node.args) replace_ids(a, rng, ne, nr);
}

std::string describe(std::string_view law, std::string_view logic, std::size_t i,
                     std::size_t k) {
  std::ostringstream os;
  os << law << " (" << logic << ", triple " << i << ", entry " << k << ")";
  return os.str();
}

void perturb(std::vector<double>& v, std::mt19937_64& rng, double center, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  for (double& x : v) x = center + n(rng);
}

}  // namespace

KnowledgeGraph random_graph(std::mt19937_64& rng, std::size_t num_entities,
                            std::size_t num_relations, std::size_t edges) {
  std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(num_entities - 1));
  std::uniform_int_distribution<RelationId> rel(0, static_cast<RelationId>(num_relations - 1));
  std::vector<Triple> train;
  train.reserve(edges);
  for (std::size_t i = 0; i < edges; ++i) train.push_back({ent(rng), rel(rng), ent(rng)});
  std::vector<std::string> en(num_entities);
  std::vector<std::string> rn(num_relations);
  for (std::size_t e = 0; e < num_entities; ++e) en[e] = "e" + std::to_string(e);
  for (std::size_t r = 0; r < num_relations; ++r) rn[r] = "r" + std::to_string(r);
  return KnowledgeGraph(std::move(en), std::move(rn), std::move(train), {}, {});
}

QueryNode random_instance(std::mt19937_64& rng, std::string_view tag,
                          std::size_t num_entities, std::size_t num_relations) {
  QueryNode q = canonical_templates().at(std::string(tag));
  replace_ids(q, rng, num_entities, num_relations);
  return q;
}

SuiteResult run_logic_law_suite(const LawSuiteOptions& options) {
  SuiteResult r;
  r.name = "logic laws";
  const Stopwatch clock;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = options.dim;
  for (Logic logic : {Logic::kProduct, Logic::kGodel}) {
    const std::string_view name = to_string(logic);
    const double assoc_tol = logic == Logic::kGodel ? 0.0 : 1e-12;
    for (std::size_t i = 0; i < options.triples; ++i) {
      const FuzzyVec a = random_fuzzy(rng, d);
      const FuzzyVec b = random_fuzzy(rng, d);
      const FuzzyVec c = random_fuzzy(rng, d);
      std::vector<double> raised(d);
      for (std::size_t k = 0; k < d; ++k) raised[k] = a[k] + unit(rng) * (1.0 - a[k]);
      const FuzzyVec a2(std::move(raised));

      const FuzzyVec and_ab = tnorm(logic, a, b);
      const FuzzyVec and_ba = tnorm(logic, b, a);
      const FuzzyVec or_ab = tconorm(logic, a, b);
      const FuzzyVec or_ba = tconorm(logic, b, a);
      const FuzzyVec and_l = tnorm(logic, and_ab, c);
      const FuzzyVec and_r = tnorm(logic, a, tnorm(logic, b, c));
      const FuzzyVec or_l = tconorm(logic, or_ab, c);
      const FuzzyVec or_r = tconorm(logic, a, tconorm(logic, b, c));
      const FuzzyVec na = negate(a);
      const FuzzyVec nb = negate(b);
      const FuzzyVec dm_and = negate(and_ab);
      const FuzzyVec dm_or = negate(or_ab);
      const FuzzyVec or_n = tconorm(logic, na, nb);
      const FuzzyVec and_n = tnorm(logic, na, nb);
      const FuzzyVec and_a2 = tnorm(logic, a2, b);
      const FuzzyVec or_a2 = tconorm(logic, a2, b);
      for (std::size_t k = 0; k < d; ++k) {
        r.cases += 1;
        if (and_ab[k] != and_ba[k] || or_ab[k] != or_ba[k]) {
          fail(r, describe("commutativity", name, i, k));
        }
        if (std::abs(and_l[k] - and_r[k]) > assoc_tol ||
            std::abs(or_l[k] - or_r[k]) > assoc_tol) {
          fail(r, describe("associativity", name, i, k));
        }
        if (and_ab[k] > a[k] || and_ab[k] > b[k]) {
          fail(r, describe("conjunction elimination", name, i, k));
        }
        if (or_ab[k] < a[k] || or_ab[k] < b[k]) {
          fail(r, describe("disjunction amplification", name, i, k));
        }
        if (std::abs(dm_and[k] - or_n[k]) > 1e-12 || std::abs(dm_or[k] - and_n[k]) > 1e-12) {
          fail(r, describe("De Morgan duality", name, i, k));
        }
        if (t_norm(logic, a[k], 1.0) != a[k] || t_norm(logic, a[k], 0.0) != 0.0 ||
            t_conorm(logic, a[k], 0.0) != a[k] || t_conorm(logic, a[k], 1.0) != 1.0 ||
            negator(0.0) != 1.0 || negator(1.0) != 0.0) {
          fail(r, describe("boundary conditions", name, i, k));
        }
        if (and_a2[k] < and_ab[k] || or_a2[k] < or_ab[k]) {
          fail(r, describe("monotonicity", name, i, k));
        }
      }
    }
  }
  r.seconds = clock.seconds();
  r.passed = r.violations == 0;
  return r;
}

SuiteResult run_score_law_suite(const ScoreSuiteOptions& options) {
  SuiteResult r;
  r.name = "score laws";
  const Stopwatch clock;
  std::mt19937_64 rng(options.seed);
  constexpr std::size_t kEntities = 20;
  constexpr std::size_t kRelations = 4;
  const auto& tags = canonical_tags();
  std::uniform_int_distribution<std::size_t> tag_dist(0, tags.size() - 1);
  std::uniform_int_distribution<EntityId> ent(0, kEntities - 1);
  std::bernoulli_distribution coin(0.5);
  for (const auto& tag : tags) {
    for (std::size_t i = 0; i < options.configs_per_structure; ++i) {
      ModelConfig cfg;
      cfg.dim = options.dim;
      cfg.num_bases = 2;
      cfg.logic = coin(rng) ? Logic::kProduct : Logic::kGodel;
      cfg.norm = coin(rng) ? NormMode::kL1 : NormMode::kL2;
      cfg.activation = coin(rng) ? Activation::kLogistic : Activation::kBoundedRectifier;
      Parameters params = init_parameters(kEntities, kRelations, cfg, rng());
      perturb(params.ln_bias, rng, 0.3, 0.3);
      perturb(params.bases_v, rng, 0.0, 0.5);
      const Encoder enc(params, cfg);

      const QueryNode q1 = random_instance(rng, tag, kEntities, kRelations);
      const QueryNode q2 = random_instance(rng, tags[tag_dist(rng)], kEntities, kRelations);
      const auto p = enc.entity(ent(rng));
      auto phi = [&](const QueryNode& q) { return score(enc.embed(q).values(), p); };
      const double s1 = phi(q1);
      const double s2 = phi(q2);
      const double s_and = phi(conj({q1, q2}));
      const double s_or = phi(disj({q1, q2}));
      const double s_nn = phi(negation(negation(q1)));
      const double s_n = phi(negation(q1));
      double mass = 0.0;
      for (double v : p) mass += v;
      const std::string where = tag + " config " + std::to_string(i);
      r.cases += 4;
      if (s_and > std::min(s1, s2)) fail(r, "conjunction raised a score: " + where);
      if (s_or < std::max(s1, s2)) fail(r, "disjunction lowered a score: " + where);
      if (s_nn != s1) fail(r, "double negation changed a score: " + where);
      if (std::abs(s1 + s_n - mass) > 1e-9) fail(r, "negation mass identity: " + where);
    }
  }
  r.seconds = clock.seconds();
  r.passed = r.violations == 0;
  return r;
}

SuiteResult run_gradient_suite(const GradientSuiteOptions& options) {
  SuiteResult r;
  r.name = "gradient check";
  const Stopwatch clock;
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<EntityId> ent(0, static_cast<EntityId>(options.num_entities - 1));
  const LossConfig loss;
  for (const auto& tag : canonical_tags()) {
    for (Logic logic : {Logic::kProduct, Logic::kGodel}) {
      for (Activation act : {Activation::kLogistic, Activation::kBoundedRectifier}) {
        for (NormMode norm : {NormMode::kL1, NormMode::kL2}) {
          ModelConfig cfg;
          cfg.dim = options.dim;
          cfg.num_bases = options.num_bases;
          cfg.logic = logic;
          cfg.activation = act;
          cfg.norm = norm;
          Parameters params =
              init_parameters(options.num_entities, options.num_relations, cfg, rng());
          perturb(params.ln_gain, rng, 1.0, 0.2);
          perturb(params.ln_bias, rng, act == Activation::kLogistic ? 0.0 : 0.5, 0.2);
          perturb(params.bases_v, rng, 0.0, 0.3);

          std::vector<QueryNode> queries;
          for (std::size_t b = 0; b < options.batch; ++b) {
            queries.push_back(
                random_instance(rng, tag, options.num_entities, options.num_relations));
          }
          std::vector<TrainExample> batch(options.batch);
          for (std::size_t b = 0; b < options.batch; ++b) {
            batch[b].query = &queries[b];
            batch[b].positive = ent(rng);
            for (std::size_t k = 0; k < options.negatives; ++k) {
              batch[b].negatives.push_back(ent(rng));
            }
          }
          GradCheckOptions gc;
          gc.h = options.h;
          gc.num_coordinates = options.coordinates;
          gc.seed = rng();
          const GradCheckReport rep = grad_check(params, cfg, loss, batch, gc);
          ++r.cases;
          r.metric = std::max(r.metric, rep.max_rel_error);
          std::ostringstream where;
          where << tag << " " << to_string(logic) << " " << to_string(act) << " "
                << to_string(norm);
          if (rep.checked == 0) {
            fail(r, where.str() + ": no coordinates checked");
          } else if (!(rep.max_rel_error < options.tolerance)) {
            std::ostringstream os;
            os << where.str() << ": rel error " << rep.max_rel_error << " at "
               << rep.worst_tensor << "[" << rep.worst_index << "] analytic "
               << rep.worst_analytic << " numeric " << rep.worst_numeric;
            fail(r, os.str());
          }
        }
      }
    }
  }
  r.seconds = clock.seconds();
  r.passed = r.violations == 0;
  return r;
}

SuiteResult run_oracle_suite(const OracleSuiteOptions& options) {
  SuiteResult r;
  r.name = "oracle agreement";
  const Stopwatch clock;
  std::mt19937_64 rng(options.seed);
  const auto& tags = canonical_tags();
  std::size_t qi = 0;
  for (std::size_t g = 0; g < options.graphs; ++g) {
    const KnowledgeGraph kg =
        random_graph(rng, options.num_entities, options.num_relations, options.edges);
    const std::size_t per_graph =
        options.queries / options.graphs + (g < options.queries % options.graphs ? 1 : 0);
    for (std::size_t i = 0; i < per_graph; ++i, ++qi) {
      const std::string& tag = tags[qi % tags.size()];
      QueryNode q;
      // Alternate answer-first walks (nonempty answers) with arbitrary ids.
      std::optional<QueryNode> walked;
      if (qi % 2 == 0) walked = try_sample_structure_instance(rng, kg, GraphView::kTrain, tag);
      q = walked ? std::move(*walked)
                 : random_instance(rng, tag, options.num_entities, options.num_relations);
      const auto expected = indicator(answer_query(kg, GraphView::kTrain, q), kg.num_entities());
      for (Logic logic : {Logic::kProduct, Logic::kGodel}) {
        ++r.cases;
        if (symbolic_fuzzy_eval(kg, GraphView::kTrain, q, logic) != expected) {
          fail(r, "graph " + std::to_string(g) + " " + tag + " " +
                      std::string(to_string(logic)) + ": " + encode_query_string(q));
        }
      }
    }
  }
  r.seconds = clock.seconds();
  r.passed = r.violations == 0;
  return r;
}

}  // namespace fuzzqe
