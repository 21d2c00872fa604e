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

#include "fuzzqe/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "fuzzqe/error.hpp"
#include "fuzzqe/parallel.hpp"

namespace fuzzqe {
namespace {

struct QueryMetrics {
  double rr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
};

// Ranks of every hard answer from one score vector: the unfiltered counts are
// taken once per answer, then the other known answers are removed.
QueryMetrics score_query(std::span<const double> scores, const LabeledQuery& q) {
  if (q.hard.empty()) {
    throw DataError("evaluation query of type " + q.query.structure_tag +
                    " has no hard answers");
  }
  const std::vector<EntityId> known = q.all_answers();
  QueryMetrics m;
  for (EntityId a : q.hard) {
    const double rank = filtered_rank(scores, a, known);
    m.rr += 1.0 / rank;
    m.hits1 += rank <= 1.0 ? 1.0 : 0.0;
    m.hits3 += rank <= 3.0 ? 1.0 : 0.0;
    m.hits10 += rank <= 10.0 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(q.hard.size());
  m.rr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  return m;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double filtered_rank(std::span<const double> scores, EntityId target,
                     std::span<const EntityId> filter_out) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size()) {
    throw std::out_of_range("filtered_rank: target out of range");
  }
  const double t = scores[static_cast<std::size_t>(target)];
  std::size_t greater = 0;
  std::size_t equal = 0;
  for (double s : scores) {
    greater += s > t ? 1 : 0;
    equal += s == t ? 1 : 0;
  }
  equal -= 1;  // the target itself
  for (EntityId f : filter_out) {
    if (f == target) continue;
    if (f < 0 || static_cast<std::size_t>(f) >= scores.size()) continue;
    const double s = scores[static_cast<std::size_t>(f)];
    if (s > t) --greater;
    if (s == t) --equal;
  }
  return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(equal);
}

void compute_aggregates(EvalReport& report) {
  auto mean_over = [&](const std::vector<std::string>& tags) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& tag : tags) {
      auto it = report.per_structure.find(tag);
      if (it == report.per_structure.end()) continue;
      sum += it->second.mrr;
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  report.avg_epfo = mean_over(epfo_tags());
  report.avg_neg = mean_over(negation_tags());
}

EvalReport evaluate_scores(const QueriesByTag& queries, const QueryScorer& scorer,
                           std::size_t threads) {
  EvalReport report;
  for (const auto& [tag, list] : queries) {
    if (!is_canonical_tag(tag)) {
      report.warnings.push_back("unknown structure tag '" + tag +
                                "' is reported but excluded from averages");
    }
    if (list.empty()) {
      report.warnings.push_back("no queries for structure '" + tag + "'");
      continue;
    }
    std::vector<QueryMetrics> per_query(list.size());
    parallel_for(list.size(), threads, [&](std::size_t i) {
      per_query[i] = score_query(scorer(list[i].query.root), list[i]);
    });
    StructureMetrics m;
    for (const auto& q : per_query) {
      m.mrr += q.rr;
      m.hits1 += q.hits1;
      m.hits3 += q.hits3;
      m.hits10 += q.hits10;
    }
    const double n = static_cast<double>(per_query.size());
    m.mrr /= n;
    m.hits1 /= n;
    m.hits3 /= n;
    m.hits10 /= n;
    m.n_queries = per_query.size();
    report.per_structure[tag] = m;
  }
  compute_aggregates(report);
  return report;
}

EvalReport evaluate(const Encoder& encoder, const QueriesByTag& queries,
                    std::size_t threads) {
  return evaluate_scores(
      queries,
      [&](const QueryNode& q) { return encoder.score_all(encoder.embed(q)); },
      threads);
}

EvalReport evaluate(const Parameters& params, const ModelConfig& config,
                    const QueriesByTag& queries, std::size_t threads) {
  const Encoder encoder(params, config);
  return evaluate(encoder, queries, threads);
}

double random_baseline_mrr(std::size_t num_entities, std::span<const LabeledQuery> queries) {
  if (queries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : queries) {
    const std::size_t known = q.all_answers().size();
    if (known > num_entities) throw DataError("answer set larger than the entity set");
    const std::size_t n = num_entities - known + 1;
    double harmonic = 0.0;
    for (std::size_t r = 1; r <= n; ++r) harmonic += 1.0 / static_cast<double>(r);
    total += harmonic / static_cast<double>(n);
  }
  return total / static_cast<double>(queries.size());
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [tag, m] : report.per_structure) {
    per[tag] = {{"mrr", m.mrr},
                {"hits1", m.hits1},
                {"hits3", m.hits3},
                {"hits10", m.hits10},
                {"n_queries", m.n_queries}};
  }
  out["per_structure"] = per;
  out["avg_epfo"] = report.avg_epfo ? nlohmann::ordered_json(*report.avg_epfo)
                                    : nlohmann::ordered_json(nullptr);
  out["avg_neg"] = report.avg_neg ? nlohmann::ordered_json(*report.avg_neg)
                                  : nlohmann::ordered_json(nullptr);
  out["warnings"] = report.warnings;
  return out;
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "tag,mrr,hits1,hits3,hits10,n\n";
  // Canonical tags first in their usual order, then anything else.
  std::vector<std::string> order;
  for (const auto& tag : canonical_tags()) {
    if (report.per_structure.contains(tag)) order.push_back(tag);
  }
  for (const auto& [tag, m] : report.per_structure) {
    if (!is_canonical_tag(tag)) order.push_back(tag);
  }
  for (const auto& tag : order) {
    const auto& m = report.per_structure.at(tag);
    os << tag << ',' << format_double(m.mrr) << ',' << format_double(m.hits1) << ','
       << format_double(m.hits3) << ',' << format_double(m.hits10) << ','
       << m.n_queries << '\n';
  }
  return os.str();
}

QueriesByTag group_by_tag(std::vector<LabeledQuery> queries) {
  QueriesByTag out;
  for (auto& q : queries) out[q.query.structure_tag].push_back(std::move(q));
  return out;
}

}  // namespace fuzzqe
