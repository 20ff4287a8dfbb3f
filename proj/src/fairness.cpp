// Copyright 2026 FairLENS contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "fairlens/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "fairlens/error.hpp"

namespace fairlens {

double metric_from_wer(Metric metric, double wer) noexcept {
  return metric == Metric::wer ? wer : 100.0 * (1.0 - wer);
}

std::vector<double> DisparityVector::disparities() const {
  std::vector<double> d;
  d.reserve(entries.size());
  for (const auto& e : entries) d.push_back(e.disparity);
  return d;
}

DisparityVector disparity_vector(std::string model_id, std::span<const std::pair<GroupKey, double>> group_metrics,
                                 double baseline, BaselineMode mode) {
  if (group_metrics.empty()) throw ValidationError("disparity vector needs at least one group");
  DisparityVector v;
  v.model_id = std::move(model_id);
  v.baseline_mode = mode;
  if (mode == BaselineMode::macro_over_groups) {
    double sum = 0.0;
    for (const auto& [key, value] : group_metrics) sum += value;
    baseline = sum / static_cast<double>(group_metrics.size());
  }
  v.baseline = baseline;
  for (const auto& [key, value] : group_metrics) {
    v.entries.push_back({key, value, std::fabs(value - baseline), std::nullopt});
  }
  return v;
}

double average_disparity(const DisparityVector& v) {
  if (v.entries.empty()) throw ValidationError("average disparity of an empty vector");
  double sum = 0.0;
  for (const auto& e : v.entries) sum += e.disparity;
  return sum / static_cast<double>(v.entries.size());
}

WilcoxonResult compare_fairness(const DisparityVector& first, const DisparityVector& second,
                                const WilcoxonOptions& options) {
  if (first.size() != second.size()) {
    throw ValidationError("models '" + first.model_id + "' and '" + second.model_id +
                          "' are measured on different numbers of subgroups");
  }
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (!(first.entries[k].key == second.entries[k].key)) {
      throw ValidationError("subgroup mismatch at position " + std::to_string(k) + ": '" +
                            first.entries[k].key.to_string() + "' vs '" + second.entries[k].key.to_string() + "'");
    }
  }
  const auto x = first.disparities();
  const auto y = second.disparities();
  return wilcoxon_signed_rank(x, y, options.alternative, options.zero_handling, options.mode);
}

// ---------------------------------------------------------------------------

double SignificanceGraph::p_value(std::size_t i, std::size_t j) const { return pair(i, j).p_value; }

const PairwiseResult& SignificanceGraph::pair(std::size_t i, std::size_t j) const {
  if (i == j) throw ValidationError("self-pairs are not part of the significance graph");
  if (i > j) std::swap(i, j);
  for (const auto& p : pairs) {
    if (p.first == i && p.second == j) return p;
  }
  throw ValidationError("pair not present in the significance graph");
}

std::vector<std::pair<std::size_t, std::size_t>> SignificanceGraph::fairness_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : pairs) {
    if (p.fairness_edge) out.emplace_back(p.first, p.second);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> SignificanceGraph::performance_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : pairs) {
    if (p.performance_edge) out.emplace_back(p.first, p.second);
  }
  return out;
}

SignificanceGraph significance_graph(std::span<const ModelAssessment> assessments,
                                     std::span<const DisparityVector> vectors, double alpha,
                                     const WilcoxonOptions& options) {
  if (assessments.empty()) throw ValidationError("significance graph needs at least one model");
  if (assessments.size() != vectors.size()) throw ValidationError("one disparity vector per model is required");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  for (const auto& v : vectors) {
    if (v.size() != vectors[0].size()) throw ValidationError("models are measured on different subgroups");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v.entries[k].key == vectors[0].entries[k].key)) {
        throw ValidationError("models are measured on different subgroups");
      }
    }
  }

  for (const auto& a : assessments) {
    if (a.interval.level != assessments[0].interval.level) {
      throw ValidationError("models carry intervals at different confidence levels");
    }
  }

  SignificanceGraph g;
  g.alpha = alpha;
  for (const auto& a : assessments) {
    g.nodes.push_back(a.model_id);
    g.avg_disparity.push_back(a.avg_disparity);
  }
  const std::size_t n = assessments.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      PairwiseResult p;
      p.first = i;
      p.second = j;
      g.pairs.push_back(p);
    }
  }

  const auto count = static_cast<std::int64_t>(g.pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < count; ++k) {
    auto& p = g.pairs[static_cast<std::size_t>(k)];
    try {
      p.test = compare_fairness(vectors[p.first], vectors[p.second], options);
      p.p_value = p.test->p_value;
    } catch (const DegenerateSampleError&) {
      p.degenerate = true;
      p.p_value = 1.0;
    }
    p.fairness_edge = p.p_value >= alpha;
    p.performance_edge = intervals_overlap(assessments[p.first].interval, assessments[p.second].interval);
  }
  return g;
}

SignificanceGraph significance_graph_from_p(std::vector<std::string> nodes, std::vector<double> avg_disparity,
                                            const std::vector<std::vector<double>>& p_values, double alpha) {
  if (nodes.size() != avg_disparity.size()) throw ValidationError("one average disparity per node is required");
  SignificanceGraph g;
  g.alpha = alpha;
  g.nodes = std::move(nodes);
  g.avg_disparity = std::move(avg_disparity);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      PairwiseResult p;
      p.first = i;
      p.second = j;
      p.p_value = p_values.at(i).at(j);
      p.fairness_edge = p.p_value >= alpha;
      g.pairs.push_back(p);
    }
  }
  return g;
}

std::vector<std::vector<std::string>> fairness_clusters(const SignificanceGraph& graph) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : graph.fairness_edges()) parent[find(a)] = find(b);

  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[find(i)].push_back(i);

  auto before = [&](std::size_t a, std::size_t b) {
    if (graph.avg_disparity[a] != graph.avg_disparity[b]) return graph.avg_disparity[a] < graph.avg_disparity[b];
    return graph.nodes[a] < graph.nodes[b];
  };
  std::vector<std::vector<std::size_t>> sorted;
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end(), before);
    sorted.push_back(std::move(members));
  }
  std::sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) { return before(a.front(), b.front()); });

  std::vector<std::vector<std::string>> out;
  for (const auto& c : sorted) {
    std::vector<std::string> ids;
    for (auto i : c) ids.push_back(graph.nodes[i]);
    out.push_back(std::move(ids));
  }
  return out;
}

// ---------------------------------------------------------------------------

int EvaluationConfig::effective_depth(const AttributeSchema& schema) const noexcept {
  if (depth != 0) return depth;
  return schema.mode() == SchemaMode::solo ? 2 : 1;
}

namespace {

struct GroupPlan {
  std::vector<GroupKey> keys;
  std::vector<std::vector<std::size_t>> members;
};

GroupPlan plan_groups(const Corpus& corpus, const EvaluationConfig& config) {
  const int depth = config.effective_depth(corpus.schema());
  auto keys = enumerate_subgroups(corpus, depth, config.include_other);
  for (const auto& text : config.exclude) {
    const auto key = GroupKey::parse(text, corpus.grouping());
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) throw ValidationError("excluded subgroup '" + text + "' is not evaluated at depth " + std::to_string(depth));
    keys.erase(it);
  }
  if (keys.empty()) throw ValidationError("no subgroups left to evaluate");

  GroupPlan plan;
  std::vector<std::string> empty;
  for (auto& k : keys) {
    auto idx = corpus.member_indices(k);
    if (idx.empty()) empty.push_back(k.to_string());
    plan.members.push_back(std::move(idx));
  }
  if (!empty.empty()) {
    std::string msg = std::to_string(empty.size()) + " subgroup(s) have no utterances at depth " +
                      std::to_string(depth) + ":";
    for (const auto& e : empty) msg += "\n  " + e;
    msg += "\nremedies: add data for these subgroups, evaluate at a lower depth (--depth 1), "
           "or exclude them explicitly (--exclude KEY)";
    throw ValidationError(msg);
  }
  plan.keys = std::move(keys);
  return plan;
}

// Resampling units as lists of utterance indices.
std::vector<std::vector<std::size_t>> resampling_units(const Corpus& corpus, ResampleUnit unit) {
  std::vector<std::vector<std::size_t>> units;
  const auto utts = corpus.utterances();
  if (unit == ResampleUnit::utterance) {
    for (std::size_t i = 0; i < utts.size(); ++i) units.push_back({i});
    return units;
  }
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    auto it = utts[i].metadata.find("speaker");
    if (it == utts[i].metadata.end()) {
      throw ValidationError("speaker resampling needs metadata.speaker on every utterance; '" + utts[i].id +
                            "' has none");
    }
    auto [pos, fresh] = slot.emplace(it->second, units.size());
    if (fresh) units.emplace_back();
    units[pos->second].push_back(i);
  }
  return units;
}

double aggregate(const std::vector<Alignment>& alignments, std::span<const std::size_t> idx, Aggregation agg) {
  return agg == Aggregation::pooled ? pooled_wer(alignments, idx).value() : macro_wer(alignments, idx);
}

}  // namespace

Evaluation assess_models(const Corpus& corpus, std::span<const ModelHypotheses> models,
                         const EvaluationConfig& config) {
  if (models.empty()) throw ValidationError("at least one model is required");
  if (corpus.empty()) throw ValidationError("corpus has no utterances");
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (models[i].model_id == models[j].model_id) {
        throw ValidationError("duplicate model id '" + models[i].model_id + "'");
      }
    }
  }

  const GroupPlan plan = plan_groups(corpus, config);
  const auto units = resampling_units(corpus, config.resample_unit);
  std::vector<std::size_t> everyone(corpus.size());
  std::iota(everyone.begin(), everyone.end(), 0);

  Evaluation ev;
  ev.groups = plan.keys;
  for (const auto& model : models) {
    const auto alignments = align_corpus(corpus, model, config.normalization);

    std::vector<std::pair<GroupKey, double>> metrics;
    for (std::size_t k = 0; k < plan.keys.size(); ++k) {
      metrics.emplace_back(plan.keys[k],
                           metric_from_wer(config.metric, aggregate(alignments, plan.members[k], config.aggregation)));
    }

    ModelAssessment a;
    a.model_id = model.model_id;
    a.mean_metric = metric_from_wer(config.metric, aggregate(alignments, everyone, config.aggregation));
    if (config.aggregation == Aggregation::pooled) a.exact_mean = pooled_wer(alignments);

    auto v = disparity_vector(model.model_id, metrics, a.mean_metric, config.baseline);
    if (config.aggregation == Aggregation::pooled) {
      for (std::size_t k = 0; k < plan.keys.size(); ++k) v.entries[k].exact = pooled_wer(alignments, plan.members[k]);
    }
    a.avg_disparity = average_disparity(v);
    a.subgroups = v.size();

    const Metric metric = config.metric;
    const Aggregation agg = config.aggregation;
    IndexStatistic statistic = [&alignments, &units, metric, agg](std::span<const std::size_t> picked) {
      std::vector<std::size_t> idx;
      for (auto u : picked) idx.insert(idx.end(), units[u].begin(), units[u].end());
      return metric_from_wer(metric, aggregate(alignments, idx, agg));
    };
    a.interval = bca_interval(units.size(), statistic, config.resamples, config.level, config.seed);

    ev.assessments.push_back(std::move(a));
    ev.vectors.push_back(std::move(v));
  }
  ev.graph = significance_graph(ev.assessments, ev.vectors, config.alpha, config.wilcoxon);
  ev.clusters = fairness_clusters(ev.graph);
  return ev;
}

const char* to_string(BaselineMode m) noexcept {
  return m == BaselineMode::dataset_pooled ? "dataset_pooled" : "macro_over_groups";
}

const char* to_string(Metric m) noexcept { return m == Metric::wer ? "wer" : "accuracy"; }

const char* to_string(ResampleUnit u) noexcept { return u == ResampleUnit::utterance ? "utterance" : "speaker"; }

BaselineMode parse_baseline_mode(std::string_view text) {
  if (text == "pooled" || text == "dataset_pooled") return BaselineMode::dataset_pooled;
  if (text == "macro" || text == "macro_over_groups") return BaselineMode::macro_over_groups;
  throw ValidationError("baseline must be 'pooled' or 'macro', got '" + std::string(text) + "'");
}

Metric parse_metric(std::string_view text) {
  if (text == "wer") return Metric::wer;
  if (text == "accuracy") return Metric::accuracy;
  throw ValidationError("metric must be 'wer' or 'accuracy', got '" + std::string(text) + "'");
}

ResampleUnit parse_resample_unit(std::string_view text) {
  if (text == "utterance") return ResampleUnit::utterance;
  if (text == "speaker") return ResampleUnit::speaker;
  throw ValidationError("resample unit must be 'utterance' or 'speaker', got '" + std::string(text) + "'");
}

}  // namespace fairlens
