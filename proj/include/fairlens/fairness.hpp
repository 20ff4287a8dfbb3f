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


#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairlens/bootstrap.hpp"
#include "fairlens/corpus.hpp"
#include "fairlens/wer.hpp"
#include "fairlens/wilcoxon.hpp"

namespace fairlens {

enum class BaselineMode { dataset_pooled, macro_over_groups };

/// Per-group scalar the disparity layer works on. Word accuracy is
/// 100 * (1 - WER), i.e. a percentage.
enum class Metric { wer, accuracy };

double metric_from_wer(Metric metric, double wer) noexcept;

struct DisparityEntry {
  GroupKey key;
  double metric = 0.0;
  double disparity = 0.0;
  /// Exact error counts behind `metric` when it comes from pooled WER.
  std::optional<ErrorRate> exact;
};

struct DisparityVector {
  std::string model_id;
  double baseline = 0.0;
  BaselineMode baseline_mode = BaselineMode::dataset_pooled;
  std::vector<DisparityEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<double> disparities() const;
};

/// d_k = |metric_k - baseline| in input order. In macro_over_groups mode the
/// given baseline is ignored and replaced by the unweighted mean of the
/// group metrics. Throws ValidationError on empty input.
DisparityVector disparity_vector(std::string model_id, std::span<const std::pair<GroupKey, double>> group_metrics,
                                 double baseline, BaselineMode mode);

/// Mean of the d_k.
double average_disparity(const DisparityVector& v);

struct WilcoxonOptions {
  Alternative alternative = Alternative::two_sided;
  WilcoxonMode mode = WilcoxonMode::automatic;
  ZeroHandling zero_handling = ZeroHandling::pratt;
};

/// Signed-rank test on the subgroup-paired disparities (first minus second).
/// Throws ValidationError if the subgroup sequences differ and
/// DegenerateSampleError if the disparities are identical.
WilcoxonResult compare_fairness(const DisparityVector& first, const DisparityVector& second,
                                const WilcoxonOptions& options = {});

struct ModelAssessment {
  std::string model_id;
  double mean_metric = 0.0;
  std::optional<ErrorRate> exact_mean;
  BootstrapInterval interval;
  double avg_disparity = 0.0;
  std::size_t subgroups = 0;
};

struct PairwiseResult {
  std::size_t first = 0;
  std::size_t second = 0;
  double p_value = 1.0;
  /// Test could not be run (identical disparities); treated as indistinguishable.
  bool degenerate = false;
  std::optional<WilcoxonResult> test;
  bool fairness_edge = false;
  bool performance_edge = false;
};

/// Models joined where fairness cannot be told apart (p >= alpha) and where
/// performance intervals overlap.
struct SignificanceGraph {
  std::vector<std::string> nodes;
  std::vector<double> avg_disparity;
  double alpha = 0.05;
  std::vector<PairwiseResult> pairs;  // i < j, lexicographic in (i, j)

  /// p-value of the unordered pair; throws for self-pairs.
  double p_value(std::size_t i, std::size_t j) const;
  const PairwiseResult& pair(std::size_t i, std::size_t j) const;
  std::vector<std::pair<std::size_t, std::size_t>> fairness_edges() const;
  std::vector<std::pair<std::size_t, std::size_t>> performance_edges() const;
};

/// Tests every unordered pair. Degenerate pairs get p = 1 and are flagged.
/// Pairs are tested in parallel; results do not depend on scheduling.
SignificanceGraph significance_graph(std::span<const ModelAssessment> assessments,
                                     std::span<const DisparityVector> vectors, double alpha,
                                     const WilcoxonOptions& options = {});

/// Graph from known p-values, indexed p_values[i][j] (only i < j is read).
SignificanceGraph significance_graph_from_p(std::vector<std::string> nodes, std::vector<double> avg_disparity,
                                            const std::vector<std::vector<double>>& p_values, double alpha);

/// Connected components of the fairness edges. Members are ordered by
/// (average disparity, id); clusters by their smallest average disparity.
std::vector<std::vector<std::string>> fairness_clusters(const SignificanceGraph& graph);

enum class ResampleUnit { utterance, speaker };

struct EvaluationConfig {
  int depth = 0;  // 0: 2 for solo schemas, 1 for dialogue schemas
  bool include_other = false;
  std::vector<std::string> exclude;  // canonical group keys left out of K
  NormalizationConfig normalization;
  Aggregation aggregation = Aggregation::pooled;
  BaselineMode baseline = BaselineMode::dataset_pooled;
  Metric metric = Metric::wer;
  double alpha = 0.05;
  std::size_t resamples = 2000;
  double level = 0.95;
  std::uint64_t seed = 1;
  ResampleUnit resample_unit = ResampleUnit::utterance;
  WilcoxonOptions wilcoxon;

  int effective_depth(const AttributeSchema& schema) const noexcept;
};

struct Evaluation {
  std::vector<GroupKey> groups;
  std::vector<ModelAssessment> assessments;
  std::vector<DisparityVector> vectors;
  SignificanceGraph graph;
  std::vector<std::vector<std::string>> clusters;
};

/// Group metrics, disparities, average disparity, bootstrap interval on the
/// dataset metric, pairwise tests and clusters for every model. Throws
/// ValidationError listing every empty subgroup (with remedies) and for
/// missing hypotheses.
Evaluation assess_models(const Corpus& corpus, std::span<const ModelHypotheses> models,
                         const EvaluationConfig& config);

const char* to_string(BaselineMode m) noexcept;
const char* to_string(Metric m) noexcept;
const char* to_string(ResampleUnit u) noexcept;
BaselineMode parse_baseline_mode(std::string_view text);
Metric parse_metric(std::string_view text);
ResampleUnit parse_resample_unit(std::string_view text);

}  // namespace fairlens
