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


#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fairlens/error.hpp"
#include "fairlens/fairness.hpp"
#include "fairlens/synth.hpp"
#include "fixtures.hpp"

using namespace fairlens;

namespace {

std::vector<std::pair<GroupKey, double>> metrics(const std::vector<double>& values) {
  std::vector<std::pair<GroupKey, double>> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.emplace_back(GroupKey({{"G", "g" + std::to_string(k)}}), values[k]);
  }
  return out;
}

const std::vector<double> kAccA{89.5, 94.3, 93.4, 72.5};
const std::vector<double> kAccB{91.2, 92.3, 91.7, 78.0};

ModelAssessment assessment(std::string id, double d, double lo, double hi) {
  ModelAssessment a;
  a.model_id = std::move(id);
  a.avg_disparity = d;
  a.interval.lower = lo;
  a.interval.upper = hi;
  return a;
}

}  // namespace

TEST(Disparity, FourGroupVectors) {
  const auto a = disparity_vector("A", metrics(kAccA), 0.0, BaselineMode::macro_over_groups);
  const auto b = disparity_vector("B", metrics(kAccB), 0.0, BaselineMode::macro_over_groups);
  EXPECT_NEAR(a.baseline, 87.425, 1e-12);
  const std::vector<double> da{2.075, 6.875, 5.975, 14.925}, db{2.9, 4.0, 3.4, 10.3};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a.entries[k].disparity, da[k], 1e-9);
    EXPECT_NEAR(b.entries[k].disparity, db[k], 1e-9);
  }
  EXPECT_NEAR(average_disparity(a), 7.4625, 1e-9);
  EXPECT_NEAR(average_disparity(b), 5.15, 1e-9);
  const auto r = compare_fairness(a, b);
  EXPECT_EQ(r.p_value, 0.25);
  EXPECT_GE(r.p_value, 0.05);
}

TEST(Disparity, PooledBaselineAndParity) {
  const auto v = disparity_vector("m", metrics({0.10, 0.30}), 0.18, BaselineMode::dataset_pooled);
  EXPECT_NEAR(v.entries[0].disparity, 0.08, 1e-15);
  EXPECT_NEAR(v.entries[1].disparity, 0.12, 1e-15);
  const auto flat = disparity_vector("m", metrics({0.2, 0.2, 0.2}), 0.2, BaselineMode::dataset_pooled);
  EXPECT_EQ(average_disparity(flat), 0.0);
  EXPECT_THROW(disparity_vector("m", {}, 0.0, BaselineMode::dataset_pooled), ValidationError);
}

TEST(Disparity, MacroDeviationsCancelAndScaleCovariance) {
  const std::vector<double> m{0.12, 0.31, 0.07, 0.22, 0.18};
  const auto v = disparity_vector("m", metrics(m), 0.0, BaselineMode::macro_over_groups);
  double signed_sum = 0.0;
  for (const auto& e : v.entries) signed_sum += e.metric - v.baseline;
  EXPECT_NEAR(signed_sum, 0.0, 1e-15);

  std::vector<double> m2;
  for (double x : m) m2.push_back(x * 4.0);
  const auto v2 = disparity_vector("m", metrics(m2), 0.0, BaselineMode::macro_over_groups);
  EXPECT_NEAR(average_disparity(v2), 4.0 * average_disparity(v), 1e-14);
  const auto w = disparity_vector("w", metrics({0.15, 0.2, 0.1, 0.3, 0.11}), 0.0, BaselineMode::macro_over_groups);
  const auto w2 = disparity_vector("w", metrics({0.6, 0.8, 0.4, 1.2, 0.44}), 0.0, BaselineMode::macro_over_groups);
  EXPECT_EQ(compare_fairness(v, w).p_value, compare_fairness(v2, w2).p_value);
}

TEST(CompareFairness, IdenticalAndMismatched) {
  const auto a = disparity_vector("A", metrics(kAccA), 0.0, BaselineMode::macro_over_groups);
  EXPECT_THROW(compare_fairness(a, a), DegenerateSampleError);
  const auto shorter = disparity_vector("C", metrics({1, 2, 3}), 0.0, BaselineMode::macro_over_groups);
  EXPECT_THROW(compare_fairness(a, shorter), ValidationError);
}

TEST(CompareFairness, ConstantShiftIsSignificant) {
  std::vector<DisparityEntry> e1, e2;
  DisparityVector v1{"one", 0.0, BaselineMode::dataset_pooled, {}};
  DisparityVector v2{"two", 0.0, BaselineMode::dataset_pooled, {}};
  for (int k = 0; k < 71; ++k) {
    const GroupKey key({{"G", "g" + std::to_string(k)}});
    const double d = 0.5 + 0.01 * k;
    v1.entries.push_back({key, 0.0, d, std::nullopt});
    v2.entries.push_back({key, 0.0, d - 0.2, std::nullopt});
  }
  const auto r = compare_fairness(v1, v2);
  EXPECT_LT(r.p_value, 0.05);
  EXPECT_EQ(r.t_minus, 0.0);
  // Twelve-entry truncation: the exact p is the all-positive tail 2 / 2^12.
  DisparityVector t1{v1.model_id, 0.0, v1.baseline_mode, {v1.entries.begin(), v1.entries.begin() + 12}};
  DisparityVector t2{v2.model_id, 0.0, v2.baseline_mode, {v2.entries.begin(), v2.entries.begin() + 12}};
  WilcoxonOptions exact;
  exact.mode = WilcoxonMode::exact;
  EXPECT_EQ(compare_fairness(t1, t2, exact).p_value, 2.0 / 4096);
}

TEST(Graph, ThresholdsAndSymmetry) {
  const auto g = significance_graph_from_p({"A", "B", "C"}, {1.0, 2.0, 3.0},
                                           {{1, 0.5, 0.01}, {0.5, 1, 0.02}, {0.01, 0.02, 1}}, 0.05);
  const auto edges = g.fairness_edges();
  ASSERT_EQ(edges.size(), 1U);
  EXPECT_EQ(edges[0], (std::pair<std::size_t, std::size_t>{0, 1}));
  EXPECT_EQ(g.p_value(1, 0), g.p_value(0, 1));
  EXPECT_THROW(g.p_value(1, 1), std::exception);
  const auto clusters = fairness_clusters(g);
  ASSERT_EQ(clusters.size(), 2U);
  EXPECT_EQ(clusters[0], (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(clusters[1], (std::vector<std::string>{"C"}));
}

TEST(Graph, ClusterShapes) {
  const std::vector<std::vector<double>> full(4, std::vector<double>(4, 0.9)), none(4, std::vector<double>(4, 0.0));
  EXPECT_EQ(fairness_clusters(significance_graph_from_p({"a", "b", "c", "d"}, {4, 3, 2, 1}, full, 0.05)).size(), 1U);
  const auto singles = fairness_clusters(significance_graph_from_p({"a", "b", "c", "d"}, {4, 3, 2, 1}, none, 0.05));
  ASSERT_EQ(singles.size(), 4U);
  EXPECT_EQ(singles[0], std::vector<std::string>{"d"});
  EXPECT_TRUE(significance_graph_from_p({"a"}, {1}, {{1}}, 0.05).fairness_edges().empty());
}

TEST(Graph, FromVectorsWithDegeneratePair) {
  const auto a = disparity_vector("A", metrics(kAccA), 0.0, BaselineMode::macro_over_groups);
  const auto b = disparity_vector("B", metrics(kAccB), 0.0, BaselineMode::macro_over_groups);
  auto a2 = a;
  a2.model_id = "A2";
  const std::vector<DisparityVector> vs{a, b, a2};
  const std::vector<ModelAssessment> as{assessment("A", average_disparity(a), 1, 2),
                                        assessment("B", average_disparity(b), 3, 4),
                                        assessment("A2", average_disparity(a), 1.5, 2.5)};
  const auto g = significance_graph(as, vs, 0.05);
  EXPECT_EQ(g.p_value(0, 1), 0.25);
  EXPECT_TRUE(g.pair(0, 2).degenerate);
  EXPECT_EQ(g.p_value(0, 2), 1.0);
  EXPECT_EQ(g.fairness_edges().size(), 3U);
  const auto perf = g.performance_edges();
  ASSERT_EQ(perf.size(), 1U);
  EXPECT_EQ(perf[0], (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_EQ(fairness_clusters(g).size(), 1U);
}

namespace {

SynthCorpus uv_corpus(std::uint64_t seed) {
  SynthSpec spec;
  spec.utterances_per_cell = 2;
  spec.speakers_per_cell = 1;
  spec.models = {{"U", {0.1, 0.0, 0.0}, {}},
                 {"V", {0.1, 0.0, 0.0}, {{{{"Race", "Asian"}}, {0.2, 0.0, 0.0}}}}};
  return synthesize(fixtures::demo_schema(), spec, seed);
}

}  // namespace

TEST(Assess, BiasedModelHasLargerDisparity) {
  const auto s = uv_corpus(5);
  EvaluationConfig cfg;
  cfg.resamples = 300;
  const auto ev = assess_models(s.corpus, s.models, cfg);
  ASSERT_EQ(ev.groups.size(), 71U);
  EXPECT_GT(ev.assessments[1].avg_disparity, ev.assessments[0].avg_disparity);
  // Recompute the average from the vector entries.
  for (std::size_t m = 0; m < 2; ++m) {
    double sum = 0;
    for (const auto& e : ev.vectors[m].entries) {
      EXPECT_NEAR(e.disparity, std::fabs(e.metric - ev.vectors[m].baseline), 1e-15);
      ASSERT_TRUE(e.exact.has_value());
      EXPECT_EQ(e.metric, e.exact->value());
      sum += e.disparity;
    }
    EXPECT_NEAR(sum / 71, ev.assessments[m].avg_disparity, 1e-15);
  }
}

TEST(Assess, RerunIsIdentical) {
  const auto s = uv_corpus(8);
  EvaluationConfig cfg;
  cfg.resamples = 200;
  cfg.resample_unit = ResampleUnit::speaker;
  const auto a = assess_models(s.corpus, s.models, cfg);
  const auto b = assess_models(s.corpus, s.models, cfg);
  for (std::size_t m = 0; m < 2; ++m) {
    EXPECT_EQ(a.assessments[m].interval.to_json().dump(), b.assessments[m].interval.to_json().dump());
    EXPECT_EQ(a.assessments[m].avg_disparity, b.assessments[m].avg_disparity);
  }
  EXPECT_EQ(a.graph.p_value(0, 1), b.graph.p_value(0, 1));
}

TEST(Assess, SelfComparisonUnderTwoIdsIsDegenerate) {
  auto s = uv_corpus(2);
  auto copy = s.models[0];
  copy.model_id = "U2";
  const std::vector<ModelHypotheses> models{s.models[0], copy};
  EvaluationConfig cfg;
  cfg.resamples = 200;
  const auto ev = assess_models(s.corpus, models, cfg);
  EXPECT_EQ(ev.assessments[0].mean_metric, ev.assessments[1].mean_metric);
  EXPECT_EQ(ev.assessments[0].interval.lower, ev.assessments[1].interval.lower);
  EXPECT_TRUE(ev.graph.pair(0, 1).degenerate);
  EXPECT_EQ(ev.clusters.size(), 1U);
}

TEST(Assess, EmptySubgroupListsRemedies) {
  const auto schema = fixtures::solo_schema({2, 2});
  const auto c = fixtures::cell_corpus(schema, {1, 1, 0, 1});
  ModelHypotheses m{"m", {}};
  for (const auto& u : c.utterances()) m.hypotheses.emplace(u.id, u.reference);
  EvaluationConfig cfg;
  cfg.resamples = 50;
  try {
    assess_models(c, std::vector<ModelHypotheses>{m}, cfg);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("A0=L1|A1=L0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("--depth 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("--exclude"), std::string::npos) << msg;
  }
  cfg.exclude = {"A0=L1|A1=L0"};
  const auto ev = assess_models(c, std::vector<ModelHypotheses>{m}, cfg);
  EXPECT_EQ(ev.groups.size(), 3U);
  EXPECT_EQ(ev.assessments[0].avg_disparity, 0.0);
}

TEST(Assess, AccuracyPlugInReproducesFourGroupScenario) {
  fixtures::TempDir dir("assess");
  const auto f = fixtures::write_accuracy_fixture(dir, fixtures::kErrorsA, fixtures::kErrorsB);
  std::ifstream schema_in(f.schema), manifest_in(f.manifest), a_in(f.hyp_a), b_in(f.hyp_b);
  const auto schema = load_schema(schema_in);
  const auto corpus = load_manifest(manifest_in, schema);
  const std::vector<ModelHypotheses> models{load_hypotheses(a_in, "A", corpus), load_hypotheses(b_in, "B", corpus)};
  EvaluationConfig cfg;
  cfg.depth = 1;
  cfg.metric = Metric::accuracy;
  cfg.baseline = BaselineMode::macro_over_groups;
  cfg.resamples = 500;
  const auto ev = assess_models(corpus, models, cfg);
  EXPECT_NEAR(ev.assessments[0].avg_disparity, 7.4625, 1e-9);
  EXPECT_NEAR(ev.assessments[1].avg_disparity, 5.15, 1e-9);
  EXPECT_EQ(ev.graph.p_value(0, 1), 0.25);
  EXPECT_EQ(ev.graph.fairness_edges().size(), 1U);
}
