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

#include <filesystem>
#include <sstream>

#include "fairlens/csv.hpp"
#include "fairlens/report.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using fixtures::cli;
using fixtures::read_text;
using fixtures::write_text;
using nlohmann::json;

namespace {

const char* kSchema = TEST_DATA_DIR "/schema_solo.json";
const char* kSpec = TEST_DATA_DIR "/synth_uv.json";

std::string synth_into(const fixtures::TempDir& dir, const std::string& name, const std::string& spec,
                       int seed = 1) {
  const auto out = dir / name;
  const auto r = cli({"synth", "--schema", kSchema, "--spec", spec, "--seed", std::to_string(seed), "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  return out;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"evaluate", "--depth", "3"}).code, 2);
  EXPECT_EQ(cli({"evaluate", "--baseline", "median"}).code, 2);
  const auto missing = cli({"evaluate", "--schema", "/nonexistent.json", "--manifest", "x", "--hyp", "a=b"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("/nonexistent.json"), std::string::npos);
}

TEST(Cli, AuditBalancedAndDeterministic) {
  fixtures::TempDir dir("audit");
  const auto s = synth_into(dir, "s", kSpec);
  const auto r1 = cli({"audit", "--schema", s + "/schema.json", "--manifest", s + "/manifest.jsonl", "--out", dir / "a1"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  const auto r2 = cli({"audit", "--schema", s + "/schema.json", "--manifest", s + "/manifest.jsonl", "--out", dir / "a2"});
  EXPECT_EQ(read_text(dir / "a1/audit.json"), read_text(dir / "a2/audit.json"));
  EXPECT_EQ(read_text(dir / "a1/audit.txt"), read_text(dir / "a2/audit.txt"));
  const auto j = json::parse(read_text(dir / "a1/audit.json"));
  EXPECT_EQ(j["coverage"]["depth1"], 1.0);
  EXPECT_EQ(j["coverage"]["depth2"], 1.0);
  for (const auto& e : j["kl_per_attribute"]) EXPECT_EQ(e["value"], 0.0);
}

TEST(Cli, AuditUnknownLabelExitsTwoWithLine) {
  fixtures::TempDir dir("audit-bad");
  write_text(dir / "m.jsonl",
             R"({"id":"a","reference":"x","attributes":{"Sex":"Female","Age":"Teen","Race":"Asian","Accent":"Native"}})"
             "\n"
             R"({"id":"b","reference":"x","attributes":{"Sex":"Robot","Age":"Teen","Race":"Asian","Accent":"Native"}})"
             "\n");
  const auto r = cli({"audit", "--schema", kSchema, "--manifest", dir / "m.jsonl", "--out", dir / "o"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Robot"), std::string::npos) << r.err;
}

TEST(Cli, SynthIsDeterministicAndZeroRateIsExact) {
  fixtures::TempDir dir("synth");
  write_text(dir / "zero.json", R"({"models":[{"id":"clean"}]})");
  const auto a = synth_into(dir, "a", dir / "zero.json", 4);
  const auto b = synth_into(dir, "b", dir / "zero.json", 4);
  EXPECT_EQ(read_text(a + "/manifest.jsonl"), read_text(b + "/manifest.jsonl"));
  EXPECT_EQ(read_text(a + "/hypotheses/clean.jsonl"), read_text(b + "/hypotheses/clean.jsonl"));
  const auto r = cli({"evaluate", "--schema", a + "/schema.json", "--manifest", a + "/manifest.jsonl", "--hyp",
                      a + "/hypotheses/clean.jsonl", "--boot-b", "100", "--out", dir / "ev"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(read_text(dir / "ev/report.json"));
  EXPECT_EQ(report["models"][0]["mean_metric"], 0.0);
  EXPECT_EQ(report["models"][0]["model_id"], "clean");
  EXPECT_FALSE(report.contains("pairwise"));
  EXPECT_TRUE(report["models"][0]["interval"]["degenerate"].get<bool>());
}

TEST(Cli, SynthRejectsBadRates) {
  fixtures::TempDir dir("synth-bad");
  write_text(dir / "bad.json", R"({"models":[{"id":"m","substitution":1.5}]})");
  EXPECT_EQ(cli({"synth", "--schema", kSchema, "--spec", dir / "bad.json", "--out", dir / "o"}).code, 2);
}

TEST(Cli, SynthRateMatchesLawOfLargeNumbers) {
  fixtures::TempDir dir("lln");
  write_text(dir / "spec.json",
             R"({"utterances_per_cell":9,"tokens_per_utterance":[40,60],"models":[{"id":"m","substitution":0.05,"deletion":0.03,"insertion":0.02}]})");
  const auto s = synth_into(dir, "s", dir / "spec.json", 9);
  const auto r = cli({"evaluate", "--schema", s + "/schema.json", "--manifest", s + "/manifest.jsonl", "--hyp",
                      s + "/hypotheses/m.jsonl", "--boot-b", "50", "--format", "json", "--out", dir / "ev"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = json::parse(read_text(dir / "ev/report.json"))["models"][0];
  EXPECT_GE(m["mean_exact"]["words"].get<int>(), 50000);
  EXPECT_NEAR(m["mean_metric"].get<double>(), 0.1, 0.01);
}

TEST(Cli, FourGroupFixtureThroughAccuracyPlugIn) {
  fixtures::TempDir dir("fourgroup");
  const auto f = fixtures::write_accuracy_fixture(dir, fixtures::kErrorsA, fixtures::kErrorsB);
  const auto r = cli({"evaluate", "--schema", f.schema, "--manifest", f.manifest, "--hyp", "A=" + f.hyp_a, "--hyp",
                      "B=" + f.hyp_b, "--metric", "accuracy", "--baseline", "macro", "--depth", "1", "--wilcoxon",
                      "exact", "--boot-b", "500", "--out", dir / "ev"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(read_text(dir / "ev/report.json"));
  EXPECT_NEAR(report["models"][0]["avg_disparity"].get<double>(), 7.4625, 1e-9);
  EXPECT_NEAR(report["models"][1]["avg_disparity"].get<double>(), 5.15, 1e-9);
  EXPECT_EQ(report["pairwise"]["p_matrix"]["A"]["B"], 0.25);
  EXPECT_EQ(report["pairwise"]["fairness_edges"].size(), 1U);
  for (const char* key : {"config", "dataset_audit", "models", "pairwise", "clusters", "plot_data", "inputs", "tool"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }

  const auto c = cli({"compare", "--report", dir / "ev/report.json", "--model-a", "A", "--model-b", "B"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("T+ = 9, T- = 1"), std::string::npos) << c.out;
  EXPECT_NE(c.out.find("not significant (p = 0.25 \xE2\x89\xA5 0.05)"), std::string::npos) << c.out;

  const auto self = cli({"compare", "--report", dir / "ev/report.json", "--model-a", "A", "--model-b", "A"});
  EXPECT_EQ(self.code, 0);
  EXPECT_NE(self.err.find("warning"), std::string::npos);
  EXPECT_NE(self.out.find("degenerate"), std::string::npos);

  const auto from_inputs = cli({"compare", "--config", dir / "ev/report.json", "--model-a", "A", "--model-b", "B"});
  ASSERT_EQ(from_inputs.code, 0) << from_inputs.err;
  EXPECT_NE(from_inputs.out.find("p = 0.25"), std::string::npos);

  EXPECT_EQ(cli({"compare", "--report", dir / "ev/report.json", "--model-a", "A", "--model-b", "Z"}).code, 2);
}

TEST(Cli, BiasedModelIsSignificantlyLessFair) {
  fixtures::TempDir dir("uv");
  const auto s = synth_into(dir, "s", kSpec, 2);
  const auto r = cli({"evaluate", "--schema", s + "/schema.json", "--manifest", s + "/manifest.jsonl", "--hyp",
                      s + "/hypotheses/U.jsonl", "--hyp", s + "/hypotheses/V.jsonl", "--boot-b", "200", "--out",
                      dir / "ev"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto c = cli({"compare", "--report", dir / "ev/report.json", "--model-a", "U", "--model-b", "V"});
  EXPECT_NE(c.out.find("verdict: significant"), std::string::npos) << c.out;
  EXPECT_NE(c.out.find("U is fairer"), std::string::npos) << c.out;
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  fixtures::TempDir dir("cfg");
  const auto s = synth_into(dir, "s", kSpec, 3);
  fairlens::RunConfig cfg;
  cfg.schema_path = s + "/schema.json";
  cfg.manifest_path = s + "/manifest.jsonl";
  cfg.hypotheses = {{"U", s + "/hypotheses/U.jsonl"}};
  cfg.evaluation.resamples = 100;
  cfg.out_dir = dir / "from-file";
  write_text(dir / "cfg.json", cfg.to_json().dump());
  const auto r = cli({"evaluate", "--config", dir / "cfg.json", "--depth", "1", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "from-file/models.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "from-file/report.json"));
  EXPECT_NE(r.out.find("K = 14"), std::string::npos) << r.out;
}

TEST(Cli, ReplayFromEmbeddedConfigIsByteIdentical) {
  fixtures::TempDir dir("replay");
  const auto s = synth_into(dir, "s", kSpec, 6);
  const auto r = cli({"evaluate", "--schema", s + "/schema.json", "--manifest", s + "/manifest.jsonl", "--hyp",
                      s + "/hypotheses/U.jsonl", "--hyp", s + "/hypotheses/V.jsonl", "--boot-b", "300", "--resample",
                      "speaker", "--out", dir / "ev"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, std::string> before;
  for (const char* f : {"report.json", "plot_data.json", "models.csv", "groups.csv", "pairwise.csv"}) {
    before[f] = read_text(dir / ("ev/" + std::string(f)));
  }
  write_text(dir / "saved.json", before["report.json"]);
  ASSERT_EQ(cli({"evaluate", "--config", dir / "saved.json"}).code, 0);
  for (const auto& [f, text] : before) EXPECT_EQ(read_text(dir / ("ev/" + f)), text) << f;
}

TEST(Csv, ParserHandlesQuotesAndLineBreaks) {
  std::istringstream in("a,b,c\r\n\"x, y\",\"say \"\"hi\"\"\",\"two\nlines\"\n,,\n");
  const auto rows = fairlens::parse_csv(in);
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[1][0], "x, y");
  EXPECT_EQ(rows[1][1], "say \"hi\"");
  EXPECT_EQ(rows[1][2], "two\nlines");
  EXPECT_EQ(rows[2], (std::vector<std::string>{"", "", ""}));
  std::istringstream bad("\"open");
  EXPECT_THROW(fairlens::parse_csv(bad), std::exception);
}

TEST(Cli, ConvertCsvFeedsAudit) {
  fixtures::TempDir dir("csv");
  write_text(dir / "t.csv",
             "id,reference,Sex,Age,Race,Accent,device\n"
             "a,\"Hello, world\",Female,17,Asian,Native,phone\n"
             "b,good day,Male,Senior,White,Indian,laptop\n");
  const auto r = cli({"convert-csv", "--schema", kSchema, "--csv", dir / "t.csv", "--out", dir / "m.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = cli({"audit", "--schema", kSchema, "--manifest", dir / "m.jsonl", "--out", dir / "au"});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto first = json::parse(read_text(dir / "m.jsonl").substr(0, read_text(dir / "m.jsonl").find('\n')));
  EXPECT_EQ(first["attributes"]["Age"], 17.0);
  EXPECT_EQ(first["metadata"]["device"], "phone");
  write_text(dir / "short.csv", "id,reference,Sex\n");
  EXPECT_EQ(cli({"convert-csv", "--schema", kSchema, "--csv", dir / "short.csv"}).code, 2);
}

TEST(Report, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3, 7.4625, 1e-300, 123456789.125, 0.0}) {
    EXPECT_EQ(std::stod(fairlens::format_number(v)), v);
  }
  EXPECT_EQ(fairlens::format_number(0.25), "0.25");
  EXPECT_EQ(fairlens::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
