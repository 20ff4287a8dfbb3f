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


#include "fairlens/report.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

#include "fairlens/error.hpp"

namespace fairlens {
namespace {

using nlohmann::json;

json evaluation_config_json(const EvaluationConfig& c) {
  return {{"depth", c.depth},
          {"include_other", c.include_other},
          {"exclude", c.exclude},
          {"normalization", c.normalization.to_json()},
          {"aggregation", to_string(c.aggregation)},
          {"baseline", to_string(c.baseline)},
          {"metric", to_string(c.metric)},
          {"alpha", c.alpha},
          {"bootstrap",
           {{"B", c.resamples}, {"level", c.level}, {"seed", c.seed}, {"unit", to_string(c.resample_unit)}}},
          {"wilcoxon",
           {{"mode", to_string(c.wilcoxon.mode)},
            {"zero_handling", to_string(c.wilcoxon.zero_handling)},
            {"alternative", to_string(c.wilcoxon.alternative)}}}};
}

EvaluationConfig evaluation_config_from_json(const json& j) {
  EvaluationConfig c;
  c.depth = j.value("depth", c.depth);
  if (c.depth < 0 || c.depth > 2) throw ValidationError("depth must be 1 or 2");
  c.include_other = j.value("include_other", c.include_other);
  c.exclude = j.value("exclude", c.exclude);
  if (j.contains("normalization")) c.normalization = NormalizationConfig::from_json(j.at("normalization"));
  c.aggregation = parse_aggregation(j.value("aggregation", std::string(to_string(c.aggregation))));
  c.baseline = parse_baseline_mode(j.value("baseline", std::string(to_string(c.baseline))));
  c.metric = parse_metric(j.value("metric", std::string(to_string(c.metric))));
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("bootstrap")) {
    const auto& b = j.at("bootstrap");
    c.resamples = b.value("B", c.resamples);
    c.level = b.value("level", c.level);
    c.seed = b.value("seed", c.seed);
    c.resample_unit = parse_resample_unit(b.value("unit", std::string(to_string(c.resample_unit))));
  }
  if (j.contains("wilcoxon")) {
    const auto& w = j.at("wilcoxon");
    c.wilcoxon.mode = parse_wilcoxon_mode(w.value("mode", std::string(to_string(c.wilcoxon.mode))));
    c.wilcoxon.zero_handling =
        parse_zero_handling(w.value("zero_handling", std::string(to_string(c.wilcoxon.zero_handling))));
    c.wilcoxon.alternative =
        parse_alternative(w.value("alternative", std::string(to_string(c.wilcoxon.alternative))));
  }
  return c;
}

json exact_json(const std::optional<ErrorRate>& r) {
  if (!r) return nullptr;
  return {{"errors", r->errors}, {"words", r->words}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json RunConfig::to_json() const {
  json hyps = json::array();
  for (const auto& [id, path] : hypotheses) hyps.push_back({{"model_id", id}, {"path", path}});
  return {{"schema", schema_path},
          {"manifest", manifest_path},
          {"hypotheses", hyps},
          {"min_count", min_count},
          {"out_dir", out_dir},
          {"format", fairlens::to_string(format)},
          {"evaluation", evaluation_config_json(evaluation)}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  if (j.contains("config")) return from_json(j.at("config"));
  RunConfig c;
  try {
    c.schema_path = j.value("schema", c.schema_path);
    c.manifest_path = j.value("manifest", c.manifest_path);
    for (const auto& h : j.value("hypotheses", json::array())) {
      c.hypotheses.emplace_back(h.at("model_id").get<std::string>(), h.at("path").get<std::string>());
    }
    c.min_count = j.value("min_count", c.min_count);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.format = parse_output_format(j.value("format", std::string(fairlens::to_string(c.format))));
    if (j.contains("evaluation")) c.evaluation = evaluation_config_from_json(j.at("evaluation"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

json plot_data(const Evaluation& ev, const EvaluationConfig& config) {
  json points = json::array();
  for (const auto& a : ev.assessments) {
    points.push_back({{"model_id", a.model_id},
                      {"x", a.avg_disparity},
                      {"y", a.mean_metric},
                      {"y_lower", a.interval.lower},
                      {"y_upper", a.interval.upper}});
  }
  json edges = json::array();
  for (const auto& [i, j] : ev.graph.fairness_edges()) edges.push_back({ev.graph.nodes[i], ev.graph.nodes[j]});
  json perf = json::array();
  for (const auto& [i, j] : ev.graph.performance_edges()) perf.push_back({ev.graph.nodes[i], ev.graph.nodes[j]});
  const bool higher_is_better = config.metric == Metric::accuracy;
  return {{"x_axis", {{"quantity", "average disparity"}, {"better", "lower"}}},
          {"y_axis", {{"quantity", std::string("mean ") + to_string(config.metric)},
                      {"better", higher_is_better ? "higher" : "lower"}}},
          {"orientation_hint",
           higher_is_better ? "reverse x so that better models sit toward the upper right"
                            : "reverse both axes so that better models sit toward the upper right"},
          {"points", points},
          {"fairness_edges", edges},
          {"performance_edges", perf}};
}

json evaluation_report(const RunConfig& config, const Evaluation& ev, const AuditReport& audit,
                       const json& input_digests) {
  json models = json::array();
  for (std::size_t m = 0; m < ev.assessments.size(); ++m) {
    const auto& a = ev.assessments[m];
    const auto& v = ev.vectors[m];
    json groups = json::array();
    for (const auto& e : v.entries) {
      groups.push_back({{"group", e.key.to_string()},
                        {"metric", e.metric},
                        {"disparity", e.disparity},
                        {"exact", exact_json(e.exact)}});
    }
    models.push_back({{"model_id", a.model_id},
                      {"mean_metric", a.mean_metric},
                      {"mean_exact", exact_json(a.exact_mean)},
                      {"interval", a.interval.to_json()},
                      {"avg_disparity", a.avg_disparity},
                      {"K", a.subgroups},
                      {"baseline", v.baseline},
                      {"baseline_mode", to_string(v.baseline_mode)},
                      {"groups", groups}});
  }

  json clusters = json::array();
  for (const auto& c : ev.clusters) clusters.push_back(c);

  json report{{"tool", {{"name", "fairlens"}, {"version", FAIRLENS_VERSION}}},
              {"config", config.to_json()},
              {"inputs", input_digests},
              {"dataset_audit", audit.to_json()},
              {"evaluation",
               {{"metric", to_string(config.evaluation.metric)},
                {"aggregation", to_string(config.evaluation.aggregation)},
                {"baseline_mode", to_string(config.evaluation.baseline)},
                {"depth", ev.groups.empty() ? 0 : ev.groups.front().depth()},
                {"K", ev.groups.size()}}},
              {"models", models},
              {"clusters", clusters},
              {"plot_data", plot_data(ev, config.evaluation)}};

  if (ev.graph.nodes.size() >= 2) {
    const auto& g = ev.graph;
    json p_matrix = json::object();
    json tests = json::array();
    for (const auto& p : g.pairs) {
      const auto& a = g.nodes[p.first];
      const auto& b = g.nodes[p.second];
      p_matrix[a][b] = p.p_value;
      p_matrix[b][a] = p.p_value;
      tests.push_back({{"a", a},
                       {"b", b},
                       {"p_value", p.p_value},
                       {"degenerate", p.degenerate},
                       {"fairness_edge", p.fairness_edge},
                       {"performance_edge", p.performance_edge},
                       {"test", p.test ? p.test->to_json() : json(nullptr)}});
    }
    report["pairwise"] = {{"alpha", g.alpha},
                          {"p_matrix", p_matrix},
                          {"tests", tests},
                          {"fairness_edges", report["plot_data"]["fairness_edges"]},
                          {"performance_edges", report["plot_data"]["performance_edges"]}};
  }
  return report;
}

CsvTables evaluation_csv(const Evaluation& ev) {
  CsvTables t;
  std::ostringstream models;
  models << "model_id,mean_metric,ci_lower,ci_upper,avg_disparity,K,baseline\n";
  for (std::size_t m = 0; m < ev.assessments.size(); ++m) {
    const auto& a = ev.assessments[m];
    models << csv_field(a.model_id) << ',' << format_number(a.mean_metric) << ',' << format_number(a.interval.lower)
           << ',' << format_number(a.interval.upper) << ',' << format_number(a.avg_disparity) << ',' << a.subgroups
           << ',' << format_number(ev.vectors[m].baseline) << '\n';
  }
  t.models = models.str();

  std::ostringstream groups;
  groups << "model_id,group,metric,disparity,errors,words\n";
  for (const auto& v : ev.vectors) {
    for (const auto& e : v.entries) {
      groups << csv_field(v.model_id) << ',' << csv_field(e.key.to_string()) << ',' << format_number(e.metric) << ','
             << format_number(e.disparity) << ',';
      if (e.exact) groups << e.exact->errors << ',' << e.exact->words;
      else groups << ',';
      groups << '\n';
    }
  }
  t.groups = groups.str();

  std::ostringstream pairwise;
  pairwise << "model_a,model_b,T_plus,T_minus,p_value,method,degenerate,fairness_edge,performance_edge\n";
  for (const auto& p : ev.graph.pairs) {
    pairwise << csv_field(ev.graph.nodes[p.first]) << ',' << csv_field(ev.graph.nodes[p.second]) << ',';
    if (p.test) {
      pairwise << format_number(p.test->t_plus) << ',' << format_number(p.test->t_minus) << ',';
    } else {
      pairwise << ",,";
    }
    pairwise << format_number(p.p_value) << ',' << (p.test ? to_string(p.test->method) : "") << ','
             << (p.degenerate ? "true" : "false") << ',' << (p.fairness_edge ? "true" : "false") << ','
             << (p.performance_edge ? "true" : "false") << '\n';
  }
  t.pairwise = pairwise.str();
  return t;
}

std::vector<DisparityVector> disparity_vectors_from_report(const json& report) {
  std::vector<DisparityVector> out;
  try {
    for (const auto& m : report.at("models")) {
      DisparityVector v;
      v.model_id = m.at("model_id").get<std::string>();
      v.baseline = m.at("baseline").get<double>();
      v.baseline_mode = parse_baseline_mode(m.at("baseline_mode").get<std::string>());
      for (const auto& g : m.at("groups")) {
        std::vector<GroupComponent> components;
        const auto text = g.at("group").get<std::string>();
        std::size_t start = 0;
        while (start <= text.size()) {
          const auto end = std::min(text.find('|', start), text.size());
          const auto part = text.substr(start, end - start);
          const auto eq = part.find('=');
          if (eq == std::string::npos) throw ValidationError("malformed group key '" + text + "' in report");
          components.push_back({part.substr(0, eq), part.substr(eq + 1)});
          start = end + 1;
        }
        v.entries.push_back({GroupKey(std::move(components)), g.at("metric").get<double>(),
                             g.at("disparity").get<double>(), std::nullopt});
      }
      out.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return out;
}

const char* to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::all: return "all";
  }
  return "?";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "all") return OutputFormat::all;
  throw ValidationError("format must be json, csv or all, got '" + std::string(text) + "'");
}

}  // namespace fairlens
