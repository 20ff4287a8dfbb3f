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


#include "fairlens/commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "fairlens/corpus.hpp"
#include "fairlens/csv.hpp"
#include "fairlens/error.hpp"
#include "fairlens/fairness.hpp"
#include "fairlens/report.hpp"
#include "fairlens/synth.hpp"

namespace fairlens {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

AttributeSchema schema_from_text(const std::string& text, const std::string& path) {
  std::istringstream in(text);
  try {
    return load_schema(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Corpus corpus_from_text(const std::string& text, const std::string& path, const AttributeSchema& schema,
                        const NormalizationConfig& normalization) {
  std::istringstream in(text);
  try {
    return load_manifest(in, schema, normalization);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::pair<std::string, std::string> parse_hyp_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
  if (eq == 0 || eq + 1 == spec.size()) throw ValidationError("--hyp expects MODEL_ID=PATH, got '" + spec + "'");
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
  std::string schema;
  std::string manifest;
  std::size_t min_count = 1;
  std::string out = "fairlens-out";
};

int cmd_audit(const AuditArgs& a, std::ostream& out) {
  const auto schema = schema_from_text(read_file(a.schema), a.schema);
  const auto corpus = corpus_from_text(read_file(a.manifest), a.manifest, schema, {});
  const auto report = audit(corpus, a.min_count);
  fs::create_directories(a.out);
  write_file_atomic(fs::path(a.out) / "audit.json", report.to_json().dump(2) + "\n");
  const auto table = report.to_table();
  write_file_atomic(fs::path(a.out) / "audit.txt", table);
  out << table;
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct Loaded {
  Corpus corpus;
  std::vector<ModelHypotheses> models;
  json digests;
};

Loaded load_inputs(const RunConfig& cfg) {
  if (cfg.schema_path.empty()) throw ValidationError("--schema is required");
  if (cfg.manifest_path.empty()) throw ValidationError("--manifest is required");
  if (cfg.hypotheses.empty()) throw ValidationError("at least one --hyp MODEL_ID=PATH is required");

  const auto schema_text = read_file(cfg.schema_path);
  const auto manifest_text = read_file(cfg.manifest_path);
  const auto schema = schema_from_text(schema_text, cfg.schema_path);
  Loaded l{corpus_from_text(manifest_text, cfg.manifest_path, schema, cfg.evaluation.normalization), {}, {}};
  l.digests = {{"algorithm", "sha256"},
               {"schema", sha256_hex(schema_text)},
               {"manifest", sha256_hex(manifest_text)},
               {"hypotheses", json::object()}};
  for (const auto& [id, path] : cfg.hypotheses) {
    const auto text = read_file(path);
    std::istringstream in(text);
    try {
      l.models.push_back(load_hypotheses(in, id, l.corpus));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ": " + e.what());
    }
    l.digests["hypotheses"][id] = sha256_hex(text);
  }
  return l;
}

void print_summary(const Evaluation& ev, const EvaluationConfig& config, std::ostream& out) {
  out << "K = " << ev.groups.size() << " subgroups, metric " << to_string(config.metric) << " ("
      << to_string(config.aggregation) << "), baseline " << to_string(config.baseline) << "\n";
  for (const auto& a : ev.assessments) {
    out << "  " << a.model_id << ": mean " << format_number(a.mean_metric) << " ["
        << format_number(a.interval.lower) << ", " << format_number(a.interval.upper) << "]"
        << ", average disparity " << format_number(a.avg_disparity) << "\n";
  }
  if (ev.assessments.size() > 1) {
    out << "fairness clusters:";
    for (const auto& c : ev.clusters) {
      out << " {";
      for (std::size_t i = 0; i < c.size(); ++i) out << (i ? ", " : "") << c[i];
      out << "}";
    }
    out << "\n";
  }
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto inputs = load_inputs(cfg);
  const auto audit_report = audit(inputs.corpus, cfg.min_count);
  const auto ev = assess_models(inputs.corpus, inputs.models, cfg.evaluation);

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  if (cfg.format != OutputFormat::csv) {
    const auto report = evaluation_report(cfg, ev, audit_report, inputs.digests);
    write_file_atomic(dir / "report.json", report.dump(2) + "\n");
    write_file_atomic(dir / "plot_data.json", report.at("plot_data").dump(2) + "\n");
  }
  if (cfg.format != OutputFormat::json) {
    const auto tables = evaluation_csv(ev);
    write_file_atomic(dir / "models.csv", tables.models);
    write_file_atomic(dir / "groups.csv", tables.groups);
    if (ev.assessments.size() > 1) write_file_atomic(dir / "pairwise.csv", tables.pairwise);
  }
  print_summary(ev, cfg.evaluation, out);
  out << "wrote results to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::vector<std::string> reports;
  std::string model_a;
  std::string model_b;
  std::optional<double> alpha;
  WilcoxonOptions wilcoxon;
};

int cmd_compare(const CompareArgs& a, const std::optional<RunConfig>& cfg, std::ostream& out, std::ostream& err) {
  std::vector<DisparityVector> vectors;
  double alpha = 0.05;
  if (cfg) {
    const auto inputs = load_inputs(*cfg);
    vectors = assess_models(inputs.corpus, inputs.models, cfg->evaluation).vectors;
    alpha = cfg->evaluation.alpha;
  }
  for (const auto& path : a.reports) {
    const auto report = parse_json_file(path);
    for (auto& v : disparity_vectors_from_report(report)) vectors.push_back(std::move(v));
    if (report.contains("config")) alpha = RunConfig::from_json(report).evaluation.alpha;
  }
  if (a.alpha) alpha = *a.alpha;
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");

  auto find = [&vectors](const std::string& id) -> const DisparityVector& {
    for (const auto& v : vectors) {
      if (v.model_id == id) return v;
    }
    throw ValidationError("model '" + id + "' not found in the given inputs");
  };
  const auto& va = find(a.model_a);
  const auto& vb = find(a.model_b);
  const double da = average_disparity(va);
  const double db = average_disparity(vb);

  out << "compare " << a.model_a << " vs " << a.model_b << " (K = " << va.size() << " subgroups)\n";
  out << "  average disparity: " << a.model_a << " " << format_number(da) << ", " << a.model_b << " "
      << format_number(db) << "\n";
  WilcoxonResult r;
  try {
    r = compare_fairness(va, vb, a.wilcoxon);
  } catch (const DegenerateSampleError& e) {
    err << "warning: " << e.what() << "\n";
    out << "  verdict: degenerate (identical disparity vectors, no test possible)\n";
    return kExitOk;
  }
  out << "  T+ = " << format_number(r.t_plus) << ", T- = " << format_number(r.t_minus) << ", M = " << r.sample_size
      << ", zeros = " << r.zeros << "\n";
  out << "  method: " << to_string(r.method) << ", alternative: " << to_string(r.alternative) << "\n";
  if (r.z) out << "  z = " << format_number(*r.z) << "\n";
  out << "  p = " << format_number(r.p_value) << "\n";
  if (r.p_value < alpha) {
    const auto& fairer = da < db ? a.model_a : a.model_b;
    out << "  verdict: significant (p = " << format_number(r.p_value) << " < " << format_number(alpha) << "), "
        << fairer << " is fairer\n";
  } else {
    out << "  verdict: not significant (p = " << format_number(r.p_value) << " \xE2\x89\xA5 " << format_number(alpha)
        << ")\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth / convert-csv

int cmd_synth(const std::string& schema_path, const std::string& spec_path, std::uint64_t seed,
              const std::string& out_dir, std::ostream& out) {
  const auto schema = schema_from_text(read_file(schema_path), schema_path);
  const auto spec = SynthSpec::from_json(parse_json_file(spec_path), schema);
  const auto synth = synthesize(schema, spec, seed);
  write_synth(synth, out_dir);
  out << "wrote " << synth.corpus.size() << " utterances and " << synth.models.size() << " hypothesis file(s) to "
      << out_dir << "\n";
  return kExitOk;
}

int cmd_convert_csv(const std::string& schema_path, const std::string& csv_path, const std::string& out_path,
                    std::ostream& out) {
  const auto schema = schema_from_text(read_file(schema_path), schema_path);
  std::istringstream csv(read_file(csv_path));
  std::ostringstream manifest;
  const auto n = csv_to_manifest(csv, schema, manifest);
  if (out_path.empty()) {
    out << manifest.str();
  } else {
    write_file_atomic(out_path, manifest.str());
    out << "wrote " << n << " records to " << out_path << "\n";
  }
  return kExitOk;
}

template <class Parse>
auto enum_option(Parse parse) {
  return [parse](const std::string& s) -> std::string {
    try {
      parse(s);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return {};
  };
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fairlens: fairness evaluation for speech recognition transcripts"};
  app.set_version_flag("--version", std::string("fairlens ") + FAIRLENS_VERSION);
  app.require_subcommand(1);

  // audit
  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand("audit", "Dataset balance: coverage and KL divergence per attribute");
  audit_cmd->add_option("--schema", audit_args.schema, "Schema JSON")->required();
  audit_cmd->add_option("--manifest", audit_args.manifest, "Manifest JSONL")->required();
  audit_cmd->add_option("--min-count", audit_args.min_count, "Members needed for a subgroup to count as covered")
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--out", audit_args.out, "Output directory");

  // evaluate (flags shared with compare)
  struct EvalFlags {
    std::string config, schema, manifest, out, format;
    std::vector<std::string> hyps, exclude;
    int depth = 0;
    std::size_t min_count = 1, boot_b = 2000;
    double alpha = 0.05, level = 0.95;
    std::uint64_t seed = 1;
    std::string baseline, agg, wilcoxon, zeros, metric, resample, alternative;
    bool include_other = false;
    int threads = 0;
  } ef;
  using OptionMap = std::map<std::string, CLI::Option*>;
  OptionMap eval_opts, cmp_opts;
  auto add_eval_flags = [&ef](CLI::App* cmd, OptionMap& o) {
    o["config"] = cmd->add_option("--config", ef.config, "Run config JSON, or a report to replay");
    o["schema"] = cmd->add_option("--schema", ef.schema, "Schema JSON");
    o["manifest"] = cmd->add_option("--manifest", ef.manifest, "Manifest JSONL");
    o["hyp"] = cmd->add_option("--hyp", ef.hyps, "MODEL_ID=PATH (repeatable; a bare path uses its file stem)");
    o["depth"] = cmd->add_option("--depth", ef.depth, "Subgroup depth")->check(CLI::IsMember({1, 2}));
    o["min-count"] = cmd->add_option("--min-count", ef.min_count, "Coverage threshold for the audit section")
                         ->check(CLI::PositiveNumber);
    o["alpha"] = cmd->add_option("--alpha", ef.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    o["baseline"] = cmd->add_option("--baseline", ef.baseline, "pooled | macro")
                        ->check(enum_option(parse_baseline_mode));
    o["agg"] = cmd->add_option("--agg", ef.agg, "pooled | macro")->check(enum_option(parse_aggregation));
    o["boot-b"] = cmd->add_option("--boot-b", ef.boot_b, "Bootstrap resamples")->check(CLI::PositiveNumber);
    o["seed"] = cmd->add_option("--seed", ef.seed, "Bootstrap seed");
    o["level"] = cmd->add_option("--level", ef.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
    o["wilcoxon"] = cmd->add_option("--wilcoxon", ef.wilcoxon, "auto | exact | normal")
                        ->check(enum_option(parse_wilcoxon_mode));
    o["zeros"] = cmd->add_option("--zeros", ef.zeros, "pratt | discard")->check(enum_option(parse_zero_handling));
    o["metric"] = cmd->add_option("--metric", ef.metric, "wer | accuracy")->check(enum_option(parse_metric));
    o["resample"] = cmd->add_option("--resample", ef.resample, "utterance | speaker")
                        ->check(enum_option(parse_resample_unit));
    o["exclude"] = cmd->add_option("--exclude", ef.exclude, "Subgroup key to leave out, e.g. Sex=Male|Race=Asian");
    o["include-other"] = cmd->add_flag("--include-other", ef.include_other, "Keep the catch-all dialogue groups");
    o["out"] = cmd->add_option("--out", ef.out, "Output directory");
    o["format"] = cmd->add_option("--format", ef.format, "json | csv | all")->check(enum_option(parse_output_format));
    o["threads"] = cmd->add_option("--threads", ef.threads, "Worker threads (results do not depend on it)")
                       ->check(CLI::PositiveNumber);
  };
  auto* eval_cmd = app.add_subcommand("evaluate", "Per-group metrics, disparities, intervals and pairwise tests");
  add_eval_flags(eval_cmd, eval_opts);

  // compare
  CompareArgs cmp;
  std::string alternative;
  auto* cmp_cmd = app.add_subcommand("compare", "Signed-rank fairness test between two models");
  add_eval_flags(cmp_cmd, cmp_opts);
  cmp_cmd->add_option("--report", cmp.reports, "Evaluation report JSON (repeatable)");
  cmp_cmd->add_option("--model-a", cmp.model_a, "First model id")->required();
  cmp_cmd->add_option("--model-b", cmp.model_b, "Second model id")->required();
  cmp_cmd->add_option("--alternative", alternative, "two_sided | greater | less")
      ->check(enum_option(parse_alternative));

  // synth
  std::string synth_schema, synth_spec, synth_out = "synth-out";
  std::uint64_t synth_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with per-group corruption rates");
  synth_cmd->add_option("--schema", synth_schema, "Solo schema JSON")->required();
  synth_cmd->add_option("--spec", synth_spec, "Synthesis spec JSON")->required();
  synth_cmd->add_option("--seed", synth_seed, "Seed");
  synth_cmd->add_option("--out", synth_out, "Output directory");

  // convert-csv
  std::string conv_schema, conv_csv, conv_out;
  auto* conv_cmd = app.add_subcommand("convert-csv", "Convert a CSV table into manifest JSONL");
  conv_cmd->add_option("--schema", conv_schema, "Schema JSON")->required();
  conv_cmd->add_option("--csv", conv_csv, "CSV with header row")->required();
  conv_cmd->add_option("--out", conv_out, "Manifest path (stdout if omitted)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  const OptionMap& active = *cmp_cmd ? cmp_opts : eval_opts;
  auto given = [&active](const char* name) { return active.at(name)->count() > 0; };
  // Config file first, then flags that were given on the command line.
  auto run_config = [&]() {
    RunConfig cfg;
    if (given("config")) cfg = RunConfig::from_json(parse_json_file(ef.config));
    auto& e = cfg.evaluation;
    if (given("schema")) cfg.schema_path = ef.schema;
    if (given("manifest")) cfg.manifest_path = ef.manifest;
    if (given("hyp")) {
      cfg.hypotheses.clear();
      for (const auto& h : ef.hyps) cfg.hypotheses.push_back(parse_hyp_spec(h));
    }
    if (given("depth")) e.depth = ef.depth;
    if (given("min-count")) cfg.min_count = ef.min_count;
    if (given("alpha")) e.alpha = ef.alpha;
    if (given("baseline")) e.baseline = parse_baseline_mode(ef.baseline);
    if (given("agg")) e.aggregation = parse_aggregation(ef.agg);
    if (given("boot-b")) e.resamples = ef.boot_b;
    if (given("seed")) e.seed = ef.seed;
    if (given("level")) e.level = ef.level;
    if (given("wilcoxon")) e.wilcoxon.mode = parse_wilcoxon_mode(ef.wilcoxon);
    if (given("zeros")) e.wilcoxon.zero_handling = parse_zero_handling(ef.zeros);
    if (given("metric")) e.metric = parse_metric(ef.metric);
    if (given("resample")) e.resample_unit = parse_resample_unit(ef.resample);
    if (given("exclude")) e.exclude = ef.exclude;
    if (given("include-other")) e.include_other = ef.include_other;
    if (given("out")) cfg.out_dir = ef.out;
    if (given("format")) cfg.format = parse_output_format(ef.format);
    return cfg;
  };

  try {
    if (*audit_cmd) return cmd_audit(audit_args, out);
    if (*synth_cmd) return cmd_synth(synth_schema, synth_spec, synth_seed, synth_out, out);
    if (*conv_cmd) return cmd_convert_csv(conv_schema, conv_csv, conv_out, out);
    if (given("threads")) omp_set_num_threads(ef.threads);
    if (*eval_cmd) return cmd_evaluate(run_config(), out);
    if (*cmp_cmd) {
      const auto cfg = run_config();
      cmp.wilcoxon = cfg.evaluation.wilcoxon;
      if (!alternative.empty()) cmp.wilcoxon.alternative = parse_alternative(alternative);
      if (given("alpha")) cmp.alpha = ef.alpha;
      const bool from_inputs = given("config") || given("manifest");
      if (!from_inputs && cmp.reports.empty()) throw ValidationError("compare needs --report or evaluation inputs");
      return cmd_compare(cmp, from_inputs ? std::optional<RunConfig>(cfg) : std::nullopt, out, err);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DegenerateSampleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace fairlens
