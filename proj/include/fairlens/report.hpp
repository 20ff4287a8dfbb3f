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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fairlens/corpus.hpp"
#include "fairlens/fairness.hpp"

namespace fairlens {

enum class OutputFormat { json, csv, all };

/// Everything needed to reproduce an evaluation run. Embedded verbatim in
/// every report; `fairlens evaluate --config report.json` replays it.
struct RunConfig {
  std::string schema_path;
  std::string manifest_path;
  std::vector<std::pair<std::string, std::string>> hypotheses;  // (model id, path)
  EvaluationConfig evaluation;
  std::size_t min_count = 1;
  std::string out_dir = "fairlens-out";
  OutputFormat format = OutputFormat::all;

  nlohmann::json to_json() const;
  /// Accepts either a config object or a full report carrying one under "config".
  static RunConfig from_json(const nlohmann::json& j);
};

/// Shortest decimal text that reads back as the same double.
std::string format_number(double v);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

nlohmann::json plot_data(const Evaluation& evaluation, const EvaluationConfig& config);

nlohmann::json evaluation_report(const RunConfig& config, const Evaluation& evaluation, const AuditReport& audit,
                                 const nlohmann::json& input_digests);

struct CsvTables {
  std::string models;
  std::string groups;
  std::string pairwise;
};

CsvTables evaluation_csv(const Evaluation& evaluation);

/// Disparity vectors as stored in a report's models[] section.
std::vector<DisparityVector> disparity_vectors_from_report(const nlohmann::json& report);

const char* to_string(OutputFormat f) noexcept;
OutputFormat parse_output_format(std::string_view text);

}  // namespace fairlens
