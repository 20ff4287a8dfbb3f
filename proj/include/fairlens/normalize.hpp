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

#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fairlens {

struct Substitution {
  std::string pattern;  // ECMAScript regex, applied after lowercasing
  std::string replacement;
};

/// Transcript normalization applied to references and hypotheses alike.
/// Order: lowercase, custom substitutions, punctuation removal, whitespace.
/// Idempotent as long as the custom substitutions are.
struct NormalizationConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool collapse_whitespace = true;
  std::vector<Substitution> custom_substitutions;

  nlohmann::json to_json() const;
  static NormalizationConfig from_json(const nlohmann::json& j);
};

/// Precompiled normalizer; const member functions are thread-safe.
class Normalizer {
 public:
  explicit Normalizer(NormalizationConfig config);

  const NormalizationConfig& config() const noexcept { return config_; }

  /// Normalized text. With collapse_whitespace, runs of whitespace become a
  /// single space and the ends are trimmed.
  std::string text(std::string_view input) const;
  /// Maximal whitespace-free units of text(input).
  std::vector<std::string> tokens(std::string_view input) const;

 private:
  NormalizationConfig config_;
  std::vector<std::pair<std::regex, std::string>> compiled_;
};

std::string normalize_text(std::string_view text, const NormalizationConfig& config);
std::vector<std::string> normalize(std::string_view text, const NormalizationConfig& config);

/// Splits on Unicode whitespace.
std::vector<std::string> split_tokens(std::string_view text);

}  // namespace fairlens
