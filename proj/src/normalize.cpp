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


#include "fairlens/normalize.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>
#include <unicode/utf8.h>

#include "fairlens/error.hpp"

namespace fairlens {
namespace {

bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019 || c == 0x02BC; }

std::string to_lower(std::string_view s) {
  std::string out;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  u.toUTF8String(out);
  return out;
}

// Calls fn(code_point, byte_offset, byte_length) for every code point;
// malformed bytes are reported as U+FFFD.
template <class Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    fn(c, start, i - start);
  }
}

}  // namespace

nlohmann::json NormalizationConfig::to_json() const {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : custom_substitutions) subs.push_back({{"pattern", s.pattern}, {"replacement", s.replacement}});
  return {{"lowercase", lowercase},
          {"strip_punctuation", strip_punctuation},
          {"collapse_whitespace", collapse_whitespace},
          {"custom_substitutions", subs}};
}

NormalizationConfig NormalizationConfig::from_json(const nlohmann::json& j) {
  NormalizationConfig c;
  if (!j.is_object()) throw ValidationError("normalization config must be a JSON object");
  c.lowercase = j.value("lowercase", c.lowercase);
  c.strip_punctuation = j.value("strip_punctuation", c.strip_punctuation);
  c.collapse_whitespace = j.value("collapse_whitespace", c.collapse_whitespace);
  if (j.contains("custom_substitutions")) {
    for (const auto& s : j.at("custom_substitutions")) {
      c.custom_substitutions.push_back({s.at("pattern").get<std::string>(), s.at("replacement").get<std::string>()});
    }
  }
  return c;
}

Normalizer::Normalizer(NormalizationConfig config) : config_(std::move(config)) {
  for (const auto& sub : config_.custom_substitutions) {
    try {
      compiled_.emplace_back(std::regex(sub.pattern, std::regex::ECMAScript), sub.replacement);
    } catch (const std::regex_error& e) {
      throw ValidationError("invalid substitution pattern '" + sub.pattern + "': " + e.what());
    }
  }
}

std::string Normalizer::text(std::string_view input) const {
  std::string s = config_.lowercase ? to_lower(input) : std::string(input);
  for (const auto& [re, replacement] : compiled_) s = std::regex_replace(s, re, replacement);

  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for_each_code_point(s, [&](UChar32 c, int32_t offset, int32_t len) {
    if (config_.strip_punctuation && u_ispunct(c)) {
      if (is_apostrophe(c)) return;
      c = ' ';
    }
    if (u_isUWhiteSpace(c)) {
      if (config_.collapse_whitespace) {
        pending_space = true;
      } else {
        // punctuation replaced above is emitted as a plain space
        if (c == ' ') out.push_back(' ');
        else out.append(s, static_cast<std::size_t>(offset), static_cast<std::size_t>(len));
      }
      return;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    if (c == 0xFFFD && len != 3) {
      out.append("\xEF\xBF\xBD");
    } else {
      out.append(s, static_cast<std::size_t>(offset), static_cast<std::size_t>(len));
    }
  });
  return out;
}

std::vector<std::string> Normalizer::tokens(std::string_view input) const { return split_tokens(text(input)); }

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for_each_code_point(text, [&](UChar32 c, int32_t offset, int32_t len) {
    if (u_isUWhiteSpace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(static_cast<std::size_t>(offset), static_cast<std::size_t>(len)));
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string normalize_text(std::string_view text, const NormalizationConfig& config) {
  return Normalizer(config).text(text);
}

std::vector<std::string> normalize(std::string_view text, const NormalizationConfig& config) {
  return Normalizer(config).tokens(text);
}

}  // namespace fairlens
