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


#include <algorithm>
#include <cctype>
#include <istream>
#include <set>
#include <string>

#include "fairlens/corpus.hpp"
#include "fairlens/error.hpp"

namespace fairlens {
namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw ValidationError("manifest line " + std::to_string(line) + ": " + what);
}

bool is_age_attribute(std::string_view name) {
  if (name.size() != 3) return false;
  return (name[0] == 'A' || name[0] == 'a') && (name[1] == 'g' || name[1] == 'G') && (name[2] == 'e' || name[2] == 'E');
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

// A label given as text, or as a numeric age for an Age attribute.
std::string label_value(const json& v, const Attribute& attr, std::size_t line) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() && is_age_attribute(attr.name)) {
    std::string bucket;
    try {
      bucket = age_bucket(v.get<double>());
    } catch (const ValidationError& e) {
      fail_line(line, e.what());
    }
    return bucket;
  }
  fail_line(line, "attribute '" + attr.name + "' must be a label string");
}

void check_label(const AttributeSchema& schema, std::size_t a, const std::string& label, std::size_t line) {
  if (!schema.label_index(a, label)) {
    fail_line(line, "unknown label '" + label + "' for attribute '" + schema.attributes()[a].name + "'");
  }
}

std::map<std::string, std::string> read_metadata(const json& m, std::size_t line) {
  std::map<std::string, std::string> out;
  if (m.is_null()) return out;
  if (!m.is_object()) fail_line(line, "metadata must be an object");
  for (const auto& [k, v] : m.items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

}  // namespace

AttributeSchema AttributeSchema::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("schema must be a JSON object");
  SchemaMode mode = SchemaMode::solo;
  const auto mode_text = j.value("mode", std::string("solo"));
  if (mode_text == "dialogue") {
    mode = SchemaMode::dialogue;
  } else if (mode_text != "solo") {
    throw ValidationError("schema mode must be 'solo' or 'dialogue', got '" + mode_text + "'");
  }
  if (!j.contains("attributes") || !j.at("attributes").is_array()) {
    throw ValidationError("schema needs an 'attributes' array");
  }
  std::vector<Attribute> attributes;
  try {
    for (const auto& a : j.at("attributes")) {
      attributes.push_back({a.at("name").get<std::string>(), a.at("labels").get<std::vector<std::string>>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed schema attribute: ") + e.what());
  }
  const auto other_min = j.value("other_min_count", 10);
  if (other_min < 0) throw ValidationError("other_min_count must be nonnegative");
  return AttributeSchema(std::move(attributes), mode, j.value("other_label", std::string("Other")),
                         static_cast<std::size_t>(other_min));
}

json AttributeSchema::to_json() const {
  json attrs = json::array();
  for (const auto& a : attributes_) attrs.push_back({{"name", a.name}, {"labels", a.labels}});
  return {{"mode", mode_ == SchemaMode::solo ? "solo" : "dialogue"},
          {"attributes", attrs},
          {"other_label", other_label_},
          {"other_min_count", other_min_count_}};
}

AttributeSchema load_schema(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("schema is not valid JSON: ") + e.what());
  }
  return AttributeSchema::from_json(j);
}

Corpus load_manifest(std::istream& in, const AttributeSchema& schema, const NormalizationConfig& normalization) {
  const Normalizer normalizer(normalization);
  const auto& attrs = schema.attributes();
  const bool dialogue = schema.mode() == SchemaMode::dialogue;

  std::vector<Utterance> utterances;
  std::set<std::string, std::less<>> ids;
  std::vector<PairCounts> pair_counts(attrs.size());

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      fail_line(line, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) fail_line(line, "record must be a JSON object");
    if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
      fail_line(line, "missing or empty string 'id'");
    }
    if (!rec.contains("reference") || !rec["reference"].is_string()) fail_line(line, "missing string 'reference'");
    if (!rec.contains("attributes") || !rec["attributes"].is_object()) fail_line(line, "missing object 'attributes'");

    Utterance u;
    u.id = rec["id"].get<std::string>();
    u.reference = rec["reference"].get<std::string>();
    if (!ids.insert(u.id).second) fail_line(line, "duplicate id '" + u.id + "'");
    if (normalizer.tokens(u.reference).empty()) fail_line(line, "reference of '" + u.id + "' is empty after normalization");

    const auto& given = rec["attributes"];
    for (const auto& [name, value] : given.items()) {
      if (!schema.attribute_index(name)) fail_line(line, "unknown attribute '" + name + "'");
    }
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      if (!given.contains(attrs[a].name)) fail_line(line, "attribute '" + attrs[a].name + "' is missing");
      const auto& v = given[attrs[a].name];
      if (!dialogue) {
        auto label = label_value(v, attrs[a], line);
        check_label(schema, a, label, line);
        u.labels.push_back(std::move(label));
        continue;
      }
      if (!v.is_array() || v.size() != 2) {
        fail_line(line, "attribute '" + attrs[a].name + "' must list the two speakers' labels");
      }
      auto first = label_value(v[0], attrs[a], line);
      auto second = label_value(v[1], attrs[a], line);
      check_label(schema, a, first, line);
      check_label(schema, a, second, line);
      auto pair = canonical_pair_label(schema, a, first, second);
      ++pair_counts[a][pair];
      u.labels.push_back(std::move(pair));
      u.speaker_labels.emplace_back(std::move(first), std::move(second));
    }
    u.metadata = read_metadata(rec.value("metadata", json()), line);
    utterances.push_back(std::move(u));
  }

  if (!dialogue) return Corpus(schema, std::move(utterances));

  // Bucketing happens after raw counting: sparse pairs collapse to the catch-all label.
  std::vector<Attribute> grouping;
  const auto all_pairs = schema.grouping_labels();
  for (std::size_t a = 0; a < attrs.size(); ++a) {
    Attribute g{attrs[a].name, {}};
    bool any_other = false;
    for (auto& u : utterances) {
      const auto& [x, y] = u.speaker_labels[a];
      u.labels[a] = derive_pair_label(x, y, attrs[a].name, schema, &pair_counts[a]);
      any_other = any_other || u.labels[a] == schema.other_label();
    }
    for (const auto& label : all_pairs[a].labels) {
      if (label == schema.other_label()) continue;
      auto it = pair_counts[a].find(label);
      const std::size_t n = it == pair_counts[a].end() ? 0 : it->second;
      if (n >= schema.other_min_count()) g.labels.push_back(label);
    }
    if (any_other) g.labels.push_back(schema.other_label());
    grouping.push_back(std::move(g));
  }
  return Corpus(schema, std::move(grouping), std::move(utterances));
}

ModelHypotheses load_hypotheses(std::istream& in, std::string model_id, const Corpus& corpus) {
  ModelHypotheses model{std::move(model_id), {}};
  std::string text;
  std::size_t line = 0;
  auto fail = [&](const std::string& what) {
    throw ValidationError("hypotheses '" + model.model_id + "' line " + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, text)) {
    ++line;
    if (is_blank(text)) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string()) fail("missing string 'id'");
    if (!rec.contains("hypothesis") || !rec["hypothesis"].is_string()) fail("missing string 'hypothesis'");
    auto id = rec["id"].get<std::string>();
    if (!corpus.find(id)) fail("unknown utterance id '" + id + "'");
    if (!model.hypotheses.emplace(id, rec["hypothesis"].get<std::string>()).second) {
      fail("duplicate hypothesis for '" + id + "'");
    }
  }
  return model;
}

}  // namespace fairlens
