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


#include "fairlens/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fairlens/error.hpp"
#include "fairlens/report.hpp"
#include "fairlens/rng.hpp"

namespace fairlens {
namespace {

using nlohmann::json;

void check_rates(const ErrorRates& r, const std::string& where) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(r.substitution) || !in_unit(r.deletion) || !in_unit(r.insertion)) {
    throw ValidationError(where + ": error rates must lie in [0, 1]");
  }
  if (r.substitution + r.deletion > 1.0) {
    throw ValidationError(where + ": substitution + deletion rate exceeds 1");
  }
}

ErrorRates read_rates(const json& j, ErrorRates fallback) {
  fallback.substitution = j.value("substitution", fallback.substitution);
  fallback.deletion = j.value("deletion", fallback.deletion);
  fallback.insertion = j.value("insertion", fallback.insertion);
  return fallback;
}

std::string word(std::size_t w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%04zu", w);
  return buf;
}

bool matches(const Utterance& u, const AttributeSchema& schema, const std::vector<GroupComponent>& group) {
  for (const auto& c : group) {
    const auto a = schema.attribute_index(c.attribute);
    if (!a || u.labels[*a] != c.label) return false;
  }
  return true;
}

// Odometer over label indices, last attribute fastest.
bool next_cell(std::vector<std::size_t>& cell, const std::vector<Attribute>& attrs) {
  for (std::size_t a = attrs.size(); a-- > 0;) {
    if (++cell[a] < attrs[a].labels.size()) return true;
    cell[a] = 0;
  }
  return false;
}

bool safe_file_stem(const std::string& id) {
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

SynthSpec SynthSpec::from_json(const json& j, const AttributeSchema& schema) {
  if (!j.is_object()) throw ValidationError("synth spec must be a JSON object");
  SynthSpec s;
  try {
    s.utterances_per_cell = j.value("utterances_per_cell", s.utterances_per_cell);
    s.speakers_per_cell = j.value("speakers_per_cell", std::min(s.speakers_per_cell, s.utterances_per_cell));
    if (j.contains("tokens_per_utterance")) {
      const auto& t = j.at("tokens_per_utterance");
      if (t.is_array()) {
        s.min_tokens = t.at(0).get<std::size_t>();
        s.max_tokens = t.at(1).get<std::size_t>();
      } else {
        s.min_tokens = s.max_tokens = t.get<std::size_t>();
      }
    }
    s.vocabulary_size = j.value("vocabulary_size", s.vocabulary_size);
    for (const auto& m : j.at("models")) {
      SynthModel model;
      model.id = m.at("id").get<std::string>();
      model.base = read_rates(m, {});
      for (const auto& o : m.value("overrides", json::array())) {
        const auto key = GroupKey::parse(o.at("group").get<std::string>(), schema.attributes());
        model.overrides.push_back({key.components(), read_rates(o, model.base)});
      }
      s.models.push_back(std::move(model));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed synth spec: ") + e.what());
  }
  s.validate(schema);
  return s;
}

void SynthSpec::validate(const AttributeSchema& schema) const {
  if (schema.mode() != SchemaMode::solo) throw ValidationError("synthetic corpora need a solo schema");
  if (utterances_per_cell == 0) throw ValidationError("utterances_per_cell must be positive");
  if (speakers_per_cell == 0 || speakers_per_cell > utterances_per_cell) {
    throw ValidationError("speakers_per_cell must lie in [1, utterances_per_cell]");
  }
  if (min_tokens == 0 || min_tokens > max_tokens) throw ValidationError("token counts must satisfy 1 <= min <= max");
  if (vocabulary_size < 2) throw ValidationError("vocabulary_size must be at least 2");
  if (models.empty()) throw ValidationError("synth spec lists no models");
  for (const auto& m : models) {
    if (m.id.empty() || !safe_file_stem(m.id)) {
      throw ValidationError("synth model id '" + m.id + "' must be non-empty and use only [A-Za-z0-9_.-]");
    }
    check_rates(m.base, "model '" + m.id + "'");
    for (const auto& o : m.overrides) check_rates(o.rates, "model '" + m.id + "' override");
  }
}

SynthCorpus synthesize(const AttributeSchema& schema, const SynthSpec& spec, std::uint64_t seed) {
  spec.validate(schema);
  const auto& attrs = schema.attributes();

  std::vector<Utterance> utterances;
  std::vector<std::size_t> cell(attrs.size(), 0);
  std::size_t cell_index = 0;
  while (true) {
    for (std::size_t k = 0; k < spec.utterances_per_cell; ++k) {
      const std::size_t index = utterances.size();
      Utterance u;
      char id[32];
      std::snprintf(id, sizeof id, "utt%06zu", index);
      u.id = id;
      for (std::size_t a = 0; a < attrs.size(); ++a) u.labels.push_back(attrs[a].labels[cell[a]]);
      char speaker[48];
      std::snprintf(speaker, sizeof speaker, "spk%04zu_%zu", cell_index, k % spec.speakers_per_cell);
      u.metadata["speaker"] = speaker;

      StreamRng rng(seed, 2 * index);
      const auto length = spec.min_tokens + rng.below(spec.max_tokens - spec.min_tokens + 1);
      for (std::size_t t = 0; t < length; ++t) {
        if (t) u.reference += ' ';
        u.reference += word(rng.below(spec.vocabulary_size));
      }
      utterances.push_back(std::move(u));
    }
    ++cell_index;
    if (!next_cell(cell, attrs)) break;
  }

  SynthCorpus out{Corpus(schema, std::move(utterances)), {}};
  const auto utts = out.corpus.utterances();
  for (const auto& m : spec.models) {
    ModelHypotheses hyp{m.id, {}};
    for (std::size_t i = 0; i < utts.size(); ++i) {
      ErrorRates r = m.base;
      for (const auto& o : m.overrides) {
        if (matches(utts[i], schema, o.group)) r = o.rates;
      }
      // Four draws per token whatever the rates, so streams stay coupled across models.
      StreamRng rng(seed, 2 * i + 1);
      std::string text;
      auto emit = [&text](const std::string& w) {
        if (!text.empty()) text += ' ';
        text += w;
      };
      for (const auto& token : split_tokens(utts[i].reference)) {
        const double u = rng.uniform();
        const auto replacement = rng.below(spec.vocabulary_size - 1);
        const double v = rng.uniform();
        const auto inserted = rng.below(spec.vocabulary_size);
        if (u < r.deletion) {
          // dropped
        } else if (u < r.deletion + r.substitution) {
          const auto original = static_cast<std::size_t>(std::stoul(token.substr(1)));
          emit(word(replacement >= original ? replacement + 1 : replacement));
        } else {
          emit(token);
        }
        if (v < r.insertion) emit(word(inserted));
      }
      hyp.hypotheses.emplace(utts[i].id, std::move(text));
    }
    out.models.push_back(std::move(hyp));
  }
  return out;
}

void write_manifest(const Corpus& corpus, std::ostream& out) {
  const auto& attrs = corpus.schema().attributes();
  const bool dialogue = corpus.schema().mode() == SchemaMode::dialogue;
  for (const auto& u : corpus.utterances()) {
    json a = json::object();
    for (std::size_t k = 0; k < attrs.size(); ++k) {
      if (dialogue) {
        a[attrs[k].name] = json::array({u.speaker_labels[k].first, u.speaker_labels[k].second});
      } else {
        a[attrs[k].name] = u.labels[k];
      }
    }
    json rec{{"id", u.id}, {"reference", u.reference}, {"attributes", a}};
    if (!u.metadata.empty()) rec["metadata"] = u.metadata;
    out << rec.dump() << '\n';
  }
}

void write_hypotheses(const ModelHypotheses& model, const Corpus& corpus, std::ostream& out) {
  for (const auto& u : corpus.utterances()) {
    auto it = model.hypotheses.find(u.id);
    if (it == model.hypotheses.end()) continue;
    out << json{{"id", u.id}, {"hypothesis", it->second}}.dump() << '\n';
  }
}

void write_synth(const SynthCorpus& synth, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "schema.json", synth.corpus.schema().to_json().dump(2) + "\n");
  std::ostringstream manifest;
  write_manifest(synth.corpus, manifest);
  write_file_atomic(dir / "manifest.jsonl", manifest.str());
  std::filesystem::create_directories(dir / "hypotheses");
  for (const auto& m : synth.models) {
    std::ostringstream hyp;
    write_hypotheses(m, synth.corpus, hyp);
    write_file_atomic(dir / "hypotheses" / (m.model_id + ".jsonl"), hyp.str());
  }
}

}  // namespace fairlens
