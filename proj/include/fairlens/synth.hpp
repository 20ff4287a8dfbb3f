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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairlens/corpus.hpp"

namespace fairlens {

struct ErrorRates {
  double substitution = 0.0;
  double deletion = 0.0;
  double insertion = 0.0;
};

/// Rates applied to utterances matching every component of `group`.
struct RateOverride {
  std::vector<GroupComponent> group;
  ErrorRates rates;
};

struct SynthModel {
  std::string id;
  ErrorRates base;
  std::vector<RateOverride> overrides;  // the last matching override wins
};

/// Synthetic corpus description: one block of utterances per full
/// combination of schema labels, with per-model corruption rates.
struct SynthSpec {
  std::size_t utterances_per_cell = 4;
  std::size_t speakers_per_cell = 2;
  std::size_t min_tokens = 20;
  std::size_t max_tokens = 20;
  std::size_t vocabulary_size = 500;
  std::vector<SynthModel> models;

  /// Throws ValidationError on rates outside [0, 1] or bad sizes.
  static SynthSpec from_json(const nlohmann::json& j, const AttributeSchema& schema);
  void validate(const AttributeSchema& schema) const;
};

struct SynthCorpus {
  Corpus corpus;
  std::vector<ModelHypotheses> models;
};

/// Deterministic in (spec, seed). The reference and corruption draws of an
/// utterance come from streams keyed by its index only, so two models with
/// the same rates on an utterance produce the same hypothesis for it, and
/// raising a rate only adds errors.
SynthCorpus synthesize(const AttributeSchema& schema, const SynthSpec& spec, std::uint64_t seed);

/// Writes schema.json, manifest.jsonl and hypotheses/<model>.jsonl into `dir`.
void write_synth(const SynthCorpus& synth, const std::filesystem::path& dir);

void write_manifest(const Corpus& corpus, std::ostream& out);
void write_hypotheses(const ModelHypotheses& model, const Corpus& corpus, std::ostream& out);

}  // namespace fairlens
