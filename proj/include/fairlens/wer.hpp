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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairlens/corpus.hpp"
#include "fairlens/normalize.hpp"

namespace fairlens {

enum class EditKind : std::uint8_t { match, substitution, deletion, insertion };

struct EditOp {
  EditKind kind;
  std::string ref;  // empty for insertions
  std::string hyp;  // empty for deletions
};

/// Outcome of a minimum edit-distance alignment between reference and
/// hypothesis token sequences.
struct Alignment {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;
  std::vector<EditOp> script;  // empty unless requested

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
  std::size_t matches() const noexcept { return reference_length - substitutions - deletions; }
  std::size_t hypothesis_length() const noexcept { return matches() + substitutions + insertions; }
  nlohmann::json to_json() const;
};

/// Unit-cost Levenshtein alignment. The backtrace prefers, at every cell,
/// match, then substitution, then deletion, then insertion, so edit scripts
/// are identical on every platform. Throws ValidationError for an empty
/// reference.
Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp, bool keep_script = true);

/// Errors over reference words, kept as an exact ratio.
struct ErrorRate {
  std::uint64_t errors = 0;
  std::uint64_t words = 0;

  double value() const noexcept { return static_cast<double>(errors) / static_cast<double>(words); }
};

ErrorRate utterance_wer(const Alignment& a);
/// Corpus-level pooling: total errors over total reference words.
ErrorRate pooled_wer(std::span<const Alignment> alignments);
/// Pooled over the selected alignments.
ErrorRate pooled_wer(std::span<const Alignment> alignments, std::span<const std::size_t> indices);
/// Unweighted mean of per-utterance WERs over the selected alignments.
double macro_wer(std::span<const Alignment> alignments, std::span<const std::size_t> indices);

enum class Aggregation { pooled, macro_utterance };

/// WER of the subgroup's members under the given aggregation. Throws
/// ValidationError when the group is empty or a member lacks a hypothesis.
double group_wer(const Corpus& corpus, const ModelHypotheses& model, const GroupKey& key,
                 const NormalizationConfig& config, Aggregation aggregation);

/// Per-utterance alignments in corpus order, computed in parallel with
/// OpenMP. Output is identical to align_corpus_serial for any thread count.
std::vector<Alignment> align_corpus(const Corpus& corpus, const ModelHypotheses& model,
                                    const NormalizationConfig& config, bool keep_script = false);
/// Single-threaded reference implementation of align_corpus.
std::vector<Alignment> align_corpus_serial(const Corpus& corpus, const ModelHypotheses& model,
                                           const NormalizationConfig& config, bool keep_script = false);

const char* to_string(Aggregation a) noexcept;
Aggregation parse_aggregation(std::string_view text);

}  // namespace fairlens
