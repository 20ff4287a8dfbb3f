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


#include "fairlens/wer.hpp"

#include <algorithm>

#include "fairlens/error.hpp"

namespace fairlens {

Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp, bool keep_script) {
  if (ref.empty()) throw ValidationError("cannot align against an empty reference");
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * width + j]; };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0U : 1U);
      at(i, j) = std::min({diag, at(i - 1, j) + 1U, at(i, j - 1) + 1U});
    }
  }

  Alignment a;
  a.reference_length = n;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && here == at(i - 1, j - 1)) {
      if (keep_script) a.script.push_back({EditKind::match, ref[i - 1], hyp[j - 1]});
      --i;
      --j;
    } else if (i > 0 && j > 0 && here == at(i - 1, j - 1) + 1) {
      ++a.substitutions;
      if (keep_script) a.script.push_back({EditKind::substitution, ref[i - 1], hyp[j - 1]});
      --i;
      --j;
    } else if (i > 0 && here == at(i - 1, j) + 1) {
      ++a.deletions;
      if (keep_script) a.script.push_back({EditKind::deletion, ref[i - 1], {}});
      --i;
    } else {
      ++a.insertions;
      if (keep_script) a.script.push_back({EditKind::insertion, {}, hyp[j - 1]});
      --j;
    }
  }
  std::reverse(a.script.begin(), a.script.end());
  return a;
}

nlohmann::json Alignment::to_json() const {
  static constexpr const char* kNames[] = {"match", "substitution", "deletion", "insertion"};
  auto ops = nlohmann::json::array();
  for (const auto& op : script) {
    nlohmann::json o{{"op", kNames[static_cast<int>(op.kind)]}};
    if (op.kind != EditKind::insertion) o["ref"] = op.ref;
    if (op.kind != EditKind::deletion) o["hyp"] = op.hyp;
    ops.push_back(std::move(o));
  }
  return {{"substitutions", substitutions},
          {"deletions", deletions},
          {"insertions", insertions},
          {"reference_length", reference_length},
          {"script", ops}};
}

ErrorRate utterance_wer(const Alignment& a) {
  if (a.reference_length == 0) throw ValidationError("WER undefined for an empty reference");
  return {a.errors(), a.reference_length};
}

ErrorRate pooled_wer(std::span<const Alignment> alignments) {
  if (alignments.empty()) throw ValidationError("pooled WER needs at least one alignment");
  ErrorRate r;
  for (const auto& a : alignments) {
    r.errors += a.errors();
    r.words += a.reference_length;
  }
  if (r.words == 0) throw ValidationError("pooled WER undefined: no reference words");
  return r;
}

ErrorRate pooled_wer(std::span<const Alignment> alignments, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ValidationError("pooled WER needs at least one alignment");
  ErrorRate r;
  for (auto i : indices) {
    r.errors += alignments[i].errors();
    r.words += alignments[i].reference_length;
  }
  if (r.words == 0) throw ValidationError("pooled WER undefined: no reference words");
  return r;
}

double macro_wer(std::span<const Alignment> alignments, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ValidationError("macro WER needs at least one alignment");
  double sum = 0.0;
  for (auto i : indices) sum += utterance_wer(alignments[i]).value();
  return sum / static_cast<double>(indices.size());
}

double group_wer(const Corpus& corpus, const ModelHypotheses& model, const GroupKey& key,
                 const NormalizationConfig& config, Aggregation aggregation) {
  const auto idx = corpus.member_indices(key);
  if (idx.empty()) throw ValidationError("subgroup '" + key.to_string() + "' has no members");
  const Normalizer normalizer(config);
  std::vector<Alignment> alignments;
  alignments.reserve(idx.size());
  for (auto i : idx) {
    const auto& u = corpus.utterances()[i];
    const auto ref = normalizer.tokens(u.reference);
    const auto hyp = normalizer.tokens(model.at(u.id));
    alignments.push_back(align(ref, hyp, false));
  }
  if (aggregation == Aggregation::pooled) return pooled_wer(alignments).value();
  std::vector<std::size_t> all(alignments.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return macro_wer(alignments, all);
}

namespace {

void require_hypotheses(const Corpus& corpus, const ModelHypotheses& model) {
  for (const auto& u : corpus.utterances()) (void)model.at(u.id);
}

}  // namespace

std::vector<Alignment> align_corpus_serial(const Corpus& corpus, const ModelHypotheses& model,
                                           const NormalizationConfig& config, bool keep_script) {
  require_hypotheses(corpus, model);
  const Normalizer normalizer(config);
  const auto utts = corpus.utterances();
  std::vector<Alignment> out(utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    out[i] = align(normalizer.tokens(utts[i].reference), normalizer.tokens(model.at(utts[i].id)), keep_script);
  }
  return out;
}

std::vector<Alignment> align_corpus(const Corpus& corpus, const ModelHypotheses& model,
                                    const NormalizationConfig& config, bool keep_script) {
  // Every input is checked up front: nothing below may throw inside the
  // parallel region (empty references are rejected at load time).
  require_hypotheses(corpus, model);
  const Normalizer normalizer(config);
  const auto utts = corpus.utterances();
  const auto n = static_cast<std::int64_t>(utts.size());
  std::vector<Alignment> out(utts.size());
  std::vector<std::vector<std::string>> refs(utts.size());
  for (std::int64_t i = 0; i < n; ++i) {
    refs[i] = normalizer.tokens(utts[i].reference);
    if (refs[i].empty()) throw ValidationError("reference of '" + utts[i].id + "' is empty after normalization");
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = align(refs[i], normalizer.tokens(model.hypotheses.find(utts[i].id)->second), keep_script);
  }
  return out;
}

const char* to_string(Aggregation a) noexcept { return a == Aggregation::pooled ? "pooled" : "macro"; }

Aggregation parse_aggregation(std::string_view text) {
  if (text == "pooled") return Aggregation::pooled;
  if (text == "macro" || text == "macro_utterance") return Aggregation::macro_utterance;
  throw ValidationError("aggregation must be 'pooled' or 'macro', got '" + std::string(text) + "'");
}

}  // namespace fairlens
