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

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fairlens/normalize.hpp"

namespace fairlens {

enum class SchemaMode { solo, dialogue };

struct Attribute {
  std::string name;
  std::vector<std::string> labels;
};

/// Demographic taxonomy: ordered attributes, each with an ordered label set.
/// Attribute and label order define every deterministic ordering downstream.
class AttributeSchema {
 public:
  /// Throws ValidationError on duplicate names/labels, or fewer than two labels.
  explicit AttributeSchema(std::vector<Attribute> attributes, SchemaMode mode = SchemaMode::solo,
                           std::string other_label = "Other", std::size_t other_min_count = 10);

  static AttributeSchema from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
  SchemaMode mode() const noexcept { return mode_; }
  const std::string& other_label() const noexcept { return other_label_; }
  std::size_t other_min_count() const noexcept { return other_min_count_; }

  std::optional<std::size_t> attribute_index(std::string_view name) const;
  std::optional<std::size_t> label_index(std::size_t attribute, std::string_view label) const;

  /// Label sets used for grouping. Solo: the schema labels. Dialogue: every
  /// canonical pair label followed by the catch-all label.
  std::vector<Attribute> grouping_labels() const;

 private:
  std::vector<Attribute> attributes_;
  SchemaMode mode_;
  std::string other_label_;
  std::size_t other_min_count_;
};

struct GroupComponent {
  std::string attribute;
  std::string label;
  auto operator<=>(const GroupComponent&) const = default;
};

/// A (possibly intersectional) subgroup: one label for each of `depth`
/// distinct attributes, listed in schema attribute order.
class GroupKey {
 public:
  GroupKey() = default;
  explicit GroupKey(std::vector<GroupComponent> components);

  const std::vector<GroupComponent>& components() const noexcept { return components_; }
  std::size_t depth() const noexcept { return components_.size(); }

  /// Canonical text form, e.g. "Sex=Female|Race=Asian".
  std::string to_string() const;
  /// Inverse of to_string; components are reordered to schema order and checked.
  static GroupKey parse(std::string_view text, std::span<const Attribute> grouping);

  bool operator==(const GroupKey&) const = default;

 private:
  std::vector<GroupComponent> components_;
};

struct Utterance {
  std::string id;
  std::string reference;
  /// Group label per schema attribute (schema order). In dialogue mode this
  /// is the canonical pair label or the catch-all label.
  std::vector<std::string> labels;
  /// Dialogue mode only: the two speakers' raw labels per attribute.
  std::vector<std::pair<std::string, std::string>> speaker_labels;
  std::map<std::string, std::string> metadata;
};

/// Immutable after construction; safe for concurrent reads.
class Corpus {
 public:
  /// Solo-mode constructor: grouping labels are the schema labels.
  Corpus(AttributeSchema schema, std::vector<Utterance> utterances);
  /// Explicit grouping labels (dialogue mode after pair bucketing).
  Corpus(AttributeSchema schema, std::vector<Attribute> grouping, std::vector<Utterance> utterances);

  const AttributeSchema& schema() const noexcept { return schema_; }
  const std::vector<Attribute>& grouping() const noexcept { return grouping_; }
  std::span<const Utterance> utterances() const noexcept { return utterances_; }
  std::size_t size() const noexcept { return utterances_.size(); }
  bool empty() const noexcept { return utterances_.empty(); }
  std::optional<std::size_t> find(std::string_view id) const;

  /// Indices of the utterances matching every component of the key, in corpus order.
  std::vector<std::size_t> member_indices(const GroupKey& key) const;

 private:
  void validate();

  AttributeSchema schema_;
  std::vector<Attribute> grouping_;
  std::vector<Utterance> utterances_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

struct ModelHypotheses {
  std::string model_id;
  std::map<std::string, std::string, std::less<>> hypotheses;

  /// Throws ValidationError naming the utterance when absent.
  const std::string& at(std::string_view utterance_id) const;
};

/// Raw counts of canonical pair labels, keyed by pair label.
using PairCounts = std::map<std::string, std::size_t, std::less<>>;

/// Unordered pair rendered "X-Y" with X before Y in schema label order.
std::string canonical_pair_label(const AttributeSchema& schema, std::size_t attribute,
                                 std::string_view label_a, std::string_view label_b);

/// Canonical pair label, collapsed to the catch-all label when `counts` is
/// given and the pair occurs fewer than other_min_count times.
std::string derive_pair_label(std::string_view label_a, std::string_view label_b,
                              std::string_view attribute, const AttributeSchema& schema,
                              const PairCounts* counts);

/// Age bucket for a numeric age: Teen below 18, Senior from 55, Adult otherwise.
std::string age_bucket(double years);

/// Reads one JSON schema document.
AttributeSchema load_schema(std::istream& in);

/// Reads a JSONL manifest. References must keep at least one token under
/// `normalization`.
Corpus load_manifest(std::istream& in, const AttributeSchema& schema,
                     const NormalizationConfig& normalization = {});

/// Reads a JSONL hypotheses file ({"id", "hypothesis"} per line).
ModelHypotheses load_hypotheses(std::istream& in, std::string model_id, const Corpus& corpus);

/// All subgroups at depth 1 or 2 in attribute order, then label order.
std::vector<GroupKey> enumerate_subgroups(std::span<const Attribute> grouping, int depth,
                                          bool include_other, std::string_view other_label);
std::vector<GroupKey> enumerate_subgroups(const AttributeSchema& schema, int depth,
                                          bool include_other = false);
std::vector<GroupKey> enumerate_subgroups(const Corpus& corpus, int depth,
                                          bool include_other = false);

/// Utterance ids of the subgroup, in corpus order.
std::vector<std::string> members(const Corpus& corpus, const GroupKey& key);

double intersectional_coverage(const Corpus& corpus, int depth, std::size_t min_count,
                               bool include_other = false);

/// KL(P || U) in nats, U uniform over the cells. 0 ln 0 is taken as 0.
double kl_divergence_to_uniform(std::span<const std::size_t> counts);
double kl_divergence_to_uniform(const Corpus& corpus, std::span<const GroupKey> partition);

struct GroupCount {
  GroupKey key;
  std::size_t count = 0;
};

struct AuditReport {
  std::size_t utterances = 0;
  std::size_t min_count = 1;
  std::vector<GroupCount> groups;     // depth 1
  std::vector<GroupCount> subgroups;  // depth 2
  double coverage_depth1 = 0.0;
  double coverage_depth2 = 0.0;
  std::vector<std::pair<std::string, double>> coverage_per_attribute;
  std::vector<std::pair<std::string, double>> kl_per_attribute;
  std::vector<std::pair<std::string, double>> kl_per_attribute_pair;

  nlohmann::json to_json() const;
  /// Fixed-width table for terminals.
  std::string to_table() const;
};

AuditReport audit(const Corpus& corpus, std::size_t min_count);

}  // namespace fairlens
