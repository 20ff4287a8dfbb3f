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


#include "fairlens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fairlens/error.hpp"

namespace fairlens {

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes, SchemaMode mode, std::string other_label,
                                 std::size_t other_min_count)
    : attributes_(std::move(attributes)),
      mode_(mode),
      other_label_(std::move(other_label)),
      other_min_count_(other_min_count) {
  if (attributes_.empty()) throw ValidationError("schema has no attributes");
  if (other_label_.empty()) throw ValidationError("schema other_label is empty");
  std::set<std::string, std::less<>> names;
  for (const auto& attr : attributes_) {
    if (attr.name.empty()) throw ValidationError("schema attribute with empty name");
    if (attr.name.find_first_of("=|") != std::string::npos) {
      throw ValidationError("attribute name '" + attr.name + "' may not contain '=' or '|'");
    }
    if (!names.insert(attr.name).second) throw ValidationError("duplicate attribute '" + attr.name + "'");
    if (attr.labels.size() < 2) throw ValidationError("attribute '" + attr.name + "' needs at least two labels");
    std::set<std::string, std::less<>> labels;
    for (const auto& label : attr.labels) {
      if (label.empty() || label.find('|') != std::string::npos) {
        throw ValidationError("attribute '" + attr.name + "' has an empty label or a label containing '|'");
      }
      if (!labels.insert(label).second) {
        throw ValidationError("duplicate label '" + label + "' in attribute '" + attr.name + "'");
      }
      if (label == other_label_) {
        throw ValidationError("label '" + label + "' in attribute '" + attr.name + "' collides with other_label");
      }
    }
  }
}

std::optional<std::size_t> AttributeSchema::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> AttributeSchema::label_index(std::size_t attribute, std::string_view label) const {
  const auto& labels = attributes_.at(attribute).labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

std::vector<Attribute> AttributeSchema::grouping_labels() const {
  if (mode_ == SchemaMode::solo) return attributes_;
  std::vector<Attribute> out;
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    Attribute g{attributes_[a].name, {}};
    const auto& labels = attributes_[a].labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i; j < labels.size(); ++j) g.labels.push_back(labels[i] + "-" + labels[j]);
    }
    g.labels.push_back(other_label_);
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------

GroupKey::GroupKey(std::vector<GroupComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("group key needs at least one component");
  std::set<std::string, std::less<>> seen;
  for (const auto& c : components_) {
    if (!seen.insert(c.attribute).second) {
      throw ValidationError("attribute '" + c.attribute + "' repeated in group key");
    }
  }
}

std::string GroupKey::to_string() const {
  std::string s;
  for (const auto& c : components_) {
    if (!s.empty()) s += '|';
    s += c.attribute;
    s += '=';
    s += c.label;
  }
  return s;
}

GroupKey GroupKey::parse(std::string_view text, std::span<const Attribute> grouping) {
  std::vector<std::pair<std::size_t, GroupComponent>> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('|', start), text.size());
    const auto part = text.substr(start, end - start);
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw ValidationError("malformed group key '" + std::string(text) + "'");
    GroupComponent c{std::string(part.substr(0, eq)), std::string(part.substr(eq + 1))};
    auto attr = std::find_if(grouping.begin(), grouping.end(), [&](const Attribute& a) { return a.name == c.attribute; });
    if (attr == grouping.end()) throw ValidationError("unknown attribute '" + c.attribute + "' in group key");
    if (std::find(attr->labels.begin(), attr->labels.end(), c.label) == attr->labels.end()) {
      throw ValidationError("unknown label '" + c.label + "' for attribute '" + c.attribute + "' in group key");
    }
    parts.emplace_back(static_cast<std::size_t>(attr - grouping.begin()), std::move(c));
    start = end + 1;
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<GroupComponent> components;
  for (auto& p : parts) components.push_back(std::move(p.second));
  return GroupKey(std::move(components));
}

// ---------------------------------------------------------------------------

Corpus::Corpus(AttributeSchema schema, std::vector<Utterance> utterances)
    : schema_(std::move(schema)), utterances_(std::move(utterances)) {
  grouping_ = schema_.grouping_labels();
  validate();
}

Corpus::Corpus(AttributeSchema schema, std::vector<Attribute> grouping, std::vector<Utterance> utterances)
    : schema_(std::move(schema)), grouping_(std::move(grouping)), utterances_(std::move(utterances)) {
  validate();
}

void Corpus::validate() {
  if (grouping_.size() != schema_.attributes().size()) {
    throw ValidationError("grouping labels do not match the schema attributes");
  }
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    if (!by_id_.emplace(u.id, i).second) throw ValidationError("duplicate utterance id '" + u.id + "'");
    if (u.labels.size() != grouping_.size()) {
      throw ValidationError("utterance '" + u.id + "' does not label every attribute");
    }
    for (std::size_t a = 0; a < grouping_.size(); ++a) {
      const auto& labels = grouping_[a].labels;
      if (std::find(labels.begin(), labels.end(), u.labels[a]) == labels.end()) {
        throw ValidationError("utterance '" + u.id + "' has unknown label '" + u.labels[a] + "' for attribute '" +
                              grouping_[a].name + "'");
      }
    }
  }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Corpus::member_indices(const GroupKey& key) const {
  std::vector<std::pair<std::size_t, const std::string*>> wanted;
  for (const auto& c : key.components()) {
    auto a = schema_.attribute_index(c.attribute);
    if (!a) throw ValidationError("unknown attribute '" + c.attribute + "' in group key");
    wanted.emplace_back(*a, &c.label);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& labels = utterances_[i].labels;
    bool match = std::all_of(wanted.begin(), wanted.end(), [&](const auto& w) { return labels[w.first] == *w.second; });
    if (match) out.push_back(i);
  }
  return out;
}

const std::string& ModelHypotheses::at(std::string_view utterance_id) const {
  auto it = hypotheses.find(utterance_id);
  if (it == hypotheses.end()) {
    throw ValidationError("model '" + model_id + "' has no hypothesis for utterance '" + std::string(utterance_id) + "'");
  }
  return it->second;
}

// ---------------------------------------------------------------------------

std::string canonical_pair_label(const AttributeSchema& schema, std::size_t attribute, std::string_view label_a,
                                 std::string_view label_b) {
  const auto& name = schema.attributes().at(attribute).name;
  auto ia = schema.label_index(attribute, label_a);
  auto ib = schema.label_index(attribute, label_b);
  if (!ia) throw ValidationError("unknown label '" + std::string(label_a) + "' for attribute '" + name + "'");
  if (!ib) throw ValidationError("unknown label '" + std::string(label_b) + "' for attribute '" + name + "'");
  const auto& labels = schema.attributes()[attribute].labels;
  const auto lo = std::min(*ia, *ib);
  const auto hi = std::max(*ia, *ib);
  return labels[lo] + "-" + labels[hi];
}

std::string derive_pair_label(std::string_view label_a, std::string_view label_b, std::string_view attribute,
                              const AttributeSchema& schema, const PairCounts* counts) {
  auto a = schema.attribute_index(attribute);
  if (!a) throw ValidationError("unknown attribute '" + std::string(attribute) + "'");
  std::string pair = canonical_pair_label(schema, *a, label_a, label_b);
  if (counts != nullptr) {
    auto it = counts->find(pair);
    const std::size_t n = it == counts->end() ? 0 : it->second;
    if (n < schema.other_min_count()) return schema.other_label();
  }
  return pair;
}

std::string age_bucket(double years) {
  if (!std::isfinite(years) || years < 0) throw ValidationError("age must be a nonnegative number");
  if (years < 18) return "Teen";
  if (years < 55) return "Adult";
  return "Senior";
}

// ---------------------------------------------------------------------------

std::vector<GroupKey> enumerate_subgroups(std::span<const Attribute> grouping, int depth, bool include_other,
                                          std::string_view other_label) {
  if (depth != 1 && depth != 2) throw ValidationError("subgroup depth must be 1 or 2");
  auto labels_of = [&](const Attribute& a) {
    std::vector<std::string> out;
    for (const auto& l : a.labels) {
      if (include_other || l != other_label) out.push_back(l);
    }
    return out;
  };
  std::vector<GroupKey> keys;
  if (depth == 1) {
    for (const auto& a : grouping) {
      for (const auto& l : labels_of(a)) keys.emplace_back(std::vector<GroupComponent>{{a.name, l}});
    }
    return keys;
  }
  for (std::size_t i = 0; i < grouping.size(); ++i) {
    const auto li = labels_of(grouping[i]);
    for (std::size_t j = i + 1; j < grouping.size(); ++j) {
      const auto lj = labels_of(grouping[j]);
      for (const auto& x : li) {
        for (const auto& y : lj) {
          keys.emplace_back(std::vector<GroupComponent>{{grouping[i].name, x}, {grouping[j].name, y}});
        }
      }
    }
  }
  return keys;
}

std::vector<GroupKey> enumerate_subgroups(const AttributeSchema& schema, int depth, bool include_other) {
  const auto grouping = schema.grouping_labels();
  return enumerate_subgroups(grouping, depth, include_other, schema.other_label());
}

std::vector<GroupKey> enumerate_subgroups(const Corpus& corpus, int depth, bool include_other) {
  return enumerate_subgroups(corpus.grouping(), depth, include_other, corpus.schema().other_label());
}

std::vector<std::string> members(const Corpus& corpus, const GroupKey& key) {
  std::vector<std::string> ids;
  for (auto i : corpus.member_indices(key)) ids.push_back(corpus.utterances()[i].id);
  return ids;
}

double intersectional_coverage(const Corpus& corpus, int depth, std::size_t min_count, bool include_other) {
  if (min_count == 0) throw ValidationError("min_count must be positive");
  const auto keys = enumerate_subgroups(corpus, depth, include_other);
  if (keys.empty()) return 0.0;
  std::size_t covered = 0;
  for (const auto& k : keys) {
    if (corpus.member_indices(k).size() >= min_count) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(keys.size());
}

double kl_divergence_to_uniform(std::span<const std::size_t> counts) {
  if (counts.empty()) throw ValidationError("KL divergence needs a non-empty partition");
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total == 0.0) throw ValidationError("KL divergence undefined: partition has no members");
  const double k = static_cast<double>(counts.size());
  double kl = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    kl += p * std::log(static_cast<double>(c) * k / total);
  }
  return std::max(kl, 0.0);
}

double kl_divergence_to_uniform(const Corpus& corpus, std::span<const GroupKey> partition) {
  std::vector<std::size_t> counts;
  counts.reserve(partition.size());
  for (const auto& k : partition) counts.push_back(corpus.member_indices(k).size());
  return kl_divergence_to_uniform(counts);
}

}  // namespace fairlens
