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


#include <cstdio>
#include <sstream>

#include "fairlens/corpus.hpp"
#include "fairlens/error.hpp"

namespace fairlens {
namespace {

std::vector<GroupCount> count_all(const Corpus& corpus, const std::vector<GroupKey>& keys) {
  std::vector<GroupCount> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back({k, corpus.member_indices(k).size()});
  return out;
}

double covered_fraction(const std::vector<GroupCount>& counts, std::size_t min_count) {
  if (counts.empty()) return 0.0;
  std::size_t covered = 0;
  for (const auto& c : counts) covered += c.count >= min_count ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(counts.size());
}

nlohmann::json counts_json(const std::vector<GroupCount>& counts) {
  auto arr = nlohmann::json::array();
  for (const auto& c : counts) arr.push_back({{"group", c.key.to_string()}, {"count", c.count}});
  return arr;
}

nlohmann::json named_values(const std::vector<std::pair<std::string, double>>& values) {
  auto arr = nlohmann::json::array();
  for (const auto& [name, v] : values) arr.push_back({{"name", name}, {"value", v}});
  return arr;
}

}  // namespace

AuditReport audit(const Corpus& corpus, std::size_t min_count) {
  if (min_count == 0) throw ValidationError("min_count must be positive");
  AuditReport r;
  r.utterances = corpus.size();
  r.min_count = min_count;
  r.groups = count_all(corpus, enumerate_subgroups(corpus, 1));
  r.subgroups = count_all(corpus, enumerate_subgroups(corpus, 2));
  r.coverage_depth1 = covered_fraction(r.groups, min_count);
  r.coverage_depth2 = covered_fraction(r.subgroups, min_count);

  const auto& grouping = corpus.grouping();
  for (std::size_t a = 0; a < grouping.size(); ++a) {
    std::vector<GroupCount> cells;
    for (const auto& g : r.groups) {
      if (g.key.components()[0].attribute == grouping[a].name) cells.push_back(g);
    }
    r.coverage_per_attribute.emplace_back(grouping[a].name, covered_fraction(cells, min_count));
    std::vector<std::size_t> counts;
    for (const auto& c : cells) counts.push_back(c.count);
    r.kl_per_attribute.emplace_back(grouping[a].name, kl_divergence_to_uniform(counts));
  }
  for (std::size_t i = 0; i < grouping.size(); ++i) {
    for (std::size_t j = i + 1; j < grouping.size(); ++j) {
      std::vector<std::size_t> counts;
      for (const auto& c : r.subgroups) {
        const auto& comp = c.key.components();
        if (comp[0].attribute == grouping[i].name && comp[1].attribute == grouping[j].name) counts.push_back(c.count);
      }
      r.kl_per_attribute_pair.emplace_back(grouping[i].name + "|" + grouping[j].name, kl_divergence_to_uniform(counts));
    }
  }
  return r;
}

nlohmann::json AuditReport::to_json() const {
  return {{"utterances", utterances},
          {"min_count", min_count},
          {"kl_log_base", "e"},
          {"coverage", {{"depth1", coverage_depth1}, {"depth2", coverage_depth2}}},
          {"coverage_per_attribute", named_values(coverage_per_attribute)},
          {"kl_per_attribute", named_values(kl_per_attribute)},
          {"kl_per_attribute_pair", named_values(kl_per_attribute_pair)},
          {"groups", counts_json(groups)},
          {"subgroups", counts_json(subgroups)}};
}

std::string AuditReport::to_table() const {
  std::ostringstream os;
  char buf[256];
  os << "utterances: " << utterances << "  min_count: " << min_count << "\n";
  std::snprintf(buf, sizeof buf, "coverage depth1: %.4f  depth2: %.4f\n", coverage_depth1, coverage_depth2);
  os << buf;
  os << "\n" << "attribute" << std::string(31, ' ') << "coverage    KL (nats)\n";
  for (std::size_t i = 0; i < kl_per_attribute.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-40s %8.4f  %11.6f\n", kl_per_attribute[i].first.c_str(),
                  coverage_per_attribute[i].second, kl_per_attribute[i].second);
    os << buf;
  }
  os << "\nattribute pair" << std::string(26, ' ') << "KL (nats)\n";
  for (const auto& [name, kl] : kl_per_attribute_pair) {
    std::snprintf(buf, sizeof buf, "%-40s %11.6f\n", name.c_str(), kl);
    os << buf;
  }
  os << "\ngroup" << std::string(55, ' ') << "count\n";
  for (const auto& g : groups) {
    std::snprintf(buf, sizeof buf, "%-60s %5zu\n", g.key.to_string().c_str(), g.count);
    os << buf;
  }
  os << "\nsubgroup" << std::string(52, ' ') << "count\n";
  for (const auto& g : subgroups) {
    std::snprintf(buf, sizeof buf, "%-60s %5zu\n", g.key.to_string().c_str(), g.count);
    os << buf;
  }
  return os.str();
}

}  // namespace fairlens
