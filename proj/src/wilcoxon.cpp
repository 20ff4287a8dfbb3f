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


#include "fairlens/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairlens/error.hpp"

namespace fairlens {
namespace {

constexpr std::size_t kExactAutoLimit = 25;

double upper_normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct Ranking {
  std::vector<std::int64_t> doubled;  // 2 * average rank, per input position
  std::vector<std::size_t> nonzero_ties;
};

// Average ranks of `values` (all >= 0), doubled so they stay integral.
Ranking rank_abs(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  Ranking r;
  r.doubled.assign(n, 0);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 share ranks start+1..end
    const auto twice_avg = static_cast<std::int64_t>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) r.doubled[order[k]] = twice_avg;
    if (end - start > 1 && values[order[start]] != 0.0) r.nonzero_ties.push_back(end - start);
    start = end;
  }
  return r;
}

double tail_sum(const std::vector<double>& dist, std::int64_t from, std::int64_t to) {
  double p = 0.0;
  from = std::max<std::int64_t>(from, 0);
  to = std::min<std::int64_t>(to, static_cast<std::int64_t>(dist.size()) - 1);
  for (std::int64_t s = from; s <= to; ++s) p += dist[static_cast<std::size_t>(s)];
  return p;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

std::vector<double> signed_rank_null_distribution(std::span<const std::int64_t> doubled_ranks) {
  std::int64_t total = 0;
  for (auto r : doubled_ranks) {
    if (r <= 0) throw ValidationError("signed-rank null distribution needs positive ranks");
    total += r;
  }
  std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  std::int64_t reach = 0;
  for (auto r : doubled_ranks) {
    reach += r;
    for (std::int64_t s = reach; s >= 0; --s) {
      const double with = s >= r ? dist[static_cast<std::size_t>(s - r)] : 0.0;
      dist[static_cast<std::size_t>(s)] = 0.5 * (dist[static_cast<std::size_t>(s)] + with);
    }
  }
  return dist;
}

double exact_tail_probability(std::int64_t t, std::size_t m, Tail tail) {
  if (m == 0) throw ValidationError("exact tail probability needs m >= 1");
  const auto max_sum = static_cast<std::int64_t>(m * (m + 1) / 2);
  if (t < 0 || t > max_sum) {
    throw ValidationError("rank sum " + std::to_string(t) + " outside [0, " + std::to_string(max_sum) + "]");
  }
  std::vector<std::int64_t> doubled(m);
  for (std::size_t i = 0; i < m; ++i) doubled[i] = 2 * static_cast<std::int64_t>(i + 1);
  const auto dist = signed_rank_null_distribution(doubled);
  const auto s = 2 * t;
  return tail == Tail::lower ? tail_sum(dist, 0, s) : tail_sum(dist, s, 2 * max_sum);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, Alternative alternative,
                                    ZeroHandling zero_handling, WilcoxonMode mode) {
  if (x.size() != y.size()) {
    throw ValidationError("paired samples differ in length (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  if (x.empty()) throw ValidationError("signed-rank test needs at least one pair");

  WilcoxonResult res;
  res.sample_size = x.size();
  res.alternative = alternative;
  res.zero_handling = zero_handling;

  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    diff[i] = x[i] - y[i];
    if (!std::isfinite(diff[i])) throw ValidationError("signed-rank test needs finite inputs");
    if (diff[i] == 0.0) ++res.zeros;
  }
  if (res.zeros == res.sample_size) {
    throw DegenerateSampleError("all " + std::to_string(res.sample_size) + " paired differences are zero");
  }

  // Values entering the ranking: everything under Pratt, nonzero only under discard.
  std::vector<double> ranked_abs;
  std::vector<double> ranked_sign;
  for (double d : diff) {
    if (zero_handling == ZeroHandling::discard && d == 0.0) continue;
    ranked_abs.push_back(std::fabs(d));
    ranked_sign.push_back(d);
  }
  const Ranking ranking = rank_abs(ranked_abs);
  res.tie_groups = ranking.nonzero_ties;

  std::int64_t twice_plus = 0;
  std::int64_t twice_minus = 0;
  std::vector<std::int64_t> nonzero_ranks;
  for (std::size_t i = 0; i < ranked_sign.size(); ++i) {
    if (ranked_sign[i] > 0) twice_plus += ranking.doubled[i];
    if (ranked_sign[i] < 0) twice_minus += ranking.doubled[i];
    if (ranked_sign[i] != 0) nonzero_ranks.push_back(ranking.doubled[i]);
  }
  res.t_plus = static_cast<double>(twice_plus) / 2.0;
  res.t_minus = static_cast<double>(twice_minus) / 2.0;

  const double big_m = static_cast<double>(zero_handling == ZeroHandling::pratt ? res.sample_size : res.nonzero());
  const double o = zero_handling == ZeroHandling::pratt ? static_cast<double>(res.zeros) : 0.0;
  double tie_term = 0.0;
  for (auto t : res.tie_groups) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  res.expected = big_m * (big_m + 1) / 4.0 - o * (o + 1) / 4.0;
  res.variance = big_m * (big_m + 1) * (2 * big_m + 1) / 24.0 - o * (o + 1) * (2 * o + 1) / 24.0 - tie_term / 48.0;

  bool exact = false;
  switch (mode) {
    case WilcoxonMode::exact: exact = true; break;
    case WilcoxonMode::normal_approx: exact = false; break;
    case WilcoxonMode::automatic: exact = res.nonzero() <= kExactAutoLimit && res.tie_groups.empty(); break;
  }

  if (exact) {
    res.method = WilcoxonMethod::exact;
    const auto dist = signed_rank_null_distribution(nonzero_ranks);
    const auto top = static_cast<std::int64_t>(dist.size()) - 1;
    const double lower = tail_sum(dist, 0, twice_plus);
    const double upper = tail_sum(dist, twice_plus, top);
    switch (alternative) {
      case Alternative::two_sided: res.p_value = clamp01(2.0 * std::min(lower, upper)); break;
      case Alternative::greater: res.p_value = clamp01(upper); break;
      case Alternative::less: res.p_value = clamp01(lower); break;
    }
  } else {
    res.method = WilcoxonMethod::normal_approx;
    const double z = (res.t_plus - res.expected) / std::sqrt(res.variance);
    res.z = z;
    switch (alternative) {
      case Alternative::two_sided: res.p_value = clamp01(std::erfc(std::fabs(z) / std::sqrt(2.0))); break;
      case Alternative::greater: res.p_value = clamp01(upper_normal_tail(z)); break;
      case Alternative::less: res.p_value = clamp01(upper_normal_tail(-z)); break;
    }
  }
  return res;
}

nlohmann::json WilcoxonResult::to_json() const {
  nlohmann::json j{{"M", sample_size},
                   {"zeros", zeros},
                   {"tie_groups", tie_groups},
                   {"T_plus", t_plus},
                   {"T_minus", t_minus},
                   {"expected", expected},
                   {"variance", variance},
                   {"p_value", p_value},
                   {"method", to_string(method)},
                   {"alternative", to_string(alternative)},
                   {"zero_handling", to_string(zero_handling)}};
  j["z"] = z ? nlohmann::json(*z) : nlohmann::json(nullptr);
  return j;
}

const char* to_string(Alternative a) noexcept {
  switch (a) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "?";
}

const char* to_string(ZeroHandling z) noexcept { return z == ZeroHandling::pratt ? "pratt" : "discard"; }

const char* to_string(WilcoxonMode m) noexcept {
  switch (m) {
    case WilcoxonMode::automatic: return "auto";
    case WilcoxonMode::exact: return "exact";
    case WilcoxonMode::normal_approx: return "normal";
  }
  return "?";
}

const char* to_string(WilcoxonMethod m) noexcept { return m == WilcoxonMethod::exact ? "exact" : "normal_approx"; }

Alternative parse_alternative(std::string_view text) {
  if (text == "two_sided" || text == "two-sided") return Alternative::two_sided;
  if (text == "greater") return Alternative::greater;
  if (text == "less") return Alternative::less;
  throw ValidationError("alternative must be two_sided, greater or less, got '" + std::string(text) + "'");
}

ZeroHandling parse_zero_handling(std::string_view text) {
  if (text == "pratt") return ZeroHandling::pratt;
  if (text == "discard") return ZeroHandling::discard;
  throw ValidationError("zero handling must be pratt or discard, got '" + std::string(text) + "'");
}

WilcoxonMode parse_wilcoxon_mode(std::string_view text) {
  if (text == "auto") return WilcoxonMode::automatic;
  if (text == "exact") return WilcoxonMode::exact;
  if (text == "normal" || text == "normal_approx") return WilcoxonMode::normal_approx;
  throw ValidationError("wilcoxon mode must be auto, exact or normal, got '" + std::string(text) + "'");
}

}  // namespace fairlens
