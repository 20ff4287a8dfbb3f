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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fairlens {

enum class Alternative { two_sided, greater, less };
/// pratt: zero differences take part in ranking but add to neither rank sum.
/// discard: zero differences are dropped before ranking.
enum class ZeroHandling { pratt, discard };
enum class WilcoxonMode { automatic, exact, normal_approx };
enum class WilcoxonMethod { exact, normal_approx };
enum class Tail { lower, upper };

struct WilcoxonResult {
  std::size_t sample_size = 0;   // M, pairs before zero handling
  std::size_t zeros = 0;         // o
  std::vector<std::size_t> tie_groups;  // sizes t_j of tied groups among nonzero |Z|
  double t_plus = 0.0;
  double t_minus = 0.0;
  /// Null mean and variance of T+ with the zero and tie corrections.
  double expected = 0.0;
  double variance = 0.0;
  std::optional<double> z;  // normal approximation only
  double p_value = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
  Alternative alternative = Alternative::two_sided;
  ZeroHandling zero_handling = ZeroHandling::pratt;

  /// Nonzero differences, m = M - o.
  std::size_t nonzero() const noexcept { return sample_size - zeros; }
  nlohmann::json to_json() const;
};

/// Signed-rank test on the paired differences x - y.
///
/// Ranks are averaged over ties of |x - y|. In exact mode the p-value comes
/// from the permutation distribution of T+ over the observed ranks (a
/// subset-sum count, so ties and Pratt zeros are handled exactly); in
/// normal mode from z = (T+ - E) / sqrt(Var) with
///   E   = M(M+1)/4 - o(o+1)/4
///   Var = M(M+1)(2M+1)/24 - o(o+1)(2o+1)/24 - sum(t^3 - t)/48
/// and no continuity correction. Under discard handling M is replaced by
/// M - o and o by 0. Automatic mode picks exact when m <= 25 and no
/// nonzero |Z| are tied.
///
/// Throws ValidationError for unequal or empty inputs and
/// DegenerateSampleError when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    Alternative alternative = Alternative::two_sided,
                                    ZeroHandling zero_handling = ZeroHandling::pratt,
                                    WilcoxonMode mode = WilcoxonMode::automatic);

/// P(T+ <= t) or P(T+ >= t) for m untied nonzero differences with ranks 1..m.
double exact_tail_probability(std::int64_t t, std::size_t m, Tail tail);

/// Null distribution of T+ when each rank enters with probability 1/2.
/// Ranks are given doubled so half-integer average ranks stay integral;
/// entry s is P(2 T+ = s).
std::vector<double> signed_rank_null_distribution(std::span<const std::int64_t> doubled_ranks);

const char* to_string(Alternative a) noexcept;
const char* to_string(ZeroHandling z) noexcept;
const char* to_string(WilcoxonMode m) noexcept;
const char* to_string(WilcoxonMethod m) noexcept;
Alternative parse_alternative(std::string_view text);
ZeroHandling parse_zero_handling(std::string_view text);
WilcoxonMode parse_wilcoxon_mode(std::string_view text);

}  // namespace fairlens
