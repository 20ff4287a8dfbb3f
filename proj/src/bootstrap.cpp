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


#include "fairlens/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "fairlens/error.hpp"
#include "fairlens/rng.hpp"

namespace fairlens {
namespace {

void draw_indices(std::size_t units, std::uint64_t seed, std::size_t b, std::vector<std::size_t>& idx) {
  StreamRng rng(seed, b);
  idx.resize(units);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(units));
}

void check_args(std::size_t units, std::size_t resamples) {
  if (units < 2) throw ValidationError("bootstrap needs at least two resampling units");
  if (resamples == 0) throw ValidationError("bootstrap needs at least one resample");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  p = std::clamp(p, 0.0, 1.0);
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> bootstrap_replicates_serial(std::size_t units, const IndexStatistic& statistic,
                                                std::size_t resamples, std::uint64_t seed) {
  check_args(units, resamples);
  std::vector<double> out(resamples);
  std::vector<std::size_t> idx;
  for (std::size_t b = 0; b < resamples; ++b) {
    draw_indices(units, seed, b, idx);
    out[b] = statistic(idx);
  }
  return out;
}

std::vector<double> bootstrap_replicates(std::size_t units, const IndexStatistic& statistic,
                                         std::size_t resamples, std::uint64_t seed) {
  check_args(units, resamples);
  std::vector<double> out(resamples);
  const auto count = static_cast<std::int64_t>(resamples);
#pragma omp parallel
  {
    std::vector<std::size_t> idx;
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < count; ++b) {
      draw_indices(units, seed, static_cast<std::size_t>(b), idx);
      out[static_cast<std::size_t>(b)] = statistic(idx);
    }
  }
  return out;
}

std::vector<double> jackknife_replicates(std::size_t units, const IndexStatistic& statistic) {
  if (units < 2) throw ValidationError("jackknife needs at least two units");
  std::vector<double> out(units);
  const auto count = static_cast<std::int64_t>(units);
#pragma omp parallel
  {
    std::vector<std::size_t> idx(units - 1);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      std::size_t k = 0;
      for (std::size_t j = 0; j < units; ++j) {
        if (j != static_cast<std::size_t>(i)) idx[k++] = j;
      }
      out[static_cast<std::size_t>(i)] = statistic(idx);
    }
  }
  return out;
}

BootstrapInterval bca_interval(std::size_t units, const IndexStatistic& statistic, std::size_t resamples,
                               double level, std::uint64_t seed) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  check_args(units, resamples);

  BootstrapInterval ci;
  ci.level = level;
  ci.resamples = resamples;
  ci.seed = seed;
  std::vector<std::size_t> all(units);
  for (std::size_t i = 0; i < units; ++i) all[i] = i;
  ci.point_estimate = statistic(all);

  auto replicates = bootstrap_replicates(units, statistic, resamples, seed);
  std::sort(replicates.begin(), replicates.end());
  if (replicates.front() == replicates.back()) {
    ci.lower = ci.upper = ci.point_estimate;
    ci.degenerate = true;
    return ci;
  }

  const auto below = static_cast<std::size_t>(
      std::lower_bound(replicates.begin(), replicates.end(), ci.point_estimate) - replicates.begin());
  if (below == 0 || below == resamples) {
    throw DegenerateSampleError("BCa bias correction is infinite: " + std::to_string(below) + " of " +
                                std::to_string(resamples) + " replicates lie below the estimate " +
                                std::to_string(ci.point_estimate));
  }
  ci.z0 = normal_quantile(static_cast<double>(below) / static_cast<double>(resamples));

  const auto jack = jackknife_replicates(units, statistic);
  double mean = 0.0;
  for (double t : jack) mean += t;
  mean /= static_cast<double>(jack.size());
  double num = 0.0;
  double den = 0.0;
  for (double t : jack) {
    const double d = mean - t;
    num += d * d * d;
    den += d * d;
  }
  ci.acceleration = den > 0.0 ? num / (6.0 * std::pow(den, 1.5)) : 0.0;

  const double tail = (1.0 - level) / 2.0;
  auto adjusted = [&](double zq) {
    const double w = ci.z0 + zq;
    return normal_cdf(ci.z0 + w / (1.0 - ci.acceleration * w));
  };
  ci.lower = empirical_quantile(replicates, adjusted(normal_quantile(tail)));
  ci.upper = empirical_quantile(replicates, adjusted(normal_quantile(1.0 - tail)));
  return ci;
}

BootstrapInterval bca_interval(std::span<const double> samples, const SampleStatistic& statistic,
                               std::size_t resamples, double level, std::uint64_t seed) {
  IndexStatistic by_index = [&samples, &statistic](std::span<const std::size_t> idx) {
    std::vector<double> picked(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) picked[k] = samples[idx[k]];
    return statistic(picked);
  };
  return bca_interval(samples.size(), by_index, resamples, level, seed);
}

bool intervals_overlap(const BootstrapInterval& a, const BootstrapInterval& b) {
  if (a.level != b.level) throw ValidationError("cannot compare intervals at different confidence levels");
  return a.lower <= b.upper && b.lower <= a.upper;
}

nlohmann::json BootstrapInterval::to_json() const {
  return {{"estimate", point_estimate}, {"lower", lower},     {"upper", upper},
          {"level", level},             {"B", resamples},     {"seed", seed},
          {"z0", z0},                   {"acceleration", acceleration}, {"degenerate", degenerate}};
}

}  // namespace fairlens
