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
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

namespace fairlens {

struct BootstrapInterval {
  double point_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  double z0 = 0.0;            // bias correction
  double acceleration = 0.0;  // jackknife skewness term
  /// Every resample gave the same value; the interval collapses to the estimate.
  bool degenerate = false;

  nlohmann::json to_json() const;
};

/// Statistic over a resample, given as indices into the original units.
/// Called concurrently from several threads, so it must not mutate shared state.
using IndexStatistic = std::function<double(std::span<const std::size_t>)>;
using SampleStatistic = std::function<double(std::span<const double>)>;

/// B bootstrap replicates of `statistic` over `units` resampling units.
/// Replicate b draws its indices from its own stream seeded by (seed, b), so
/// the result is bitwise identical for any OpenMP thread count.
std::vector<double> bootstrap_replicates(std::size_t units, const IndexStatistic& statistic,
                                         std::size_t resamples, std::uint64_t seed);
/// Single-threaded reference for bootstrap_replicates.
std::vector<double> bootstrap_replicates_serial(std::size_t units, const IndexStatistic& statistic,
                                                std::size_t resamples, std::uint64_t seed);

/// Leave-one-out replicates; entry i omits unit i.
std::vector<double> jackknife_replicates(std::size_t units, const IndexStatistic& statistic);

/// Bias-corrected and accelerated percentile interval.
///
/// z0 = Phi^-1(#{replicates < estimate} / B); the acceleration is the
/// jackknife skewness sum (mean - t_i)^3 / (6 [sum (mean - t_i)^2]^1.5);
/// endpoints are the replicate quantiles at
/// Phi(z0 + (z0 + z_q) / (1 - a (z0 + z_q))) for q = (1 -/+ level) / 2.
///
/// A constant replicate distribution yields a degenerate [estimate, estimate]
/// interval. Throws DegenerateSampleError when every replicate lies on one
/// side of the estimate (z0 infinite), ValidationError on bad arguments.
BootstrapInterval bca_interval(std::size_t units, const IndexStatistic& statistic, std::size_t resamples,
                               double level, std::uint64_t seed);
BootstrapInterval bca_interval(std::span<const double> samples, const SampleStatistic& statistic,
                               std::size_t resamples, double level, std::uint64_t seed);

/// Closed-interval overlap. Throws ValidationError when the levels differ.
bool intervals_overlap(const BootstrapInterval& a, const BootstrapInterval& b);

double normal_cdf(double x);
double normal_quantile(double p);

/// Linear-interpolation quantile (R type 7) of sorted data.
double empirical_quantile(std::span<const double> sorted, double p);

}  // namespace fairlens
