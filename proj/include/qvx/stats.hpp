// Copyright 2026 The qvx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qvx/errors.hpp"
#include "qvx/parallel.hpp"
#include "qvx/rng.hpp"
#include "qvx/zne.hpp"

namespace qvx {

inline constexpr double kVolumeThreshold = 2.0 / 3.0;
/// Large-m limit of the ideal heavy-output probability, (1 + ln 2) / 2.
inline constexpr double kNoiselessAsymptote = (1.0 + std::numbers::ln2) / 2.0;
inline constexpr std::size_t kDefaultResamples = 500;

struct FactorResult {
  double lambda = 1.0;
  double raw_expectation = 0.0;  // measured heavy fraction at this scale factor
  std::uint64_t shots = 0;
};

/// Error-mitigated heavy-output probability of one circuit with its inputs.
struct CircuitEstimate {
  double e_c = 0.0;
  std::vector<FactorResult> per_factor;
};

struct VolumeEstimate {
  double h_d = 0.0;
  double sigma = 0.0;
  std::size_t n_c = 0;
  bool passed = false;
};

inline double mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

/// Binomial shot-noise variance of sum_j eta_j E_j:
/// sum_j eta_j^2 E_j (1 - E_j) / n_j.
inline double analytic_variance_circuit(const CircuitEstimate& est,
                                        const RichardsonCoefficients& coeffs) {
  require(est.per_factor.size() == coeffs.size(), "estimate and coefficients differ in length");
  double var = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const auto& f = est.per_factor[j];
    require(f.shots >= 1, "per-factor shot count must be positive");
    require(f.raw_expectation >= 0.0 && f.raw_expectation <= 1.0,
            "raw expectation must lie in [0, 1]");
    const double eta = coeffs.etas[j];
    var += eta * eta * f.raw_expectation * (1.0 - f.raw_expectation) /
           static_cast<double>(f.shots);
  }
  return var;
}

/// Variance of the circuit average: (sum_C sigma_C^2) / n_c^2.
inline double analytic_variance_total(std::span<const double> circuit_variances) {
  require(!circuit_variances.empty(), "need at least one circuit variance");
  double s = 0.0;
  for (double v : circuit_variances) s += v;
  const auto n = static_cast<double>(circuit_variances.size());
  return s / (n * n);
}

/// Means of n_resamples bootstrap resamples. Resample j always draws from
/// substream j of the seed, so the first N means are the same for any
/// n_resamples >= N and for any thread count.
inline std::vector<double> bootstrap_means(std::span<const double> values, std::size_t n_resamples,
                                           std::uint64_t seed, std::size_t threads = 1) {
  require(!values.empty(), "bootstrap needs at least one value");
  require(n_resamples >= 1, "bootstrap needs at least one resample");
  std::vector<double> means(n_resamples);
  const std::size_t n = values.size();
  parallel_for(n_resamples, threads, [&](std::size_t j) {
    CounterRng rng(substream(seed, j));
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[rng.uniform_index(n)];
    means[j] = s / static_cast<double>(n);
  });
  return means;
}

/// Population (1/N) standard deviation of a set of bootstrap means.
inline double spread_of_means(std::span<const double> means) {
  const double mu = mean(means);
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  return std::sqrt(ss / static_cast<double>(means.size()));
}

inline double bootstrap_sigma(std::span<const double> values, std::size_t n_resamples,
                              std::uint64_t seed, std::size_t threads = 1) {
  const auto means = bootstrap_means(values, n_resamples, seed, threads);
  return spread_of_means(means);
}

/// sigma(N) for each requested resample count, sharing one resample stream.
inline std::vector<std::pair<std::size_t, double>> bootstrap_convergence(
    std::span<const double> values, std::span<const std::size_t> resample_counts,
    std::uint64_t seed, std::size_t threads = 1) {
  std::size_t largest = 0;
  for (auto n : resample_counts) {
    require(n >= 1, "resample counts must be positive");
    largest = std::max(largest, n);
  }
  const auto means = bootstrap_means(values, largest, seed, threads);
  std::vector<std::pair<std::size_t, double>> out;
  for (auto n : resample_counts)
    out.emplace_back(n, spread_of_means(std::span<const double>(means).first(n)));
  return out;
}

/// Cross-check: split the per-circuit values into contiguous groups, take
/// the sample standard deviation of group means, and scale it to the full
/// average (divide by sqrt(groups)).
inline double group_split_sigma(std::span<const double> values, std::size_t groups = 5) {
  require(groups >= 2, "group split needs at least two groups");
  require(values.size() >= groups, "fewer values than groups");
  const std::size_t per = values.size() / groups;
  std::vector<double> group_means;
  for (std::size_t g = 0; g < groups; ++g) group_means.push_back(mean(values.subspan(g * per, per)));
  const double mu = mean(group_means);
  double ss = 0.0;
  for (double m : group_means) ss += (m - mu) * (m - mu);
  const double sd = std::sqrt(ss / static_cast<double>(groups - 1));
  return sd / std::sqrt(static_cast<double>(groups));
}

/// Heavy-output test: pass iff h_d > 2/3 + 2 sigma (strict).
inline VolumeEstimate volume_decision(double h_d, double sigma, std::size_t n_c = 0) {
  require(sigma >= 0.0, "sigma must be nonnegative");
  return VolumeEstimate{h_d, sigma, n_c, h_d > kVolumeThreshold + 2.0 * sigma};
}

}  // namespace qvx
