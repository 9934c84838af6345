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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "qvx/counts.hpp"
#include "qvx/errors.hpp"

namespace qvx {

inline constexpr double kNormalizationTolerance = 1e-9;

/// Bitstrings whose ideal probability is strictly above the median; doubles
/// as the heavy-subspace projector when scoring distributions.
struct HeavySet {
  std::size_t num_qubits = 0;
  double median_probability = 0.0;
  std::vector<std::uint64_t> members;  // sorted basis indices

  bool contains(std::uint64_t z) const {
    return std::binary_search(members.begin(), members.end(), z);
  }
  std::size_t size() const { return members.size(); }

  /// Stable 64-bit FNV-1a fingerprint of (m, median bits, members), hex.
  std::string digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t word) {
      for (int i = 0; i < 8; ++i) {
        h ^= (word >> (8 * i)) & 0xFFU;
        h *= 0x100000001b3ULL;
      }
    };
    feed(num_qubits);
    feed(std::bit_cast<std::uint64_t>(median_probability));
    for (auto z : members) feed(z);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  bool operator==(const HeavySet&) const = default;
};

inline std::size_t qubits_for_dimension(std::size_t dim) {
  require(dim >= 2 && std::has_single_bit(dim), "probability vector length must be 2^m, m >= 1");
  return static_cast<std::size_t>(std::countr_zero(dim));
}

/// Median is the midpoint of the two central order statistics of all 2^m
/// probabilities; membership is strict.
inline HeavySet compute_heavy_set(std::span<const double> probs) {
  HeavySet hs;
  hs.num_qubits = qubits_for_dimension(probs.size());
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= -kNormalizationTolerance, "probabilities must be nonnegative");
    total += p;
  }
  require(std::abs(total - 1.0) <= kNormalizationTolerance, "probabilities must sum to 1");

  std::vector<double> sorted(probs.begin(), probs.end());
  const std::size_t half = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + half, sorted.end());
  const double upper = sorted[half];
  const double lower = *std::max_element(sorted.begin(), sorted.begin() + half);
  hs.median_probability = 0.5 * (lower + upper);

  for (std::uint64_t z = 0; z < probs.size(); ++z)
    if (probs[z] > hs.median_probability) hs.members.push_back(z);
  return hs;
}

/// Fraction of recorded shots that landed in the heavy set.
inline double heavy_fraction(const Counts& counts, const HeavySet& hs) {
  require(counts.num_qubits() == hs.num_qubits, "counts and heavy set differ in qubit count");
  require(counts.total_shots() >= 1, "counts must contain at least one shot");
  std::uint64_t heavy = 0;
  for (const auto& [z, n] : counts.histogram())
    if (hs.contains(z)) heavy += n;
  return static_cast<double>(heavy) / static_cast<double>(counts.total_shots());
}

/// Probability mass of a distribution on the heavy subspace, tr(Pi_H p).
inline double heavy_probability(std::span<const double> probs, const HeavySet& hs) {
  require(qubits_for_dimension(probs.size()) == hs.num_qubits,
          "distribution and heavy set differ in qubit count");
  double s = 0.0;
  for (auto z : hs.members) s += probs[z];
  return s;
}

inline double ideal_heavy_probability(std::span<const double> probs, const HeavySet& hs) {
  return heavy_probability(probs, hs);
}

}  // namespace qvx
