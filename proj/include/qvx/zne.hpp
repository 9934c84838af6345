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
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qvx/circuit.hpp"
#include "qvx/errors.hpp"

namespace qvx {

/// Noise scale factors and the per-factor shot count under a fixed total
/// budget.
struct ScaleFactorSchedule {
  std::vector<double> lambdas{1, 3, 5, 7, 9};
  std::uint64_t shots_per_factor = 0;

  std::size_t size() const { return lambdas.size(); }

  /// Folding requires odd positive integers; all factors must be distinct.
  void validate() const {
    require(!lambdas.empty(), "schedule needs at least one scale factor");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double l = lambdas[i];
      require(l >= 1.0 && std::floor(l) == l && static_cast<std::int64_t>(l) % 2 == 1,
              "scale factors must be odd positive integers");
      for (std::size_t j = 0; j < i; ++j)
        require(lambdas[j] != l, "scale factors must be distinct");
    }
  }

  bool operator==(const ScaleFactorSchedule&) const = default;
};

/// Shots per scale factor so that k factors never exceed the total budget.
/// The remainder n_s mod k is discarded.
inline std::uint64_t allocate_shots(std::uint64_t total_shots, std::size_t k) {
  require(k >= 1, "need at least one scale factor");
  require(total_shots >= k, "total shot budget smaller than number of scale factors");
  return total_shots / k;
}

inline ScaleFactorSchedule make_schedule(std::vector<double> lambdas, std::uint64_t total_shots) {
  ScaleFactorSchedule s;
  s.lambdas = std::move(lambdas);
  s.validate();
  s.shots_per_factor = allocate_shots(total_shots, s.size());
  return s;
}

/// Local folding: each CNOT is repeated lambda times in place.
inline Circuit fold_circuit(const Circuit& c, int lambda) {
  require(lambda >= 1 && lambda % 2 == 1, "fold factor must be an odd positive integer");
  Circuit out(c.num_qubits());
  out.seed = c.seed;
  out.provenance = c.provenance;
  for (const auto& g : c.gates()) {
    const int reps = is_cnot(g) ? lambda : 1;
    for (int r = 0; r < reps; ++r) out.add(g);
  }
  return out;
}

struct RichardsonCoefficients {
  std::vector<double> etas;

  std::size_t size() const { return etas.size(); }
};

/// eta_i = prod_{j != i} lambda_j / (lambda_j - lambda_i): weights of the
/// interpolating polynomial through (lambda_i, E_i) evaluated at zero.
inline RichardsonCoefficients richardson_coefficients(std::span<const double> lambdas) {
  require(!lambdas.empty(), "need at least one scale factor");
  RichardsonCoefficients out;
  out.etas.reserve(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    double eta = 1.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      if (j == i) continue;
      require(lambdas[j] != lambdas[i], "scale factors must be distinct");
      eta *= lambdas[j] / (lambdas[j] - lambdas[i]);
    }
    out.etas.push_back(eta);
  }
  return out;
}

/// Zero-noise estimate sum_i eta_i E_i. Not clamped: the linear combination
/// can leave [0, 1].
inline double extrapolate(std::span<const double> values, const RichardsonCoefficients& coeffs) {
  require(values.size() == coeffs.size(), "value count does not match coefficient count");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += coeffs.etas[i] * values[i];
  return acc;
}

}  // namespace qvx
