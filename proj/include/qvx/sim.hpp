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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qvx/circuit.hpp"
#include "qvx/counts.hpp"
#include "qvx/errors.hpp"
#include "qvx/heavy_output.hpp"
#include "qvx/linalg.hpp"
#include "qvx/qv_circuit.hpp"
#include "qvx/rng.hpp"

namespace qvx {

inline constexpr std::size_t kMaxStatevectorQubits = 12;
inline constexpr std::size_t kMaxDensityQubits = 10;

/// Depolarizing rates per gate class plus a symmetric readout flip rate.
struct NoiseModel {
  double eps_1q = 0.0;
  double eps_cnot = 0.0;
  double eps_readout = 0.0;
  std::string label = "ideal";

  void validate() const {
    for (double r : {eps_1q, eps_cnot, eps_readout})
      require(std::isfinite(r) && r >= 0.0 && r <= 1.0, "noise rates must lie in [0, 1]");
  }
  bool is_zero() const { return eps_1q == 0.0 && eps_cnot == 0.0 && eps_readout == 0.0; }

  bool operator==(const NoiseModel&) const = default;
};

namespace noise_presets {

// Qubit-averaged calibration data of three five-qubit IBM devices:
// sqrt(X) error, CNOT error, readout error (p(0|1) + p(1|0)) / 2.
inline NoiseModel lima() { return {4.446e-4, 1.131e-2, 3.790e-2, "lima"}; }
inline NoiseModel belem() { return {2.808e-4, 1.098e-2, 2.868e-2, "belem"}; }
inline NoiseModel quito() { return {2.980e-4, 8.292e-3, 2.546e-2, "quito"}; }
inline NoiseModel ideal() { return {0.0, 0.0, 0.0, "ideal"}; }

inline std::optional<NoiseModel> by_name(std::string_view name) {
  if (name == "lima") return lima();
  if (name == "belem") return belem();
  if (name == "quito") return quito();
  if (name == "ideal" || name == "none") return ideal();
  return std::nullopt;
}

}  // namespace noise_presets

class StateVector {
 public:
  explicit StateVector(std::size_t num_qubits)
      : num_qubits_(num_qubits), amplitudes_(std::size_t{1} << num_qubits, complex(0.0)) {
    require(num_qubits >= 1 && num_qubits <= kMaxStatevectorQubits,
            "statevector supports 1..12 qubits");
    amplitudes_[0] = 1.0;
  }

  void apply(const Gate& g) { apply_gate(amplitudes_, num_qubits_, g); }
  void apply(const Circuit& c) {
    require(c.num_qubits() == num_qubits_, "circuit width mismatch");
    for (const auto& g : c.gates()) apply(g);
  }
  void apply(const QvModelCircuit& model) {
    require(model.num_qubits == num_qubits_, "model width mismatch");
    apply_model(amplitudes_, model);
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                   [](const complex& a) { return std::norm(a); });
    return p;
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::span<const complex> amplitudes() const { return amplitudes_; }

 private:
  std::size_t num_qubits_;
  std::vector<complex> amplitudes_;
};

/// Dense density matrix stored as a vector over 2m bits: the row index
/// occupies the high m bits and the column index the low m bits, so
/// U rho U^dagger is U on the row bits and conj(U) on the column bits.
class DensityMatrix {
 public:
  explicit DensityMatrix(std::size_t num_qubits)
      : num_qubits_(num_qubits), dim_(std::size_t{1} << num_qubits),
        entries_(dim_ * dim_, complex(0.0)) {
    require(num_qubits >= 1 && num_qubits <= kMaxDensityQubits,
            "density matrix supports 1..10 qubits");
    entries_[0] = 1.0;
  }

  static DensityMatrix maximally_mixed(std::size_t num_qubits) {
    DensityMatrix rho(num_qubits);
    rho.entries_[0] = 0.0;
    for (std::size_t i = 0; i < rho.dim_; ++i) rho.entries_[i * rho.dim_ + i] = 1.0 / rho.dim_;
    return rho;
  }

  void apply(const Gate& gate) {
    if (const auto* g = std::get_if<OneQubitGate>(&gate)) {
      kernels::apply_1q(entries_, row_bit(g->target), g->unitary);
      kernels::apply_1q(entries_, col_bit(g->target), g->unitary.conjugate());
    } else {
      const auto& c = std::get<CnotGate>(gate);
      kernels::apply_cnot(entries_, row_bit(c.control), row_bit(c.target));
      kernels::apply_cnot(entries_, col_bit(c.control), col_bit(c.target));
    }
  }

  /// rho -> (1 - p) rho + p tr_q(rho) (x) I/2
  void depolarize(std::size_t qubit, double p) {
    if (p == 0.0) return;
    const std::size_t rb = std::size_t{1} << row_bit(qubit);
    const std::size_t cb = std::size_t{1} << col_bit(qubit);
    const double keep = 1.0 - p;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if ((i & rb) || (i & cb)) continue;
      complex& d0 = entries_[i];
      complex& d1 = entries_[i | rb | cb];
      const complex mixed = 0.5 * p * (d0 + d1);
      d0 = keep * d0 + mixed;
      d1 = keep * d1 + mixed;
      entries_[i | rb] *= keep;
      entries_[i | cb] *= keep;
    }
  }

  /// rho -> (1 - p) rho + p tr_pair(rho) (x) I/4 on the pair (a, b).
  void depolarize(std::size_t qa, std::size_t qb, double p) {
    if (p == 0.0) return;
    const std::size_t ra = std::size_t{1} << row_bit(qa), rb = std::size_t{1} << row_bit(qb);
    const std::size_t ca = std::size_t{1} << col_bit(qa), cb = std::size_t{1} << col_bit(qb);
    const std::size_t rows[4] = {0, rb, ra, ra | rb};
    const std::size_t cols[4] = {0, cb, ca, ca | cb};
    const std::size_t mask = ra | rb | ca | cb;
    const double keep = 1.0 - p;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i & mask) continue;
      complex trace = 0.0;
      for (int k = 0; k < 4; ++k) trace += entries_[i | rows[k] | cols[k]];
      const complex mixed = 0.25 * p * trace;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          complex& e = entries_[i | rows[r] | cols[c]];
          e = r == c ? keep * e + mixed : keep * e;
        }
    }
  }

  complex operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

  complex trace() const {
    complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = (*this)(i, i).real();
    return d;
  }

  MatX to_matrix() const {
    MatX m(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (*this)(r, c);
    return m;
  }

  bool all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  std::size_t num_qubits() const { return num_qubits_; }

 private:
  std::size_t row_bit(std::size_t q) const { return num_qubits_ + bit_of_qubit(num_qubits_, q); }
  std::size_t col_bit(std::size_t q) const { return bit_of_qubit(num_qubits_, q); }

  std::size_t num_qubits_;
  std::size_t dim_;
  std::vector<complex> entries_;
};

/// Ideal output distribution of the undecomposed model, |<z|C|0>|^2.
inline std::vector<double> ideal_probabilities(const QvModelCircuit& model) {
  require(model.num_qubits <= kMaxStatevectorQubits, "ideal_probabilities supports at most 12 qubits");
  StateVector psi(model.num_qubits);
  psi.apply(model);
  return psi.probabilities();
}

inline std::vector<double> ideal_probabilities(const Circuit& c) {
  require(c.num_qubits() <= kMaxStatevectorQubits, "ideal_probabilities supports at most 12 qubits");
  StateVector psi(c.num_qubits());
  psi.apply(c);
  return psi.probabilities();
}

/// Evolves |0><0| through the circuit; each gate is followed by its
/// depolarizing channel.
inline DensityMatrix evolve_noisy(const Circuit& c, const NoiseModel& noise) {
  noise.validate();
  require(c.num_qubits() <= kMaxDensityQubits, "noisy simulation supports at most 10 qubits");
  DensityMatrix rho(c.num_qubits());
  for (const auto& gate : c.gates()) {
    rho.apply(gate);
    if (const auto* g = std::get_if<OneQubitGate>(&gate)) {
      rho.depolarize(g->target, noise.eps_1q);
    } else {
      const auto& cx = std::get<CnotGate>(gate);
      rho.depolarize(cx.control, cx.target, noise.eps_cnot);
    }
  }
  if (!rho.all_finite()) throw NumericalError("non-finite entry in density matrix");
  return rho;
}

/// Independent symmetric bit flip with probability eps on every qubit.
inline void apply_readout_error(std::vector<double>& probs, double eps) {
  if (eps == 0.0) return;
  const std::size_t m = qubits_for_dimension(probs.size());
  for (std::size_t bit = 0; bit < m; ++bit) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (i & stride) continue;
      const double a = probs[i], b = probs[i | stride];
      probs[i] = (1.0 - eps) * a + eps * b;
      probs[i | stride] = (1.0 - eps) * b + eps * a;
    }
  }
}

/// Exact measured-outcome distribution, including readout confusion.
inline std::vector<double> noisy_distribution(const Circuit& c, const NoiseModel& noise) {
  std::vector<double> p = evolve_noisy(c, noise).diagonal();
  for (double& x : p) {
    if (!std::isfinite(x)) throw NumericalError("non-finite outcome probability");
    x = std::max(x, 0.0);
  }
  apply_readout_error(p, noise.eps_readout);
  return p;
}

/// Multinomial draw of `shots` outcomes by inverse-CDF lookup.
inline Counts sample_counts(std::span<const double> probs, std::uint64_t shots, CounterRng& rng) {
  require(shots >= 1, "shots must be at least 1");
  const std::size_t m = qubits_for_dimension(probs.size());
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0) || !std::isfinite(acc)) throw NumericalError("degenerate sampling distribution");
  // Last outcome with nonzero mass; guards against round-off past the end.
  std::size_t last = probs.size() - 1;
  while (last > 0 && probs[last] <= 0.0) --last;

  Counts counts(m);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto z = static_cast<std::size_t>(it - cdf.begin());
    counts.add(std::min(z, last));
  }
  return counts;
}

inline Counts run_noisy(const Circuit& c, const NoiseModel& noise, std::uint64_t shots,
                        std::uint64_t rng_seed) {
  require(shots >= 1, "shots must be at least 1");
  const auto p = noisy_distribution(c, noise);
  CounterRng rng(rng_seed);
  return sample_counts(p, shots, rng);
}

/// Infinite-shot heavy-output probability tr(Pi_H rho) after readout error.
inline double noisy_expectation(const Circuit& c, const NoiseModel& noise, const HeavySet& hs) {
  require(c.num_qubits() == hs.num_qubits, "circuit and heavy set differ in qubit count");
  return heavy_probability(noisy_distribution(c, noise), hs);
}

}  // namespace qvx
