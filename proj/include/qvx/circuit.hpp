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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qvx/errors.hpp"
#include "qvx/linalg.hpp"

namespace qvx {

inline constexpr double kGateUnitarityTolerance = 1e-12;
inline constexpr std::size_t kMaxDenseUnitaryQubits = 12;

struct OneQubitGate {
  Mat2 unitary;
  std::size_t target;

  bool operator==(const OneQubitGate& other) const {
    return target == other.target && unitary == other.unitary;
  }
};

struct CnotGate {
  std::size_t control;
  std::size_t target;

  bool operator==(const CnotGate&) const = default;
};

using Gate = std::variant<OneQubitGate, CnotGate>;

inline bool is_cnot(const Gate& g) { return std::holds_alternative<CnotGate>(g); }

/// Ordered gate list over the {single-qubit unitary, CNOT} gate set.
/// Gates are validated on insertion.
class Circuit {
 public:
  explicit Circuit(std::size_t num_qubits) : num_qubits_(num_qubits) {
    require(num_qubits >= 1, "circuit must have at least one qubit");
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(Gate gate) {
    std::visit([this](const auto& g) { validate(g); }, gate);
    gates_.push_back(std::move(gate));
    return *this;
  }

  Circuit& one_qubit(const Mat2& u, std::size_t target) {
    return add(OneQubitGate{u, target});
  }

  Circuit& cnot(std::size_t control, std::size_t target) {
    return add(CnotGate{control, target});
  }

  std::size_t cnot_count() const {
    return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), is_cnot));
  }

  std::size_t one_qubit_count() const { return gates_.size() - cnot_count(); }

  // Reproducibility metadata carried through serialization.
  std::optional<std::uint64_t> seed;
  std::string provenance;

  bool operator==(const Circuit& other) const {
    return num_qubits_ == other.num_qubits_ && gates_ == other.gates_;
  }

 private:
  void validate(const OneQubitGate& g) const {
    require(g.target < num_qubits_, "gate target index out of range");
    require(unitarity_error(g.unitary) <= kGateUnitarityTolerance,
            "single-qubit gate matrix is not unitary");
  }
  void validate(const CnotGate& g) const {
    require(g.control < num_qubits_ && g.target < num_qubits_, "CNOT index out of range");
    require(g.control != g.target, "CNOT control equals target");
  }

  std::size_t num_qubits_;
  std::vector<Gate> gates_;
};

/// Applies a gate to a vector over `num_qubits` register qubits.
inline void apply_gate(std::span<complex> v, std::size_t num_qubits, const Gate& gate) {
  if (const auto* g = std::get_if<OneQubitGate>(&gate)) {
    kernels::apply_1q(v, bit_of_qubit(num_qubits, g->target), g->unitary);
  } else {
    const auto& c = std::get<CnotGate>(gate);
    kernels::apply_cnot(v, bit_of_qubit(num_qubits, c.control),
                        bit_of_qubit(num_qubits, c.target));
  }
}

/// Dense 2^m x 2^m unitary of the circuit (gates applied in order).
inline MatX circuit_unitary(const Circuit& c) {
  const std::size_t m = c.num_qubits();
  require(m <= kMaxDenseUnitaryQubits, "circuit_unitary supports at most 12 qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
  MatX u = MatX::Identity(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    std::span<complex> column(u.col(col).data(), static_cast<std::size_t>(dim));
    for (const auto& g : c.gates()) apply_gate(column, m, g);
  }
  return u;
}

/// Reversed, conjugate-transposed circuit.
inline Circuit inverse(const Circuit& c) {
  Circuit out(c.num_qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
    if (const auto* g = std::get_if<OneQubitGate>(&*it)) {
      out.one_qubit(g->unitary.adjoint(), g->target);
    } else {
      out.add(*it);
    }
  }
  return out;
}

}  // namespace qvx
