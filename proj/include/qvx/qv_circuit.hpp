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

#include <cstdint>
#include <numeric>
#include <vector>

#include "qvx/circuit.hpp"
#include "qvx/errors.hpp"
#include "qvx/haar.hpp"
#include "qvx/rng.hpp"

namespace qvx {

/// One quantum-volume layer: a relabeling of the qubits followed by Haar
/// SU(4) blocks on consecutive pairs of the relabeled order. Block i acts on
/// (permutation[2i], permutation[2i + 1]) with the first as the high local bit.
struct QvLayer {
  std::vector<std::size_t> permutation;
  std::vector<Mat4> blocks;

  std::pair<std::size_t, std::size_t> pair(std::size_t block) const {
    return {permutation[2 * block], permutation[2 * block + 1]};
  }
};

/// Abstract model circuit before decomposition into the CNOT gate set.
struct QvModelCircuit {
  std::size_t num_qubits = 0;
  std::vector<QvLayer> layers;
  std::uint64_t seed = 0;

  std::size_t depth() const { return layers.size(); }
  std::size_t num_blocks() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.blocks.size();
    return n;
  }
};

inline std::vector<std::size_t> random_permutation(std::size_t n, CounterRng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.uniform_index(i)]);
  return p;
}

/// Square (depth = width) quantum-volume model circuit, fully determined by
/// (num_qubits, seed).
inline QvModelCircuit generate_qv_circuit(std::size_t num_qubits, std::uint64_t seed) {
  require(num_qubits >= 2, "quantum-volume circuits need at least 2 qubits");
  QvModelCircuit model;
  model.num_qubits = num_qubits;
  model.seed = seed;
  CounterRng rng(mix64(seed));
  for (std::size_t d = 0; d < num_qubits; ++d) {
    QvLayer layer;
    layer.permutation = random_permutation(num_qubits, rng);
    for (std::size_t b = 0; b < num_qubits / 2; ++b) layer.blocks.push_back(haar_su4(rng));
    model.layers.push_back(std::move(layer));
  }
  return model;
}

/// Applies the model circuit's blocks, in order, to a register vector.
inline void apply_model(std::span<complex> v, const QvModelCircuit& model) {
  const std::size_t m = model.num_qubits;
  for (const auto& layer : model.layers) {
    for (std::size_t b = 0; b < layer.blocks.size(); ++b) {
      const auto [first, second] = layer.pair(b);
      kernels::apply_2q(v, bit_of_qubit(m, first), bit_of_qubit(m, second), layer.blocks[b]);
    }
  }
}

/// Dense unitary of the undecomposed model (test oracle).
inline MatX model_unitary(const QvModelCircuit& model) {
  const std::size_t m = model.num_qubits;
  require(m <= kMaxDenseUnitaryQubits, "model_unitary supports at most 12 qubits");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << m);
  MatX u = MatX::Identity(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col)
    apply_model(std::span<complex>(u.col(col).data(), static_cast<std::size_t>(dim)), model);
  return u;
}

}  // namespace qvx
