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

// Independent test oracles. Nothing here reuses the library's kernels: dense
// matrices are built by explicit Kronecker products and channels by Pauli
// twirling, so they cross-check the vectorized implementation.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qvx/circuit.hpp"
#include "qvx/haar.hpp"
#include "qvx/linalg.hpp"
#include "qvx/rng.hpp"
#include "qvx/sim.hpp"

namespace qvx::testutil {

/// Product of single-qubit operators, ops[q] acting on qubit q.
inline MatX tensor(const std::vector<Mat2>& ops) {
  MatX out = MatX::Identity(1, 1);
  for (const auto& op : ops) out = Eigen::kroneckerProduct(out, MatX(op)).eval();
  return out;
}

/// CNOT as |0><0|_c (x) I + |1><1|_c (x) X_t.
inline MatX embed_cnot(std::size_t control, std::size_t target, std::size_t m) {
  Mat2 p0 = Mat2::Zero(), p1 = Mat2::Zero();
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  std::vector<Mat2> a(m, Mat2::Identity()), b(m, Mat2::Identity());
  a[control] = p0;
  b[control] = p1;
  b[target] = pauli_x();
  return tensor(a) + tensor(b);
}

inline MatX dense_gate(const Gate& g, std::size_t m) {
  if (const auto* one = std::get_if<OneQubitGate>(&g)) {
    std::vector<Mat2> ops(m, Mat2::Identity());
    ops[one->target] = one->unitary;
    return tensor(ops);
  }
  const auto& cx = std::get<CnotGate>(g);
  return embed_cnot(cx.control, cx.target, m);
}

inline std::vector<Mat2> paulis() { return {Mat2::Identity(), pauli_x(), pauli_y(), pauli_z()}; }

/// Depolarizing channels by Pauli twirl: (1 - p) rho + p/4^k sum_P P rho P.
inline MatX twirl(const MatX& rho, const std::vector<std::size_t>& qubits, double p, std::size_t m) {
  MatX acc = MatX::Zero(rho.rows(), rho.cols());
  const auto ps = paulis();
  const std::size_t terms = qubits.size() == 1 ? 4 : 16;
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<Mat2> ops(m, Mat2::Identity());
    ops[qubits[0]] = ps[t % 4];
    if (qubits.size() == 2) ops[qubits[1]] = ps[t / 4];
    const MatX P = tensor(ops);
    acc += P * rho * P.adjoint();
  }
  return (1 - p) * rho + (p / static_cast<double>(terms)) * acc;
}

/// Dense brute-force noisy evolution followed by readout flips, built by
/// Kronecker products of the single-qubit confusion matrix.
inline std::vector<double> dense_noisy_distribution(const Circuit& c, const NoiseModel& noise) {
  const std::size_t m = c.num_qubits();
  const auto dim = Eigen::Index{1} << m;
  MatX rho = MatX::Zero(dim, dim);
  rho(0, 0) = 1;
  for (const auto& g : c.gates()) {
    const MatX u = dense_gate(g, m);
    rho = u * rho * u.adjoint();
    if (const auto* one = std::get_if<OneQubitGate>(&g)) {
      rho = twirl(rho, {one->target}, noise.eps_1q, m);
    } else {
      const auto& cx = std::get<CnotGate>(g);
      rho = twirl(rho, {cx.control, cx.target}, noise.eps_cnot, m);
    }
  }
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Identity(1, 1);
  Eigen::Matrix2d single;
  single << 1 - noise.eps_readout, noise.eps_readout, noise.eps_readout, 1 - noise.eps_readout;
  for (std::size_t q = 0; q < m; ++q) confusion = Eigen::kroneckerProduct(confusion, single).eval();
  const Eigen::VectorXd diag = rho.diagonal().real();
  const Eigen::VectorXd out = confusion * diag;
  return {out.data(), out.data() + out.size()};
}

/// Random circuit over {1Q, CNOT} with Haar single-qubit gates.
inline Circuit random_circuit(std::size_t m, std::size_t gates, std::uint64_t seed) {
  CounterRng rng(seed);
  Circuit c(m);
  for (std::size_t i = 0; i < gates; ++i) {
    if (m >= 2 && rng.uniform() < 0.4) {
      const auto a = rng.uniform_index(m);
      auto b = rng.uniform_index(m - 1);
      if (b >= a) ++b;
      c.cnot(a, b);
    } else {
      c.one_qubit(haar_unitary(2, rng), rng.uniform_index(m));
    }
  }
  return c;
}

}  // namespace qvx::testutil
