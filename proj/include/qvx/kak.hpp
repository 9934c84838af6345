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

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include <Eigen/Eigenvalues>

#include "qvx/circuit.hpp"
#include "qvx/errors.hpp"
#include "qvx/linalg.hpp"
#include "qvx/qv_circuit.hpp"

namespace qvx {

inline constexpr double kKakTolerance = 1e-8;
inline constexpr double kKakBreakdown = 1e-6;

/// U = phase * (after_first (x) after_second) * exp(i(xx XX + yy YY + zz ZZ))
///           * (before_first (x) before_second)
struct TwoQubitKak {
  Mat2 before_first, before_second;
  Mat2 after_first, after_second;
  double xx = 0, yy = 0, zz = 0;
  complex global_phase{1.0};
};

struct DecompositionReport {
  std::size_t cnot_count = 0;
  double max_unitary_deviation = 0.0;
};

namespace detail {

/// Magic (Bell-like) basis; conjugation by it maps SU(2) (x) SU(2) onto SO(4)
/// and makes XX, YY, ZZ simultaneously diagonal.
inline const Mat4& magic_basis() {
  static const Mat4 m = [] {
    const complex i(0, 1);
    Mat4 b;
    b << 1, 0, 0, i,
         0, i, 1, 0,
         0, i, -1, 0,
         1, 0, 0, -i;
    return Mat4(b / std::numbers::sqrt2);
  }();
  return m;
}

/// Splits L = A (x) B into its factors, each normalized to SU(2).
inline std::pair<Mat2, Mat2> factor_tensor_product(const Mat4& l) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double n = l.block<2, 2>(2 * i, 2 * j).norm();
      if (n > best) best = n, bi = i, bj = j;
    }
  const Mat2 block = l.block<2, 2>(2 * bi, 2 * bj);
  Mat2 b = block / std::sqrt(block.determinant());
  Mat2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * l.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
  return {a, b};
}

/// Real orthogonal P diagonalizing the complex symmetric unitary s. Real and
/// imaginary parts commute, so a generic real combination shares their
/// eigenvectors; a few fixed mixing weights cover degenerate spectra.
inline Eigen::Matrix4d simultaneous_diagonalizer(const Mat4& s) {
  static constexpr std::array<double, 6> weights = {1.1344, 0.5117, 2.7183, -0.3821, 7.389, -1.618};
  const Eigen::Matrix4d re = s.real();
  const Eigen::Matrix4d im = s.imag();
  for (double w : weights) {
    Eigen::Matrix4d mix = re + w * im;
    mix = 0.5 * (mix + mix.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(mix);
    Eigen::Matrix4d p = solver.eigenvectors();
    const Mat4 d = p.transpose().cast<complex>() * s * p.cast<complex>();
    Mat4 off = d;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() < 1e-11) {
      if (p.determinant() < 0) p.col(0) *= -1.0;
      return p;
    }
  }
  throw NumericalError("KAK: failed to diagonalize magic-basis Gram matrix");
}

inline Mat4 two_qubit_pauli(const Mat2& p) { return kron(p, p); }

}  // namespace detail

/// exp(i(xx XX + yy YY + zz ZZ)); the three terms commute.
inline Mat4 canonical_gate(double xx, double yy, double zz) {
  const complex i(0, 1);
  const Mat4 id = Mat4::Identity();
  auto term = [&](double angle, const Mat2& p) -> Mat4 {
    return std::cos(angle) * id + i * std::sin(angle) * detail::two_qubit_pauli(p);
  };
  return term(xx, pauli_x()) * term(yy, pauli_y()) * term(zz, pauli_z());
}

/// Cartan (KAK) decomposition of a two-qubit unitary through the magic basis.
inline TwoQubitKak kak_decompose(const Mat4& u) {
  require(unitarity_error(u) <= 1e-9, "kak_decompose: input is not unitary");
  const Mat4& mb = detail::magic_basis();
  const complex det = u.determinant();
  const complex phase = std::polar(1.0, std::arg(det) / 4.0);
  const Mat4 u_su = u / phase;

  const Mat4 up = mb.adjoint() * u_su * mb;
  const Mat4 gram = up.transpose() * up;
  const Eigen::Matrix4d p = detail::simultaneous_diagonalizer(gram);
  const Mat4 pc = p.cast<complex>();
  const Eigen::Vector4cd eig = (pc.transpose() * gram * pc).diagonal();

  Eigen::Vector4d half_angles;
  for (int k = 0; k < 4; ++k) half_angles(k) = std::arg(eig(k)) / 2.0;
  Eigen::Vector4cd d;
  for (int k = 0; k < 4; ++k) d(k) = std::polar(1.0, half_angles(k));

  Mat4 k1c = up * pc * d.conjugate().asDiagonal();
  Eigen::Matrix4d k1 = k1c.real();
  if (k1.determinant() < 0) {
    half_angles(0) += std::numbers::pi;
    d(0) = -d(0);
    k1.col(0) *= -1.0;
  }

  // Solve for (xx, yy, zz, phase) from the diagonal phases in the magic basis.
  Eigen::Matrix4d h;
  const std::array<Mat2, 3> paulis = {pauli_x(), pauli_y(), pauli_z()};
  for (int c = 0; c < 3; ++c) {
    const Mat4 diag = mb.adjoint() * detail::two_qubit_pauli(paulis[c]) * mb;
    h.col(c) = diag.diagonal().real();
  }
  h.col(3).setOnes();
  const Eigen::Vector4d coeffs = h.fullPivLu().solve(half_angles);

  TwoQubitKak out;
  const Mat4 left = mb * k1.cast<complex>() * mb.adjoint();
  const Mat4 right = mb * pc.transpose() * mb.adjoint();
  std::tie(out.after_first, out.after_second) = detail::factor_tensor_product(left);
  std::tie(out.before_first, out.before_second) = detail::factor_tensor_product(right);
  out.xx = coeffs(0);
  out.yy = coeffs(1);
  out.zz = coeffs(2);
  out.global_phase = phase * std::polar(1.0, coeffs(3));
  return out;
}

/// Fixed three-CNOT realization of a two-qubit unitary on (first, second),
/// appended to `out` (seven single-qubit gates, three CNOTs). Returns the
/// phase-aligned deviation of the emitted gates from `u`.
inline double append_three_cnot_block(Circuit& out, std::size_t first, std::size_t second,
                                      const Mat4& u) {
  const TwoQubitKak kak = kak_decompose(u);
  constexpr double half_pi = std::numbers::pi / 2;
  const double t1 = half_pi - 2 * kak.zz;
  const double t2 = 2 * kak.xx - half_pi;
  const double t3 = half_pi - 2 * kak.yy;

  Circuit local(2);
  local.one_qubit(rz(-half_pi) * kak.before_first, 0)
      .one_qubit(kak.before_second, 1)
      .cnot(1, 0)
      .one_qubit(ry(t3), 1)
      .cnot(0, 1)
      .one_qubit(rz(t1), 0)
      .one_qubit(ry(t2), 1)
      .cnot(1, 0)
      .one_qubit(kak.after_first, 0)
      .one_qubit(kak.after_second * rz(half_pi), 1);

  const double deviation = phase_aligned_deviation(u, circuit_unitary(local));
  if (!(deviation <= kKakBreakdown)) {
    throw NumericalError("KAK reconstruction deviates by " + std::to_string(deviation));
  }
  const std::size_t map[2] = {first, second};
  for (const auto& g : local.gates()) {
    if (const auto* one = std::get_if<OneQubitGate>(&g)) {
      out.one_qubit(one->unitary, map[one->target]);
    } else {
      const auto& cx = std::get<CnotGate>(g);
      out.cnot(map[cx.control], map[cx.target]);
    }
  }
  return deviation;
}

/// Compiles every SU(4) block of the model into 3 CNOTs plus single-qubit
/// gates, preserving block order.
inline std::pair<Circuit, DecompositionReport> decompose_to_cnots(const QvModelCircuit& model) {
  Circuit circuit(model.num_qubits);
  circuit.seed = model.seed;
  circuit.provenance = "qv-model/kak-3cnot";
  DecompositionReport report;
  for (const auto& layer : model.layers) {
    for (std::size_t b = 0; b < layer.blocks.size(); ++b) {
      const auto [first, second] = layer.pair(b);
      const double dev = append_three_cnot_block(circuit, first, second, layer.blocks[b]);
      report.max_unitary_deviation = std::max(report.max_unitary_deviation, dev);
    }
  }
  report.cnot_count = circuit.cnot_count();
  return {std::move(circuit), report};
}

}  // namespace qvx
