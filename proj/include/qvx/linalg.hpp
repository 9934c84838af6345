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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace qvx {

using complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;

// Register convention: qubit q of an m-qubit register is bit (m - 1 - q) of
// the basis index, so qubit 0 is the most significant bit and the bitstring
// "z_0 z_1 ... z_{m-1}" reads left to right by qubit label. A 4x4 operator on
// the ordered pair (first, second) uses local index 2 * z_first + z_second.

constexpr std::size_t bit_of_qubit(std::size_t num_qubits, std::size_t qubit) noexcept {
  return num_qubits - 1 - qubit;
}

/// Largest absolute entry of (a - b).
template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// Max-abs distance between a and b after removing the global phase, which is
/// fixed by aligning the largest-magnitude entry of a.
template <typename A, typename B>
double phase_aligned_deviation(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  const complex ref = a(r, c);
  const complex other = b(r, c);
  if (std::abs(other) == 0.0) return max_abs_diff(a, b) + std::abs(ref);
  const complex phase = (ref / other) / std::abs(ref / other);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

template <typename A>
double unitarity_error(const Eigen::MatrixBase<A>& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - MatX::Identity(n, n)).cwiseAbs().maxCoeff();
}

inline Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 pauli_y() { Mat2 m; m << 0, complex(0, -1), complex(0, 1), 0; return m; }
inline Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }

/// exp(-i theta Z / 2)
inline Mat2 rz(double theta) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::polar(1.0, -theta / 2);
  m(1, 1) = std::polar(1.0, theta / 2);
  return m;
}

/// exp(-i theta Y / 2)
inline Mat2 ry(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

/// CNOT as a 4x4 matrix with the control as the first (high) local bit.
inline Mat4 cnot_matrix() {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

namespace kernels {

// The kernels below act on a vector of 2^num_bits amplitudes addressed by
// raw bit positions; the same code serves statevectors, columns of dense
// unitaries, and vectorized density matrices.

inline void apply_1q(std::span<complex> v, std::size_t bit, const Mat2& u) {
  const std::size_t stride = std::size_t{1} << bit;
  const complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t base = 0; base < v.size(); base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const complex a = v[i], b = v[i + stride];
      v[i] = u00 * a + u01 * b;
      v[i + stride] = u10 * a + u11 * b;
    }
  }
}

/// Applies a 4x4 operator whose local index is 2 * bit(high) + bit(low).
inline void apply_2q(std::span<complex> v, std::size_t high_bit, std::size_t low_bit,
                     const Mat4& u) {
  const std::size_t hi = std::size_t{1} << high_bit;
  const std::size_t lo = std::size_t{1} << low_bit;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((i & hi) || (i & lo)) continue;
    const std::size_t idx[4] = {i, i | lo, i | hi, i | hi | lo};
    complex in[4];
    for (int k = 0; k < 4; ++k) in[k] = v[idx[k]];
    for (int r = 0; r < 4; ++r) {
      complex acc = 0;
      for (int k = 0; k < 4; ++k) acc += u(r, k) * in[k];
      v[idx[r]] = acc;
    }
  }
}

inline void apply_cnot(std::span<complex> v, std::size_t control_bit, std::size_t target_bit) {
  const std::size_t c = std::size_t{1} << control_bit;
  const std::size_t t = std::size_t{1} << target_bit;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((i & c) && !(i & t)) std::swap(v[i], v[i | t]);
  }
}

}  // namespace kernels
}  // namespace qvx
