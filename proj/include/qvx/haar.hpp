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
#include <complex>
#include <numbers>

#include "qvx/linalg.hpp"
#include "qvx/rng.hpp"

namespace qvx {

/// Haar-random U(n): QR of a complex Ginibre matrix, with the phases of R's
/// diagonal folded back into Q so the result is exactly Haar distributed.
inline MatX haar_unitary(Eigen::Index n, CounterRng& rng) {
  MatX z(n, n);
  const double scale = 1.0 / std::numbers::sqrt2;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = complex(rng.normal(), rng.normal()) * scale;
  Eigen::HouseholderQR<MatX> qr(z);
  MatX q = qr.householderQ() * MatX::Identity(n, n);
  const MatX& packed = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const complex d = packed(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag == 0.0 ? complex(1.0) : d / mag);
  }
  return q;
}

/// Haar-random SU(4): a Haar U(4) rescaled by a fourth root of its determinant.
inline Mat4 haar_su4(CounterRng& rng) {
  Mat4 u = haar_unitary(4, rng);
  const complex det = u.determinant();
  return u * std::polar(1.0, -std::arg(det) / 4.0);
}

}  // namespace qvx
