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

#include "qvx/kak.hpp"

#include "gtest/gtest.h"

#include "qvx/haar.hpp"
#include "qvx/qv_circuit.hpp"

using namespace qvx;

namespace {

double block_deviation(const Mat4& u) {
  Circuit c(2);
  const double reported = append_three_cnot_block(c, 0, 1, u);
  EXPECT_EQ(c.cnot_count(), 3U);
  EXPECT_EQ(c.one_qubit_count(), 7U);
  const double measured = phase_aligned_deviation(u, circuit_unitary(c));
  EXPECT_NEAR(reported, measured, 1e-15);
  return measured;
}

Mat4 swap_gate() {
  Mat4 s = Mat4::Zero();
  s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1;
  return s;
}

}  // namespace

TEST(Kak, cnot_block) { EXPECT_LE(block_deviation(cnot_matrix()), 1e-10); }

TEST(Kak, identity_block) { EXPECT_LE(block_deviation(Mat4::Identity()), 1e-10); }

TEST(Kak, degenerate_blocks) {
  Mat4 cz = Mat4::Identity();
  cz(3, 3) = -1;
  Mat4 iswap = swap_gate();
  iswap(1, 2) = iswap(2, 1) = complex(0, 1);
  CounterRng rng(3);
  const Mat4 local = kron(haar_unitary(2, rng), haar_unitary(2, rng));
  for (const Mat4& u : {swap_gate(), cz, iswap, local, Mat4(cnot_matrix() * local)})
    EXPECT_LE(block_deviation(u), 1e-9);
  // Global phase is irrelevant.
  EXPECT_LE(block_deviation(complex(0, 1) * swap_gate()), 1e-9);
}

TEST(Kak, canonical_form_reconstructs_input) {
  CounterRng rng(8);
  for (int i = 0; i < 50; ++i) {
    const Mat4 u = haar_unitary(4, rng);
    const TwoQubitKak k = kak_decompose(u);
    const Mat4 rebuilt = k.global_phase * kron(k.after_first, k.after_second) *
                         canonical_gate(k.xx, k.yy, k.zz) * kron(k.before_first, k.before_second);
    EXPECT_LT(max_abs_diff(rebuilt, u), 1e-10);
  }
}

TEST(Kak, random_blocks_within_tolerance) {
  CounterRng rng(2024);
  for (int i = 0; i < 100; ++i) EXPECT_LE(block_deviation(haar_su4(rng)), kKakTolerance);
}

TEST(Kak, rejects_non_unitary) {
  Mat4 bad = Mat4::Identity();
  bad(0, 0) = 2;
  EXPECT_THROW(kak_decompose(bad), ValidationError);
}

TEST(DecomposeToCnots, matches_model_unitary_and_counts) {
  for (std::size_t m = 2; m <= 5; ++m) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto model = generate_qv_circuit(m, seed);
      const auto [circuit, report] = decompose_to_cnots(model);
      EXPECT_EQ(report.cnot_count, 3 * m * (m / 2));
      EXPECT_EQ(circuit.cnot_count(), report.cnot_count);
      EXPECT_LE(report.max_unitary_deviation, kKakTolerance);
      EXPECT_LE(phase_aligned_deviation(model_unitary(model), circuit_unitary(circuit)), 1e-8);
      EXPECT_EQ(circuit.seed, std::optional<std::uint64_t>(seed));
    }
  }
}
