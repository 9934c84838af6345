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
#include <map>
#include <string>
#include <string_view>

#include "qvx/errors.hpp"

namespace qvx {

/// Renders a basis index as an m-character bitstring, qubit 0 leftmost.
inline std::string to_bitstring(std::uint64_t index, std::size_t num_qubits) {
  std::string s(num_qubits, '0');
  for (std::size_t q = 0; q < num_qubits; ++q)
    if ((index >> (num_qubits - 1 - q)) & 1U) s[q] = '1';
  return s;
}

inline std::uint64_t from_bitstring(std::string_view s, std::size_t num_qubits) {
  require(s.size() == num_qubits, "bitstring '" + std::string(s) + "' has wrong length");
  std::uint64_t index = 0;
  for (char ch : s) {
    require(ch == '0' || ch == '1', "bitstring '" + std::string(s) + "' has invalid character");
    index = (index << 1) | static_cast<std::uint64_t>(ch == '1');
  }
  return index;
}

/// Measurement histogram over m-bit outcomes, keyed by basis index.
class Counts {
 public:
  explicit Counts(std::size_t num_qubits = 0) : num_qubits_(num_qubits) {}

  void add(std::uint64_t outcome, std::uint64_t n = 1) {
    require(num_qubits_ >= 64 || outcome < (std::uint64_t{1} << num_qubits_),
            "outcome out of range for register width");
    if (n == 0) return;
    histogram_[outcome] += n;
    total_ += n;
  }

  std::uint64_t operator[](std::uint64_t outcome) const {
    auto it = histogram_.find(outcome);
    return it == histogram_.end() ? 0 : it->second;
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::uint64_t total_shots() const { return total_; }
  const std::map<std::uint64_t, std::uint64_t>& histogram() const { return histogram_; }

  bool operator==(const Counts&) const = default;

 private:
  std::size_t num_qubits_;
  std::map<std::uint64_t, std::uint64_t> histogram_;
  std::uint64_t total_ = 0;
};

}  // namespace qvx
