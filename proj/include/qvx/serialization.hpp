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
#include <string>
#include <vector>

#include "json.hpp"

#include "qvx/circuit.hpp"
#include "qvx/counts.hpp"
#include "qvx/errors.hpp"
#include "qvx/heavy_output.hpp"
#include "qvx/sim.hpp"

namespace qvx {

using json = nlohmann::json;

namespace field {

// Typed accessors that report schema violations with their JSON path.

inline const json& at(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path + "." + key + ": missing field");
  return *it;
}

inline double number(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_number()) throw ValidationError(path + "." + key + ": expected a number");
  return v.get<double>();
}

inline std::uint64_t unsigned_int(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ValidationError(path + "." + key + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string string(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_string()) throw ValidationError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline const json& array(const json& j, const std::string& key, const std::string& path) {
  const json& v = at(j, key, path);
  if (!v.is_array()) throw ValidationError(path + "." + key + ": expected an array");
  return v;
}

}  // namespace field

// ---- noise model ----------------------------------------------------------

inline json to_json(const NoiseModel& n) {
  return json{{"eps_1q", n.eps_1q}, {"eps_cnot", n.eps_cnot}, {"eps_readout", n.eps_readout},
              {"label", n.label}};
}

/// Accepts either a preset name or an explicit {eps_1q, eps_cnot, eps_readout, label}.
inline NoiseModel noise_from_json(const json& j, const std::string& path = "noise") {
  if (j.is_string()) {
    auto preset = noise_presets::by_name(j.get<std::string>());
    if (!preset) throw ValidationError(path + ": unknown noise preset '" + j.get<std::string>() + "'");
    return *preset;
  }
  NoiseModel n;
  n.eps_1q = field::number(j, "eps_1q", path);
  n.eps_cnot = field::number(j, "eps_cnot", path);
  n.eps_readout = field::number(j, "eps_readout", path);
  n.label = j.contains("label") ? field::string(j, "label", path) : "custom";
  try {
    n.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return n;
}

// ---- circuits -------------------------------------------------------------

inline json to_json(const Circuit& c) {
  json gates = json::array();
  for (const auto& g : c.gates()) {
    if (const auto* one = std::get_if<OneQubitGate>(&g)) {
      json matrix = json::array();
      for (int r = 0; r < 2; ++r)
        for (int col = 0; col < 2; ++col)
          matrix.push_back({one->unitary(r, col).real(), one->unitary(r, col).imag()});
      gates.push_back({{"kind", "one_qubit"}, {"targets", {one->target}}, {"matrix", matrix}});
    } else {
      const auto& cx = std::get<CnotGate>(g);
      gates.push_back({{"kind", "cnot"}, {"targets", {cx.control, cx.target}}});
    }
  }
  json out{{"num_qubits", c.num_qubits()}, {"gates", gates}, {"provenance", c.provenance}};
  out["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  return out;
}

inline Circuit circuit_from_json(const json& j, const std::string& path = "circuit") {
  Circuit c(field::unsigned_int(j, "num_qubits", path));
  const json& gates = field::array(j, "gates", path);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string gp = path + ".gates[" + std::to_string(i) + "]";
    const std::string kind = field::string(gates[i], "kind", gp);
    const json& targets = field::array(gates[i], "targets", gp);
    std::vector<std::size_t> t;
    for (const auto& v : targets) {
      if (!v.is_number_unsigned()) throw ValidationError(gp + ".targets: expected qubit indices");
      t.push_back(v.get<std::size_t>());
    }
    try {
      if (kind == "cnot") {
        if (t.size() != 2) throw ValidationError("cnot needs two targets");
        c.cnot(t[0], t[1]);
      } else if (kind == "one_qubit") {
        if (t.size() != 1) throw ValidationError("one_qubit needs one target");
        const json& m = field::array(gates[i], "matrix", gp);
        if (m.size() != 4) throw ValidationError("matrix needs 4 entries");
        Mat2 u;
        for (int k = 0; k < 4; ++k) {
          if (!m[k].is_array() || m[k].size() != 2) throw ValidationError("matrix entries are [re, im]");
          u(k / 2, k % 2) = complex(m[k][0].get<double>(), m[k][1].get<double>());
        }
        c.one_qubit(u, t[0]);
      } else {
        throw ValidationError("unknown gate kind '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      throw ValidationError(gp + ": " + e.what());
    }
  }
  if (j.contains("seed") && !j["seed"].is_null()) c.seed = field::unsigned_int(j, "seed", path);
  if (j.contains("provenance")) c.provenance = field::string(j, "provenance", path);
  return c;
}

// ---- counts and heavy sets ------------------------------------------------

inline json to_json(const Counts& counts) {
  json out = json::object();
  for (const auto& [z, n] : counts.histogram()) out[to_bitstring(z, counts.num_qubits())] = n;
  return out;
}

inline Counts counts_from_json(const json& j, std::size_t num_qubits, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object of bitstring counts");
  Counts counts(num_qubits);
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0))
      throw ValidationError(path + "." + key + ": expected a nonnegative integer");
    try {
      counts.add(from_bitstring(key, num_qubits), value.get<std::uint64_t>());
    } catch (const ValidationError& e) {
      throw ValidationError(path + "." + key + ": " + e.what());
    }
  }
  return counts;
}

inline json to_json(const HeavySet& hs) {
  json bits = json::array();
  for (auto z : hs.members) bits.push_back(to_bitstring(z, hs.num_qubits));
  return json{{"median", hs.median_probability}, {"bitstrings", bits}, {"digest", hs.digest()}};
}

inline HeavySet heavy_set_from_json(const json& j, std::size_t num_qubits, const std::string& path) {
  HeavySet hs;
  hs.num_qubits = num_qubits;
  hs.median_probability = field::number(j, "median", path);
  const json& bits = field::array(j, "bitstrings", path);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i].is_string())
      throw ValidationError(path + ".bitstrings[" + std::to_string(i) + "]: expected a string");
    try {
      hs.members.push_back(from_bitstring(bits[i].get<std::string>(), num_qubits));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".bitstrings[" + std::to_string(i) + "]: " + e.what());
    }
  }
  std::sort(hs.members.begin(), hs.members.end());
  hs.members.erase(std::unique(hs.members.begin(), hs.members.end()), hs.members.end());
  return hs;
}

}  // namespace qvx
