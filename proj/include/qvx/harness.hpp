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
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qvx/errors.hpp"
#include "qvx/heavy_output.hpp"
#include "qvx/kak.hpp"
#include "qvx/parallel.hpp"
#include "qvx/qv_circuit.hpp"
#include "qvx/serialization.hpp"
#include "qvx/sim.hpp"
#include "qvx/stats.hpp"
#include "qvx/zne.hpp"

namespace qvx {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::size_t kConformantCircuitCount = 100;
inline constexpr std::size_t kPersistBatch = 25;

enum class Mode { unmitigated, mitigated, both };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::unmitigated: return "unmitigated";
    case Mode::mitigated: return "mitigated";
    case Mode::both: return "both";
  }
  return "both";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "unmitigated") return Mode::unmitigated;
  if (s == "mitigated") return Mode::mitigated;
  if (s == "both") return Mode::both;
  throw ValidationError("mode: expected unmitigated, mitigated or both, got '" + s + "'");
}

inline bool runs_unmitigated(Mode m) { return m != Mode::mitigated; }
inline bool runs_mitigated(Mode m) { return m != Mode::unmitigated; }

struct ExperimentConfig {
  std::vector<std::size_t> m_values{2, 3, 4, 5};
  std::size_t n_c = 500;
  std::uint64_t n_s = 10000;
  std::vector<double> scale_factors{1, 3, 5, 7, 9};
  NoiseModel noise = noise_presets::quito();
  std::uint64_t seed = 42;
  Mode mode = Mode::both;
  std::size_t n_resamples = kDefaultResamples;
  bool group_split = false;

  // Execution-only settings; not part of the persisted record.
  std::size_t threads = default_thread_count();
  bool record_timing = false;

  ScaleFactorSchedule schedule() const { return make_schedule(scale_factors, n_s); }

  void validate() const {
    require(!m_values.empty(), "config.m_values: at least one qubit count required");
    for (std::size_t i = 0; i < m_values.size(); ++i) {
      require(m_values[i] >= 2 && m_values[i] <= kMaxDensityQubits,
              "config.m_values: qubit counts must lie in 2..10");
      for (std::size_t j = 0; j < i; ++j)
        require(m_values[i] != m_values[j], "config.m_values: duplicate qubit count");
    }
    require(n_c >= 1, "config.n_c: need at least one circuit");
    require(n_resamples >= 1, "config.n_resamples: need at least one resample");
    noise.validate();
    try {
      (void)schedule();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("config.scale_factors: ") + e.what());
    }
  }

  bool conformant() const { return n_c >= kConformantCircuitCount; }

  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (!conformant())
      w.push_back("n_c = " + std::to_string(n_c) +
                  " is below 100; results are annotated as non-conformant");
    return w;
  }
};

struct FactorRun {
  double lambda = 1.0;
  Counts counts;
  double heavy_fraction = 0.0;
};

struct CircuitResult {
  std::size_t index = 0;
  std::optional<std::uint64_t> seed;
  HeavySet heavy_set;
  std::optional<double> ideal_heavy_probability;
  std::optional<FactorRun> unmitigated;
  std::vector<FactorRun> mitigated;  // one entry per scale factor, schedule order
  std::optional<double> e_c;
};

struct ModeStatistics {
  double h_d = 0.0;
  double sigma_bootstrap = 0.0;
  double sigma_analytic = 0.0;
  std::optional<double> sigma_group_split;
  std::size_t n_resamples = 0;
  std::size_t n_c = 0;
  bool passed = false;
  bool conformant = true;
};

struct SizeResult {
  std::size_t num_qubits = 0;
  std::vector<CircuitResult> circuits;
  std::optional<ModeStatistics> unmitigated;
  std::optional<ModeStatistics> mitigated;
};

struct VolumeSummary {
  std::optional<std::size_t> volume;  // contiguous from m = 2; absent if range is not contiguous
  std::size_t max_passing_m = 0;
};

struct ExperimentRecord {
  ExperimentConfig config;
  std::vector<SizeResult> sizes;
  bool complete = false;
  std::optional<VolumeSummary> unmitigated_volume;
  std::optional<VolumeSummary> mitigated_volume;
  std::optional<double> wall_clock_seconds;

  const SizeResult* find(std::size_t m) const {
    for (const auto& s : sizes)
      if (s.num_qubits == m) return &s;
    return nullptr;
  }
};

// ---- seeds ----------------------------------------------------------------

inline std::uint64_t circuit_seed(std::uint64_t seed, std::size_t m, std::size_t index) {
  return substream(substream(seed, m), index);
}

inline std::uint64_t shot_seed(std::uint64_t circuit_seed, std::size_t factor_slot) {
  return substream(circuit_seed, factor_slot);
}

inline std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t m, Mode mode) {
  return substream(seed ^ 0xB007'57A9'0000'0000ULL, 2 * m + (mode == Mode::mitigated ? 1 : 0));
}

// ---- volume ---------------------------------------------------------------

/// Largest m such that every size from 2 through m passed; 0 if m = 2 failed.
/// `passes` must list m = 2, 3, ... without gaps.
inline std::size_t determine_volume(const std::vector<std::pair<std::size_t, bool>>& passes) {
  std::vector<std::pair<std::size_t, bool>> sorted = passes;
  std::sort(sorted.begin(), sorted.end());
  require(!sorted.empty() && sorted.front().first == 2, "volume: qubit range must start at m = 2");
  for (std::size_t i = 1; i < sorted.size(); ++i)
    require(sorted[i].first == sorted[i - 1].first + 1, "volume: qubit range has gaps");
  std::size_t volume = 0;
  for (const auto& [m, ok] : sorted) {
    if (!ok) break;
    volume = m;
  }
  return volume;
}

inline std::size_t max_passing_m(const std::vector<std::pair<std::size_t, bool>>& passes) {
  std::size_t best = 0;
  for (const auto& [m, ok] : passes)
    if (ok) best = std::max(best, m);
  return best;
}

// ---- per-circuit execution ------------------------------------------------

inline FactorRun score(double lambda, Counts counts, const HeavySet& hs) {
  FactorRun run{lambda, std::move(counts), 0.0};
  run.heavy_fraction = heavy_fraction(run.counts, hs);
  return run;
}

/// Builds one circuit and samples it in every requested mode.
/// The heavy set is computed once from the ideal model and scores all runs.
inline CircuitResult simulate_circuit(const ExperimentConfig& config, std::size_t m,
                                      std::size_t index) {
  CircuitResult r;
  r.index = index;
  r.seed = circuit_seed(config.seed, m, index);
  const QvModelCircuit model = generate_qv_circuit(m, *r.seed);
  const auto probs = ideal_probabilities(model);
  r.heavy_set = compute_heavy_set(probs);
  r.ideal_heavy_probability = ideal_heavy_probability(probs, r.heavy_set);
  const Circuit compiled = decompose_to_cnots(model).first;

  if (runs_unmitigated(config.mode)) {
    r.unmitigated = score(1.0, run_noisy(compiled, config.noise, config.n_s, shot_seed(*r.seed, 0)),
                          r.heavy_set);
  }
  if (runs_mitigated(config.mode)) {
    const ScaleFactorSchedule schedule = config.schedule();
    std::vector<double> fractions;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      const int lambda = static_cast<int>(schedule.lambdas[i]);
      const Circuit folded = fold_circuit(compiled, lambda);
      r.mitigated.push_back(score(schedule.lambdas[i],
                                  run_noisy(folded, config.noise, schedule.shots_per_factor,
                                            shot_seed(*r.seed, 1 + i)),
                                  r.heavy_set));
      fractions.push_back(r.mitigated.back().heavy_fraction);
    }
    r.e_c = extrapolate(fractions, richardson_coefficients(schedule.lambdas));
  }
  return r;
}

// ---- aggregation ----------------------------------------------------------

inline ModeStatistics summarize_values(const std::vector<double>& values,
                                       const std::vector<double>& circuit_variances,
                                       const ExperimentConfig& config, std::uint64_t boot_seed) {
  ModeStatistics s;
  s.n_c = values.size();
  s.h_d = mean(values);
  s.n_resamples = config.n_resamples;
  s.sigma_bootstrap = bootstrap_sigma(values, config.n_resamples, boot_seed, config.threads);
  s.sigma_analytic = std::sqrt(analytic_variance_total(circuit_variances));
  if (config.group_split && values.size() >= 5) s.sigma_group_split = group_split_sigma(values, 5);
  s.passed = volume_decision(s.h_d, s.sigma_bootstrap, s.n_c).passed;
  s.conformant = s.n_c >= kConformantCircuitCount;
  return s;
}

/// Per-circuit values the bootstrap resamples: heavy fractions or E_C.
inline std::vector<double> per_circuit_values(const SizeResult& size, Mode mode) {
  std::vector<double> v;
  for (const auto& c : size.circuits) {
    if (mode == Mode::unmitigated) v.push_back(c.unmitigated->heavy_fraction);
    else v.push_back(*c.e_c);
  }
  return v;
}

inline void summarize(SizeResult& size, const ExperimentConfig& config) {
  std::sort(size.circuits.begin(), size.circuits.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  const bool has_unmitigated = std::all_of(size.circuits.begin(), size.circuits.end(),
                                           [](const auto& c) { return c.unmitigated.has_value(); });
  const bool has_mitigated = std::all_of(size.circuits.begin(), size.circuits.end(),
                                         [](const auto& c) { return c.e_c.has_value(); });
  if (size.circuits.empty()) return;

  if (has_unmitigated) {
    std::vector<double> variances;
    for (const auto& c : size.circuits) {
      const double f = c.unmitigated->heavy_fraction;
      CircuitEstimate est{f, {{1.0, f, c.unmitigated->counts.total_shots()}}};
      variances.push_back(analytic_variance_circuit(est, RichardsonCoefficients{{1.0}}));
    }
    size.unmitigated =
        summarize_values(per_circuit_values(size, Mode::unmitigated), variances, config,
                         bootstrap_seed(config.seed, size.num_qubits, Mode::unmitigated));
  }
  if (has_mitigated) {
    const auto coeffs = richardson_coefficients(config.scale_factors);
    std::vector<double> variances;
    for (const auto& c : size.circuits) {
      CircuitEstimate est;
      est.e_c = *c.e_c;
      for (const auto& f : c.mitigated)
        est.per_factor.push_back({f.lambda, f.heavy_fraction, f.counts.total_shots()});
      variances.push_back(analytic_variance_circuit(est, coeffs));
    }
    size.mitigated =
        summarize_values(per_circuit_values(size, Mode::mitigated), variances, config,
                         bootstrap_seed(config.seed, size.num_qubits, Mode::mitigated));
  }
}

inline std::optional<VolumeSummary> summarize_volume(const ExperimentRecord& record, Mode mode) {
  std::vector<std::pair<std::size_t, bool>> passes;
  for (const auto& s : record.sizes) {
    const auto& st = mode == Mode::unmitigated ? s.unmitigated : s.mitigated;
    if (!st) return std::nullopt;
    passes.emplace_back(s.num_qubits, st->passed);
  }
  if (passes.empty()) return std::nullopt;
  VolumeSummary v;
  v.max_passing_m = max_passing_m(passes);
  try {
    v.volume = determine_volume(passes);
  } catch (const ValidationError&) {
    v.volume.reset();
  }
  return v;
}

inline void finalize(ExperimentRecord& record) {
  for (auto& s : record.sizes) summarize(s, record.config);
  record.unmitigated_volume = summarize_volume(record, Mode::unmitigated);
  record.mitigated_volume = summarize_volume(record, Mode::mitigated);
  record.complete = true;
}

// ---- JSON -----------------------------------------------------------------

inline json config_to_json(const ExperimentConfig& c) {
  return json{{"m_values", c.m_values},
              {"n_c", c.n_c},
              {"n_s", c.n_s},
              {"scale_factors", c.scale_factors},
              {"shots_per_factor", allocate_shots(c.n_s, c.scale_factors.size())},
              {"noise", to_json(c.noise)},
              {"seed", c.seed},
              {"mode", to_string(c.mode)},
              {"n_resamples", c.n_resamples},
              {"group_split", c.group_split}};
}

/// Parses "a..b" (inclusive) or "a,b,c" qubit lists.
inline std::vector<std::size_t> parse_m_range(const std::string& text) {
  std::vector<std::size_t> out;
  try {
    if (auto pos = text.find(".."); pos != std::string::npos) {
      const std::size_t lo = std::stoul(text.substr(0, pos));
      const std::size_t hi = std::stoul(text.substr(pos + 2));
      require(lo <= hi, "empty qubit range");
      for (std::size_t m = lo; m <= hi; ++m) out.push_back(m);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
    }
  } catch (const std::logic_error&) {
    throw ValidationError("m: cannot parse qubit range '" + text + "'");
  }
  require(!out.empty(), "m: empty qubit range");
  return out;
}

inline std::vector<double> parse_scale_factors(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw ValidationError("scale_factors: cannot parse '" + text + "'");
  }
  return out;
}

/// Reads a config object; missing keys keep their defaults. Accepts "m" as a
/// range string or list, or "m_values" as a list.
inline ExperimentConfig config_from_json(const json& j, ExperimentConfig base = {},
                                         const std::string& path = "config") {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  ExperimentConfig c = std::move(base);
  auto size_list = [&](const json& v, const std::string& key) {
    std::vector<std::size_t> out;
    if (!v.is_array()) throw ValidationError(path + "." + key + ": expected an array");
    for (const auto& x : v) {
      if (!x.is_number_unsigned()) throw ValidationError(path + "." + key + ": expected integers");
      out.push_back(x.get<std::size_t>());
    }
    return out;
  };
  if (j.contains("m_values")) c.m_values = size_list(j["m_values"], "m_values");
  if (j.contains("m")) {
    c.m_values = j["m"].is_string() ? parse_m_range(j["m"].get<std::string>()) : size_list(j["m"], "m");
  }
  if (j.contains("n_c")) c.n_c = field::unsigned_int(j, "n_c", path);
  if (j.contains("n_s")) c.n_s = field::unsigned_int(j, "n_s", path);
  if (j.contains("scale_factors")) {
    const json& sf = j["scale_factors"];
    c.scale_factors.clear();
    if (sf.is_string()) {
      c.scale_factors = parse_scale_factors(sf.get<std::string>());
    } else {
      for (const auto& x : field::array(j, "scale_factors", path)) {
        if (!x.is_number()) throw ValidationError(path + ".scale_factors: expected numbers");
        c.scale_factors.push_back(x.get<double>());
      }
    }
  }
  if (j.contains("noise")) c.noise = noise_from_json(j["noise"], path + ".noise");
  if (j.contains("seed")) c.seed = field::unsigned_int(j, "seed", path);
  if (j.contains("mode")) c.mode = mode_from_string(field::string(j, "mode", path));
  if (j.contains("n_resamples")) c.n_resamples = field::unsigned_int(j, "n_resamples", path);
  if (j.contains("group_split")) {
    if (!j["group_split"].is_boolean()) throw ValidationError(path + ".group_split: expected a boolean");
    c.group_split = j["group_split"].get<bool>();
  }
  if (j.contains("threads")) c.threads = std::max<std::size_t>(1, field::unsigned_int(j, "threads", path));
  if (j.contains("shots_per_factor") &&
      field::unsigned_int(j, "shots_per_factor", path) !=
          allocate_shots(std::max<std::uint64_t>(c.n_s, 1), std::max<std::size_t>(c.scale_factors.size(), 1)))
    throw ValidationError(path + ".shots_per_factor: inconsistent with n_s and scale_factors");
  return c;
}

inline json factor_to_json(const FactorRun& f, const HeavySet& hs) {
  return json{{"lambda", f.lambda},
              {"shots", f.counts.total_shots()},
              {"counts", to_json(f.counts)},
              {"heavy_fraction", f.heavy_fraction},
              {"heavy_set_digest", hs.digest()}};
}

inline json stats_to_json(const ModeStatistics& s) {
  json j{{"h_d", s.h_d},
         {"sigma_bootstrap", s.sigma_bootstrap},
         {"sigma_analytic", s.sigma_analytic},
         {"n_resamples", s.n_resamples},
         {"n_c", s.n_c},
         {"passed", s.passed},
         {"conformant", s.conformant},
         {"threshold", kVolumeThreshold}};
  if (s.sigma_group_split) j["sigma_group_split"] = *s.sigma_group_split;
  return j;
}

inline ModeStatistics stats_from_json(const json& j, const std::string& path) {
  ModeStatistics s;
  s.h_d = field::number(j, "h_d", path);
  s.sigma_bootstrap = field::number(j, "sigma_bootstrap", path);
  s.sigma_analytic = field::number(j, "sigma_analytic", path);
  s.n_resamples = field::unsigned_int(j, "n_resamples", path);
  s.n_c = field::unsigned_int(j, "n_c", path);
  s.passed = field::at(j, "passed", path).get<bool>();
  s.conformant = field::at(j, "conformant", path).get<bool>();
  if (j.contains("sigma_group_split")) s.sigma_group_split = field::number(j, "sigma_group_split", path);
  return s;
}

inline json circuit_result_to_json(const CircuitResult& c) {
  json j{{"index", c.index}, {"heavy_set", to_json(c.heavy_set)}};
  if (c.seed) j["seed"] = *c.seed;
  if (c.ideal_heavy_probability) j["ideal_heavy_probability"] = *c.ideal_heavy_probability;
  if (c.unmitigated) j["unmitigated"] = factor_to_json(*c.unmitigated, c.heavy_set);
  if (c.e_c) {
    json per = json::array();
    for (const auto& f : c.mitigated) per.push_back(factor_to_json(f, c.heavy_set));
    j["mitigated"] = json{{"e_c", *c.e_c}, {"per_factor", per}};
  }
  return j;
}

inline json volume_to_json(const std::optional<VolumeSummary>& v) {
  if (!v) return nullptr;
  return json{{"volume", v->volume ? json(*v->volume) : json(nullptr)},
              {"max_passing_m", v->max_passing_m}};
}

inline json record_to_json(const ExperimentRecord& r) {
  json sizes = json::array();
  for (const auto& s : r.sizes) {
    json circuits = json::array();
    for (const auto& c : s.circuits) circuits.push_back(circuit_result_to_json(c));
    json stats = json::object();
    if (s.unmitigated) stats["unmitigated"] = stats_to_json(*s.unmitigated);
    if (s.mitigated) stats["mitigated"] = stats_to_json(*s.mitigated);
    sizes.push_back({{"num_qubits", s.num_qubits}, {"circuits", circuits}, {"statistics", stats}});
  }
  json j{{"schema_version", kSchemaVersion},
         {"complete", r.complete},
         {"config", config_to_json(r.config)},
         {"experiments", sizes},
         {"volume",
          {{"unmitigated", volume_to_json(r.unmitigated_volume)},
           {"mitigated", volume_to_json(r.mitigated_volume)}}}};
  if (r.wall_clock_seconds) j["metadata"] = {{"wall_clock_seconds", *r.wall_clock_seconds}};
  return j;
}

inline std::string dump_record(const ExperimentRecord& r) { return record_to_json(r).dump(2) + "\n"; }

inline void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

// ---- ingestion ------------------------------------------------------------

namespace detail {

inline FactorRun parse_factor(const json& j, std::size_t m, const HeavySet& hs,
                              std::uint64_t expected_shots, const std::string& path) {
  const double lambda = j.contains("lambda") ? field::number(j, "lambda", path) : 1.0;
  Counts counts = counts_from_json(field::at(j, "counts", path), m, path + ".counts");
  if (counts.total_shots() != expected_shots)
    throw ValidationError(path + ".counts: shot total " + std::to_string(counts.total_shots()) +
                          " inconsistent with schedule (expected " +
                          std::to_string(expected_shots) + ")");
  return score(lambda, std::move(counts), hs);
}

inline CircuitResult parse_circuit(const json& j, std::size_t m, std::size_t position,
                                   const ExperimentConfig& config, const std::string& path) {
  CircuitResult r;
  r.index = j.contains("index") ? field::unsigned_int(j, "index", path) : position;
  if (j.contains("seed")) r.seed = field::unsigned_int(j, "seed", path);

  if (j.contains("ideal_probabilities")) {
    std::vector<double> probs;
    for (const auto& p : field::array(j, "ideal_probabilities", path)) {
      if (!p.is_number()) throw ValidationError(path + ".ideal_probabilities: expected numbers");
      probs.push_back(p.get<double>());
    }
    if (probs.size() != (std::size_t{1} << m))
      throw ValidationError(path + ".ideal_probabilities: expected 2^" + std::to_string(m) + " entries");
    try {
      r.heavy_set = compute_heavy_set(probs);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".ideal_probabilities: " + e.what());
    }
    r.ideal_heavy_probability = ideal_heavy_probability(probs, r.heavy_set);
  } else if (r.seed) {
    const auto probs = ideal_probabilities(generate_qv_circuit(m, *r.seed));
    r.heavy_set = compute_heavy_set(probs);
    r.ideal_heavy_probability = ideal_heavy_probability(probs, r.heavy_set);
    if (j.contains("heavy_set")) {
      const HeavySet stored = heavy_set_from_json(j["heavy_set"], m, path + ".heavy_set");
      if (stored.members != r.heavy_set.members)
        throw ValidationError(path + ".heavy_set: does not match the circuit regenerated from seed");
    }
  } else if (j.contains("heavy_set")) {
    r.heavy_set = heavy_set_from_json(j["heavy_set"], m, path + ".heavy_set");
  } else {
    throw ValidationError(path + ": needs one of ideal_probabilities, seed or heavy_set");
  }

  if (j.contains("unmitigated"))
    r.unmitigated = parse_factor(j["unmitigated"], m, r.heavy_set, config.n_s, path + ".unmitigated");

  if (j.contains("mitigated")) {
    const ScaleFactorSchedule schedule = config.schedule();
    const std::string mp = path + ".mitigated";
    const json& per = field::array(field::at(j, "mitigated", path), "per_factor", mp);
    std::map<double, FactorRun> by_lambda;
    for (std::size_t i = 0; i < per.size(); ++i) {
      const std::string fp = mp + ".per_factor[" + std::to_string(i) + "]";
      const double lambda = field::number(per[i], "lambda", fp);
      if (std::find(schedule.lambdas.begin(), schedule.lambdas.end(), lambda) == schedule.lambdas.end())
        throw ValidationError(fp + ".lambda: " + std::to_string(lambda) + " is not in the schedule");
      if (by_lambda.count(lambda)) throw ValidationError(fp + ".lambda: duplicate scale factor");
      by_lambda.emplace(lambda, parse_factor(per[i], m, r.heavy_set, schedule.shots_per_factor, fp));
    }
    std::vector<double> fractions;
    for (double lambda : schedule.lambdas) {
      auto it = by_lambda.find(lambda);
      if (it == by_lambda.end()) {
        std::ostringstream msg;
        msg << mp << ".per_factor: schedule mismatch, missing lambda " << lambda;
        throw ValidationError(msg.str());
      }
      fractions.push_back(it->second.heavy_fraction);
      r.mitigated.push_back(std::move(it->second));
    }
    r.e_c = extrapolate(fractions, richardson_coefficients(schedule.lambdas));
  }
  if (!r.unmitigated && !r.e_c) throw ValidationError(path + ": no unmitigated or mitigated counts");
  return r;
}

}  // namespace detail

/// Scores counts from an external source (or an earlier record). No noisy
/// simulation is performed.
inline ExperimentRecord ingest_external_counts(const json& doc) {
  if (doc.contains("schema_version")) {
    if (field::unsigned_int(doc, "schema_version", "$") != kSchemaVersion)
      throw ValidationError("$.schema_version: unsupported version");
  }
  ExperimentConfig config;
  config.noise = NoiseModel{0, 0, 0, "external"};
  config.scale_factors = {1.0};
  config.seed = 0;
  const json& cj = field::at(doc, "config", "$");
  if (!cj.contains("n_s")) throw ValidationError("$.config.n_s: missing field");
  config = config_from_json(cj, config, "$.config");

  ExperimentRecord record;
  const json& experiments = field::array(doc, "experiments", "$");
  bool any_unmitigated = false, any_mitigated = false;
  config.m_values.clear();
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    const std::string ep = "$.experiments[" + std::to_string(e) + "]";
    SizeResult size;
    size.num_qubits = field::unsigned_int(experiments[e], "num_qubits", ep);
    if (size.num_qubits < 1 || size.num_qubits > kMaxStatevectorQubits)
      throw ValidationError(ep + ".num_qubits: must lie in 1..12");
    const json& circuits = field::array(experiments[e], "circuits", ep);
    if (circuits.empty()) throw ValidationError(ep + ".circuits: empty");
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      size.circuits.push_back(detail::parse_circuit(circuits[i], size.num_qubits, i, config,
                                                    ep + ".circuits[" + std::to_string(i) + "]"));
      any_unmitigated |= size.circuits.back().unmitigated.has_value();
      any_mitigated |= size.circuits.back().e_c.has_value();
    }
    for (std::size_t i = 0; i < size.circuits.size(); ++i) {
      const auto& c = size.circuits[i];
      if ((any_unmitigated && !c.unmitigated) || (any_mitigated && !c.e_c))
        throw ValidationError(ep + ".circuits[" + std::to_string(i) +
                              "]: every circuit must carry the same set of modes");
    }
    config.m_values.push_back(size.num_qubits);
    record.sizes.push_back(std::move(size));
  }
  config.mode = any_unmitigated && any_mitigated ? Mode::both
                : any_mitigated                  ? Mode::mitigated
                                                 : Mode::unmitigated;
  record.config = config;
  finalize(record);
  return record;
}

inline ExperimentRecord ingest_external_counts(const std::filesystem::path& path) {
  return ingest_external_counts(read_json_file(path));
}

// ---- orchestration --------------------------------------------------------

struct RunOptions {
  std::optional<std::filesystem::path> out_path;  // enables batch persistence and resume
  std::function<void(const std::string&)> log;
};

/// Loads completed circuits from an earlier (possibly partial) record written
/// with the same config.
inline std::map<std::pair<std::size_t, std::size_t>, CircuitResult> load_resumable(
    const std::filesystem::path& path, const ExperimentConfig& config) {
  std::map<std::pair<std::size_t, std::size_t>, CircuitResult> done;
  if (!std::filesystem::exists(path)) return done;
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const ValidationError&) {
    return done;
  }
  if (!doc.contains("config") || doc["config"] != config_to_json(config)) return done;
  // Partial records may hold sizes that have not started yet.
  json pruned = json::array();
  for (const auto& e : doc.value("experiments", json::array()))
    if (e.contains("circuits") && !e["circuits"].empty()) pruned.push_back(e);
  if (pruned.empty()) return done;
  doc["experiments"] = pruned;
  ExperimentRecord prior = ingest_external_counts(doc);
  for (auto& s : prior.sizes)
    for (auto& c : s.circuits) done.emplace(std::pair{s.num_qubits, c.index}, std::move(c));
  return done;
}

inline ExperimentRecord run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };
  for (const auto& w : config.warnings()) log("warning: " + w);

  std::map<std::pair<std::size_t, std::size_t>, CircuitResult> done;
  if (options.out_path) {
    done = load_resumable(*options.out_path, config);
    if (!done.empty()) log("resuming: " + std::to_string(done.size()) + " circuits already recorded");
  }

  ExperimentRecord record;
  record.config = config;
  for (std::size_t m : config.m_values) record.sizes.push_back(SizeResult{m, {}, {}, {}});

  for (auto& size : record.sizes) {
    const std::size_t m = size.num_qubits;
    for (std::size_t begin = 0; begin < config.n_c; begin += kPersistBatch) {
      const std::size_t end = std::min(config.n_c, begin + kPersistBatch);
      std::vector<CircuitResult> batch(end - begin);
      parallel_for(batch.size(), config.threads, [&](std::size_t k) {
        const std::size_t index = begin + k;
        auto it = done.find({m, index});
        batch[k] = it != done.end() ? it->second : simulate_circuit(config, m, index);
      });
      for (auto& c : batch) size.circuits.push_back(std::move(c));
      if (options.out_path) write_text_atomically(*options.out_path, dump_record(record));
      log("m=" + std::to_string(m) + ": " + std::to_string(end) + "/" + std::to_string(config.n_c) +
          " circuits");
    }
  }

  finalize(record);
  if (config.record_timing) {
    record.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (options.out_path) write_text_atomically(*options.out_path, dump_record(record));
  return record;
}

// ---- plot data ------------------------------------------------------------

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const std::vector<std::size_t>& convergence_resample_counts() {
  static const std::vector<std::size_t> counts = [] {
    std::vector<std::size_t> v;
    for (std::size_t n = 50; n <= 1000; n += 50) v.push_back(n);
    return v;
  }();
  return counts;
}

/// Writes <label>_heavy_output.csv, <label>_bootstrap_convergence.csv and
/// constants.csv into `dir`; returns the written paths.
inline std::vector<std::filesystem::path> emit_plot_data(const ExperimentRecord& record,
                                                         const std::filesystem::path& dir) {
  require(record.complete, "plot: record is incomplete");
  std::filesystem::create_directories(dir);
  std::string label = record.config.noise.label.empty() ? "device" : record.config.noise.label;
  std::vector<std::filesystem::path> written;

  std::ostringstream hd;
  hd << "m,mode,h_d,sigma,lower,upper\n";
  for (const auto& s : record.sizes) {
    for (Mode mode : {Mode::unmitigated, Mode::mitigated}) {
      const auto& st = mode == Mode::unmitigated ? s.unmitigated : s.mitigated;
      if (!st) continue;
      hd << s.num_qubits << ',' << to_string(mode) << ',' << format_number(st->h_d) << ','
         << format_number(st->sigma_bootstrap) << ','
         << format_number(st->h_d - 2 * st->sigma_bootstrap) << ','
         << format_number(st->h_d + 2 * st->sigma_bootstrap) << '\n';
    }
  }
  written.push_back(dir / (label + "_heavy_output.csv"));
  write_text_atomically(written.back(), hd.str());

  std::ostringstream constants;
  constants << "name,value\n"
            << "threshold," << format_number(kVolumeThreshold) << '\n'
            << "noiseless_asymptote," << format_number(kNoiselessAsymptote) << '\n';
  written.push_back(dir / "constants.csv");
  write_text_atomically(written.back(), constants.str());

  // Convergence sweep on the largest size, preferring the mitigated data.
  if (!record.sizes.empty()) {
    const SizeResult& s = record.sizes.back();
    const Mode mode = s.mitigated ? Mode::mitigated : Mode::unmitigated;
    if ((mode == Mode::mitigated && s.mitigated) || s.unmitigated) {
      const auto values = per_circuit_values(s, mode);
      const auto sweep = bootstrap_convergence(values, convergence_resample_counts(),
                                               bootstrap_seed(record.config.seed, s.num_qubits, mode),
                                               record.config.threads);
      std::ostringstream conv;
      conv << "m,mode,n_resamples,sigma\n";
      for (const auto& [n, sigma] : sweep)
        conv << s.num_qubits << ',' << to_string(mode) << ',' << n << ',' << format_number(sigma) << '\n';
      written.push_back(dir / (label + "_bootstrap_convergence.csv"));
      write_text_atomically(written.back(), conv.str());
    }
  }
  return written;
}

}  // namespace qvx
