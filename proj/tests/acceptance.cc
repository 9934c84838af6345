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

// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed below.
//
// Usage: acceptance [artifact-dir]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qvx/qvx.hpp"

using namespace qvx;
namespace fs = std::filesystem;

namespace {

constexpr double kAsymptoteTolerance = 0.01;
constexpr double kCoefficientTolerance = 1e-12;
constexpr double kPolynomialTolerance = 1e-9;
constexpr double kFoldTolerance = 1e-9;
constexpr double kKakAcceptance = 1e-8;
constexpr double kVarianceTolerance = 0.20;
constexpr double kConvergenceTolerance = 0.10;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* spec, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

ExperimentConfig quito_config() {
  ExperimentConfig c;
  c.m_values = {2, 3, 4, 5};
  c.n_c = 100;
  c.n_s = 10000;
  c.scale_factors = {1, 3, 5, 7, 9};
  c.noise = noise_presets::quito();
  c.seed = 42;
  c.mode = Mode::both;
  return c;
}

// Several criteria read the same quito record, so it is built once.
const ExperimentRecord& quito_record() {
  static const ExperimentRecord record = run_experiment(quito_config());
  return record;
}

Outcome noiseless_asymptote() {
  const std::size_t count = 500;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto probs = ideal_probabilities(generate_qv_circuit(5, substream(0xA5A5, i)));
    sum += ideal_heavy_probability(probs, compute_heavy_set(probs));
  }
  const double avg = sum / count;
  const double target = (1.0 + std::numbers::ln2) / 2.0;
  return {std::abs(avg - target) <= kAsymptoteTolerance,
          fmt("mean over %zu m=5 circuits = %.5f, target %.5f, |diff| = %.5f (tol %.2g)", count, avg,
              target, std::abs(avg - target), kAsymptoteTolerance)};
}

Outcome richardson_exactness() {
  const std::vector<double> lambdas{1, 3, 5, 7, 9};
  const std::vector<double> expected{2.4609375, -3.28125, 2.953125, -1.40625, 0.2734375};
  const auto coeffs = richardson_coefficients(lambdas);
  double coeff_err = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    coeff_err = std::max(coeff_err, std::abs(coeffs.etas[i] - expected[i]));
    sum += coeffs.etas[i];
  }
  CounterRng rng(20260101);
  double poly_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double a[5];
    const int degree = static_cast<int>(rng.uniform_index(5));
    for (int k = 0; k < 5; ++k) a[k] = k <= degree ? 2.0 * rng.uniform() - 1.0 : 0.0;
    std::vector<double> values;
    for (double l : lambdas) {
      double v = 0.0;
      for (int k = 4; k >= 0; --k) v = v * l + a[k];
      values.push_back(v);
    }
    poly_err = std::max(poly_err, std::abs(extrapolate(values, coeffs) - a[0]));
  }
  const bool ok = coeff_err <= kCoefficientTolerance && std::abs(sum - 1.0) <= kCoefficientTolerance &&
                  poly_err <= kPolynomialTolerance;
  return {ok, fmt("max coefficient error %.2e, |sum-1| = %.2e, max polynomial error %.2e", coeff_err,
                  std::abs(sum - 1.0), poly_err)};
}

Outcome fold_unitarity() {
  double worst = 0.0;
  bool counts_ok = true;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::size_t m = 2 + i % 3;
    const Circuit base = decompose_to_cnots(generate_qv_circuit(m, substream(0xF01D, i))).first;
    const MatX u = circuit_unitary(base);
    for (int lambda : {3, 5, 7, 9}) {
      const Circuit folded = fold_circuit(base, lambda);
      counts_ok &= folded.cnot_count() == base.cnot_count() * static_cast<std::size_t>(lambda);
      worst = std::max(worst, phase_aligned_deviation(u, circuit_unitary(folded)));
    }
  }
  return {worst <= kFoldTolerance && counts_ok,
          fmt("50 circuits x 4 factors, worst phase-aligned deviation %.2e (tol %.0e)%s", worst,
              kFoldTolerance, counts_ok ? "" : ", CNOT count mismatch")};
}

Outcome kak_soundness() {
  CounterRng rng(0x4B414B);
  double worst = 0.0;
  std::size_t bad_counts = 0;
  for (int i = 0; i < 200; ++i) {
    const Mat4 u = haar_su4(rng);
    Circuit c(2);
    append_three_cnot_block(c, 0, 1, u);
    if (c.cnot_count() != 3) ++bad_counts;
    worst = std::max(worst, phase_aligned_deviation(u, Mat4(circuit_unitary(c))));
  }
  return {worst <= kKakAcceptance && bad_counts == 0,
          fmt("200 Haar blocks, worst deviation %.2e (tol %.0e), blocks without exactly 3 CNOTs: %zu",
              worst, kKakAcceptance, bad_counts)};
}

Outcome mitigation_lifts() {
  const auto& rec = quito_record();
  bool all = true;
  std::string detail;
  for (const auto& s : rec.sizes) {
    const auto& u = *s.unmitigated;
    const auto& m = *s.mitigated;
    const double gap = m.h_d - u.h_d;
    const double combined = std::hypot(u.sigma_bootstrap, m.sigma_bootstrap);
    // Paired resampling of per-circuit differences, reported for context only.
    std::vector<double> diff;
    for (const auto& c : s.circuits) diff.push_back(*c.e_c - c.unmitigated->heavy_fraction);
    const double paired = bootstrap_sigma(diff, rec.config.n_resamples, 0x9A1D + s.num_qubits);
    const bool ok = gap > combined;
    all &= ok;
    detail += fmt("\n    m=%zu: unmitigated %.4f (sigma %.4f), mitigated %.4f (sigma %.4f), gap %+.4f, "
                  "combined sigma %.4f [%s], paired sigma %.4f",
                  s.num_qubits, u.h_d, u.sigma_bootstrap, m.h_d, m.sigma_bootstrap, gap, combined,
                  ok ? "ok" : "below", paired);
  }
  return {all, "quito, n_c=100, n_s=1e4, schedule 1,3,5,7,9" + detail};
}

Outcome threshold_crossing(const fs::path& artifacts) {
  std::ostringstream csv;
  csv << "eps_cnot,m,unmitigated_h_d,unmitigated_sigma,unmitigated_passed,mitigated_h_d,"
         "mitigated_sigma,mitigated_passed\n";
  std::ostringstream volumes;
  volumes << "eps_cnot,unmitigated_volume,mitigated_volume\n";
  std::string found;
  for (int step = 0; step <= 6; ++step) {
    ExperimentConfig c = quito_config();
    c.m_values = {2, 3, 4, 5, 6};
    c.noise.eps_cnot = 0.005 + 0.0025 * step;
    c.noise.label = "quito-sweep";
    const auto rec = run_experiment(c);
    for (const auto& s : rec.sizes) {
      const auto& u = *s.unmitigated;
      const auto& m = *s.mitigated;
      csv << format_number(c.noise.eps_cnot) << ',' << s.num_qubits << ',' << format_number(u.h_d) << ','
          << format_number(u.sigma_bootstrap) << ',' << u.passed << ',' << format_number(m.h_d) << ','
          << format_number(m.sigma_bootstrap) << ',' << m.passed << '\n';
      if (!u.passed && m.passed)
        found += fmt("\n    eps_cnot=%.4f m=%zu: unmitigated %.4f fails, mitigated %.4f passes (threshold "
                     "+2sigma %.4f)",
                     c.noise.eps_cnot, s.num_qubits, u.h_d, m.h_d,
                     kVolumeThreshold + 2 * m.sigma_bootstrap);
    }
    volumes << format_number(c.noise.eps_cnot) << ',' << *rec.unmitigated_volume->volume << ','
            << *rec.mitigated_volume->volume << '\n';
  }
  write_text_atomically(artifacts / "threshold_sweep.csv", csv.str());
  write_text_atomically(artifacts / "threshold_sweep_volumes.csv", volumes.str());
  return {!found.empty(), "sweep eps_cnot 0.005..0.02, m=2..6, written to " +
                              (artifacts / "threshold_sweep.csv").string() +
                              (found.empty() ? std::string(", no crossing found") : found)};
}

// Number of successes in n Bernoulli(p) trials.
std::uint64_t bernoulli_count(double p, std::uint64_t n, CounterRng& rng) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < n; ++i) k += rng.uniform() < p;
  return k;
}

double sample_sd(const std::vector<double>& xs) {
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Outcome variance_law() {
  // True per-factor heavy probabilities of 100 quito-noised m=3 circuits.
  const std::vector<double> lambdas{1, 3, 5, 7, 9};
  const auto coeffs = richardson_coefficients(lambdas);
  const std::uint64_t shots = 2000, shots_k1 = 10000;
  const std::size_t n_c = 100;
  std::vector<std::vector<double>> truth;
  for (std::size_t i = 0; i < n_c; ++i) {
    const auto model = generate_qv_circuit(3, substream(0x5A11, i));
    const HeavySet hs = compute_heavy_set(ideal_probabilities(model));
    const Circuit base = decompose_to_cnots(model).first;
    std::vector<double> t;
    for (double l : lambdas) t.push_back(noisy_expectation(fold_circuit(base, static_cast<int>(l)), noise_presets::quito(), hs));
    truth.push_back(t);
  }

  CounterRng rng(0x7A7A);
  std::vector<double> h_mit, h_k1, sig_mit, sig_k1;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> e_c, f_k1, var_mit, var_k1;
    for (const auto& t : truth) {
      CircuitEstimate est;
      std::vector<double> fractions;
      for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const double f = static_cast<double>(bernoulli_count(t[j], shots, rng)) / shots;
        fractions.push_back(f);
        est.per_factor.push_back({lambdas[j], f, shots});
      }
      e_c.push_back(extrapolate(fractions, coeffs));
      var_mit.push_back(analytic_variance_circuit(est, coeffs));
      const double f1 = static_cast<double>(bernoulli_count(t[0], shots_k1, rng)) / shots_k1;
      f_k1.push_back(f1);
      var_k1.push_back(analytic_variance_circuit(CircuitEstimate{f1, {{1.0, f1, shots_k1}}},
                                                 RichardsonCoefficients{{1.0}}));
    }
    h_mit.push_back(mean(e_c));
    h_k1.push_back(mean(f_k1));
    sig_mit.push_back(std::sqrt(analytic_variance_total(var_mit)));
    sig_k1.push_back(std::sqrt(analytic_variance_total(var_k1)));
  }
  const double ratio_mit = mean(sig_mit) / sample_sd(h_mit);
  const double ratio_k1 = mean(sig_k1) / sample_sd(h_k1);

  // With one factor the law is p(1-p)/n exactly.
  double binomial_err = 0.0;
  for (double p : {0.0, 0.1, 0.5, 0.73, 1.0})
    for (std::uint64_t n : {1ULL, 17ULL, 10000ULL}) {
      const double v = analytic_variance_circuit(CircuitEstimate{p, {{1.0, p, n}}}, RichardsonCoefficients{{1.0}});
      binomial_err = std::max(binomial_err, std::abs(v - p * (1 - p) / static_cast<double>(n)));
    }
  const bool ok = std::abs(ratio_mit - 1.0) <= kVarianceTolerance &&
                  std::abs(ratio_k1 - 1.0) <= kVarianceTolerance && binomial_err == 0.0;
  return {ok, fmt("200 synthetic experiments: analytic/empirical sigma = %.3f (k=5), %.3f (k=1); "
                  "k=1 vs p(1-p)/n max error %.1e (tol %.0f%%)",
                  ratio_mit, ratio_k1, binomial_err, kVarianceTolerance * 100)};
}

Outcome bootstrap_convergence_check() {
  const auto& rec = quito_record();
  const SizeResult& s = rec.sizes.back();
  const auto values = per_circuit_values(s, Mode::mitigated);
  const auto sweep = bootstrap_convergence(values, convergence_resample_counts(),
                                           bootstrap_seed(rec.config.seed, s.num_qubits, Mode::mitigated));
  const double reference = sweep.back().second;
  double lo = reference, hi = reference;
  for (const auto& [n, sigma] : sweep)
    if (n >= 400) {
      lo = std::min(lo, sigma);
      hi = std::max(hi, sigma);
    }
  const double spread = (hi - lo) / reference;
  return {spread < kConvergenceTolerance,
          fmt("m=%zu mitigated, sigma(N>=400) in [%.5f, %.5f], relative spread %.3f (tol %.2f)",
              s.num_qubits, lo, hi, spread, kConvergenceTolerance)};
}

Outcome budget_audit() {
  const auto& rec = quito_record();
  const std::uint64_t per_factor = allocate_shots(rec.config.n_s, rec.config.scale_factors.size());
  std::size_t audited = 0, violations = 0;
  for (const auto& s : rec.sizes)
    for (const auto& c : s.circuits) {
      ++audited;
      std::uint64_t total = 0;
      bool ok = c.mitigated.size() == 5;
      for (const auto& f : c.mitigated) {
        total += f.counts.total_shots();
        ok &= f.counts.total_shots() == per_factor;
      }
      ok &= total == 10000 && c.unmitigated && c.unmitigated->counts.total_shots() == total;
      violations += !ok;
    }
  return {violations == 0 && audited == 400 && per_factor == 2000,
          fmt("%zu circuits audited, %llu shots per factor, %zu violations", audited,
              static_cast<unsigned long long>(per_factor), violations)};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome round_trip(const fs::path& artifacts) {
  ExperimentConfig c = quito_config();
  c.m_values = {2, 3};
  const fs::path out = artifacts / "round_trip_results.json";
  fs::remove(out);
  const auto run = run_experiment(c, RunOptions{out, {}});
  const std::string persisted = read_text(out);
  const auto ingested = ingest_external_counts(out);

  bool stats_equal = ingested.sizes.size() == run.sizes.size();
  for (std::size_t i = 0; stats_equal && i < run.sizes.size(); ++i)
    stats_equal = stats_to_json(*run.sizes[i].unmitigated) == stats_to_json(*ingested.sizes[i].unmitigated) &&
                  stats_to_json(*run.sizes[i].mitigated) == stats_to_json(*ingested.sizes[i].mitigated);
  stats_equal &= volume_to_json(run.unmitigated_volume) == volume_to_json(ingested.unmitigated_volume) &&
                 volume_to_json(run.mitigated_volume) == volume_to_json(ingested.mitigated_volume);
  const std::string again = dump_record(ingested);
  const bool bytes_stable = again == persisted && dump_record(ingest_external_counts(json::parse(again))) == again;
  return {stats_equal && bytes_stable,
          fmt("aggregates %s, re-serialization %s (%zu bytes)", stats_equal ? "identical" : "DIFFER",
              bytes_stable ? "byte-identical" : "DIFFERS", persisted.size())};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path artifacts = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
  fs::create_directories(artifacts);

  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"AC1 noiseless asymptote", noiseless_asymptote},
      {"AC2 Richardson exactness", richardson_exactness},
      {"AC3 fold unitarity", fold_unitarity},
      {"AC4 KAK soundness", kak_soundness},
      {"AC5 mitigation lifts h_d", mitigation_lifts},
      {"AC6 threshold crossing", [&] { return threshold_crossing(artifacts); }},
      {"AC7 variance law", variance_law},
      {"AC8 bootstrap convergence", bootstrap_convergence_check},
      {"AC9 budget fairness", budget_audit},
      {"AC10 round trip", [&] { return round_trip(artifacts); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.passed;
    std::printf("[%s] %s: %s\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
