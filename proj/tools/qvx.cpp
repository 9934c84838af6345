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

// qvx: quantum-volume benchmark with zero-noise extrapolation.
//
//   qvx run --config cfg.json [--m 2..6] [--noise quito] [--mode both] [--seed 42] [--out results.json]
//   qvx ingest counts.json --out results.json
//   qvx plot results.json --out-dir plots/
//   qvx volume results.json

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qvx/qvx.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitFailure = 1;

qvx::ExperimentRecord load_record(const std::string& path) {
  return qvx::ingest_external_counts(qvx::read_json_file(path));
}

void print_volume(const qvx::ExperimentRecord& record) {
  std::printf("%-4s %-12s %10s %10s %10s  %s\n", "m", "mode", "h_d", "2sigma", "sigma_an", "result");
  for (const auto& s : record.sizes) {
    for (auto mode : {qvx::Mode::unmitigated, qvx::Mode::mitigated}) {
      const auto& st = mode == qvx::Mode::unmitigated ? s.unmitigated : s.mitigated;
      if (!st) continue;
      // Extrapolated averages can leave [0, 1]; clamp for display only.
      const double shown = std::clamp(st->h_d, 0.0, 1.0);
      std::printf("%-4zu %-12s %10.5f %10.5f %10.5f  %s%s\n", s.num_qubits,
                  qvx::to_string(mode).c_str(), shown, 2 * st->sigma_bootstrap,
                  st->sigma_analytic, st->passed ? "pass" : "fail",
                  st->conformant ? "" : " (non-conformant: n_c < 100)");
    }
  }
  auto summary = [](const char* name, const std::optional<qvx::VolumeSummary>& v) {
    if (!v) return;
    if (v->volume) {
      std::printf("%s volume: %zu (log2 QV), max passing m: %zu\n", name, *v->volume, v->max_passing_m);
    } else {
      std::printf("%s volume: undetermined (range not contiguous from m=2), max passing m: %zu\n",
                  name, v->max_passing_m);
    }
  };
  summary("unmitigated", record.unmitigated_volume);
  summary("mitigated (effective)", record.mitigated_volume);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-volume benchmark with zero-noise extrapolation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate unmitigated and/or mitigated QV experiments");
  std::string config_path, m_range, noise_name, mode_name, out_path = "results.json", scale_factors;
  std::optional<std::uint64_t> seed, n_s;
  std::optional<std::size_t> n_c, resamples, threads;
  bool group_split = false, timing = false;
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--m", m_range, "Qubit counts, e.g. 2..6 or 2,3,4");
  run->add_option("--noise", noise_name, "Noise preset (lima, belem, quito, ideal) or JSON file");
  run->add_option("--mode", mode_name, "unmitigated, mitigated or both");
  run->add_option("--seed", seed, "Master seed");
  run->add_option("--n-c", n_c, "Circuits per qubit count");
  run->add_option("--n-s", n_s, "Total shots per circuit");
  run->add_option("--scale-factors", scale_factors, "Comma-separated odd scale factors");
  run->add_option("--resamples", resamples, "Bootstrap resamples");
  run->add_option("--threads", threads, "Worker threads");
  run->add_flag("--group-split", group_split, "Also report the five-group split sigma");
  run->add_flag("--timing", timing, "Embed wall-clock time in the record");
  run->add_option("--out", out_path, "Results JSON path");

  auto* ingest = app.add_subcommand("ingest", "Analyze externally measured counts");
  std::string ingest_path, ingest_out = "results.json";
  ingest->add_option("counts", ingest_path, "External counts JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Results JSON path");

  auto* plot = app.add_subcommand("plot", "Export CSV plot data from a results file");
  std::string plot_path, plot_dir = "plots";
  plot->add_option("results", plot_path, "Results JSON")->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_dir, "Output directory");

  auto* volume = app.add_subcommand("volume", "Report the achieved volume from a results file");
  std::string volume_path;
  volume->add_option("results", volume_path, "Results JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*run) {
      qvx::ExperimentConfig config;
      if (!config_path.empty()) config = qvx::config_from_json(qvx::read_json_file(config_path));
      if (!m_range.empty()) config.m_values = qvx::parse_m_range(m_range);
      if (!noise_name.empty()) {
        if (auto preset = qvx::noise_presets::by_name(noise_name)) {
          config.noise = *preset;
        } else if (std::filesystem::exists(noise_name)) {
          config.noise = qvx::noise_from_json(qvx::read_json_file(noise_name));
        } else {
          throw qvx::ValidationError("--noise: unknown preset or file '" + noise_name + "'");
        }
      }
      if (!mode_name.empty()) config.mode = qvx::mode_from_string(mode_name);
      if (seed) config.seed = *seed;
      if (n_c) config.n_c = *n_c;
      if (n_s) config.n_s = *n_s;
      if (!scale_factors.empty()) config.scale_factors = qvx::parse_scale_factors(scale_factors);
      if (resamples) config.n_resamples = *resamples;
      if (threads) config.threads = std::max<std::size_t>(1, *threads);
      if (group_split) config.group_split = true;
      config.record_timing = timing;

      qvx::RunOptions options;
      options.out_path = out_path;
      options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
      const auto record = qvx::run_experiment(config, options);
      print_volume(record);
      std::cerr << "wrote " << out_path << '\n';
    } else if (*ingest) {
      const auto record = qvx::ingest_external_counts(std::filesystem::path(ingest_path));
      qvx::write_text_atomically(ingest_out, qvx::dump_record(record));
      print_volume(record);
      std::cerr << "wrote " << ingest_out << '\n';
    } else if (*plot) {
      for (const auto& p : qvx::emit_plot_data(load_record(plot_path), plot_dir))
        std::cout << p.string() << '\n';
    } else if (*volume) {
      print_volume(load_record(volume_path));
    }
  } catch (const qvx::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
