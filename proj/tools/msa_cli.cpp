// Copyright 2026 The MSA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// msa: config-driven experiment runner.
//
//   msa run <config.yaml> [--out DIR] [--threads N] [--export-forward PATH]
//                         [--import-forward PATH] [--dump-coeffs]
//
// Exit codes: 0 success, 2 usage/config, 3 geometry, 4 solver, 5 file format
// or I/O, 6 numerical domain/index, 1 anything else.

#include <iostream>

#include <CLI11.hpp>

#include "msa/experiment.hpp"

namespace {

int report(const char* category, int code, const std::exception& e) {
  std::cerr << "msa: " << category << " error: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-scattering ambisonics encoding experiments"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run one experiment config");
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::string export_path;
  std::string import_path;
  bool dump_coeffs = false;
  run->add_option("config", config_path, "Experiment config (YAML)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--export-forward", export_path, "Write the coupled forward operator to this file");
  run->add_option("--import-forward", import_path, "Reuse a forward operator written by --export-forward");
  run->add_flag("--dump-coeffs", dump_coeffs, "Also write the estimated coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    msa::RunOptions opt;
    if (!out_dir.empty()) opt.output = out_dir;
    if (threads > 0) opt.threads = threads;
    if (!export_path.empty()) opt.export_forward = export_path;
    if (!import_path.empty()) opt.import_forward = import_path;
    opt.dump_coeffs = dump_coeffs;
    const msa::ExperimentConfig cfg = msa::validate_config(msa::detail::read_file(config_path));
    const msa::RunResult res = run_experiment(cfg, opt);
    std::cout << res.summary["method"].get<std::string>() << ": SSA " << res.report.ssa << " m^2, max SDR "
              << res.report.max_sdr << " dB, mean SDR " << res.report.mean_sdr << " dB -> "
              << res.output_dir.string() << "\n";
    return 0;
  } catch (const msa::ConfigError& e) {
    return report("config", 2, e);
  } catch (const msa::GeometryError& e) {
    return report("geometry", 3, e);
  } catch (const msa::SolverError& e) {
    return report("solver", 4, e);
  } catch (const msa::FormatError& e) {
    return report("format", 5, e);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("io", 5, e);
  } catch (const msa::DomainError& e) {
    return report("domain", 6, e);
  } catch (const msa::IndexError& e) {
    return report("index", 6, e);
  } catch (const std::exception& e) {
    return report("internal", 1, e);
  }
}
