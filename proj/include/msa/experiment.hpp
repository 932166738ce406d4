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

// End-to-end experiment: source coefficients -> capsule pressures ->
// encoder -> reconstruction -> SDR map, with file outputs.

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msa/config.hpp"
#include "msa/io.hpp"

namespace msa {

struct RunOptions {
  std::optional<std::filesystem::path> output;  // overrides the config's output directory
  std::optional<unsigned> threads;              // overrides the config's thread count
  std::optional<std::filesystem::path> export_forward;
  std::optional<std::filesystem::path> import_forward;
  bool dump_coeffs = false;
  bool write_files = true;
};

struct RunResult {
  nlohmann::json summary;  // deterministic content
  nlohmann::json timing;   // wall-clock seconds per stage
  FieldGrid truth;
  FieldGrid estimate;
  SdrReport report;
  CoefficientVector coefficients{0.0, 0};
  std::filesystem::path output_dir;
};

namespace detail {

class StageClock {
 public:
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    timing_[stage] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  nlohmann::json finish() {
    timing_["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return timing_;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point last_ = start_;
  nlohmann::json timing_ = nlohmann::json::object();
};

inline GridSpec search_grid(const ExperimentConfig& cfg) {
  GridSpec g = cfg.grid;
  if (cfg.search_resolution) g.resolution = *cfg.search_resolution;
  g.validate();
  return g;
}

inline nlohmann::json trace_json(const auto& trace) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [param, ssa] : trace) out.push_back({param, ssa});
  return out;
}

inline std::string coefficients_csv(const CoefficientVector& a, Method method, std::uint64_t config_hash) {
  std::string out = "# method=" + std::string(to_string(method)) + "\n";
  out += "# truncation=" + std::to_string(a.truncation()) + " k=" + format_double(a.wavenumber()) + "\n";
  out += "# config_hash=" + hex_hash(config_hash) + "\n";
  out += "n,m,re,im\n";
  for (int n = 0; n <= a.truncation(); ++n) {
    for (int m = -n; m <= n; ++m) {
      const Complex v = a(n, m);
      out += std::to_string(n) + "," + std::to_string(m) + "," + format_double(v.real()) + "," +
             format_double(v.imag()) + "\n";
    }
  }
  return out;
}

}  // namespace detail

/// The isolated single-array baseline: the building-block array at the origin.
inline RsmaSpec hoa_baseline_sphere(const SceneConfig& scene) {
  RsmaSpec s = scene.spheres.front();
  s.center = Vec3::Zero();
  return s;
}

inline RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  const unsigned threads = opt.threads.value_or(cfg.threads);
  const std::uint64_t config_hash = cfg.hash();
  const SceneConfig& scene = cfg.scene;
  const double k = scene.wavenumber();
  detail::StageClock clock;

  RunResult res;
  res.output_dir = opt.output.value_or(std::filesystem::path(cfg.output));
  nlohmann::json summary;
  summary["config_hash"] = hex_hash(config_hash);
  summary["method"] = to_string(cfg.method);
  summary["frequency_hz"] = scene.frequency;
  summary["wavenumber"] = k;
  summary["sound_speed"] = scene.sound_speed;
  summary["spheres"] = scene.spheres.size();
  summary["capsules"] = scene.total_capsules();
  summary["threshold_db"] = cfg.threshold;

  const CoefficientVector a_in = incident_coeffs(scene.source, k, scene.n_in);
  res.truth = ground_truth_field(scene.source, k, cfg.grid, threads);
  std::vector<RsmaSpec> masked = scene.spheres;
  clock.mark("ground_truth");

  if (cfg.method == Method::hoa) {
    if (opt.export_forward || opt.import_forward) {
      throw ConfigError("--export-forward/--import-forward apply to the Single and MSHOA methods");
    }
    const RsmaSpec sphere = hoa_baseline_sphere(scene);
    masked.push_back(sphere);
    int best = cfg.hoa.truncations.front();
    if (cfg.hoa.truncations.size() > 1) {
      HoaSearchOptions hopt;
      hopt.sigma_relative = cfg.hoa.sigma_relative;
      hopt.data_truncation = scene.n_in;
      hopt.threshold = cfg.threshold;
      hopt.threads = threads;
      hopt.extra_mask = scene.spheres;
      const auto search = best_truncation_search(sphere, scene.source, k, cfg.hoa.truncations, detail::search_grid(cfg), hopt);
      best = search.best;
      summary["truncation_search"] = detail::trace_json(search.trace);
      clock.mark("truncation_search");
    }
    const ComplexVector pressure = surface_response_matrix(sphere, k, scene.n_in) * a_in.values();
    double sigma = 0.0;
    if (cfg.hoa.sigma_relative > 0.0) {
      const double top = Eigen::JacobiSVD<ComplexMatrix>(surface_response_matrix(sphere, k, best)).singularValues()(0);
      sigma = cfg.hoa.sigma_relative * top * top;
    }
    const Encoder enc = hoa_encoder(sphere, k, best, sigma);
    res.coefficients = apply_encoder(enc, pressure);
    summary["truncation"] = {{"hoa", best}, {"incident", scene.n_in}};
    summary["sigma"] = sigma;
    clock.mark("encode");
  } else {
    const Coupling coupling = cfg.method == Method::mshoa ? Coupling::multiple : Coupling::single;
    // Capsule data always come from the fully coupled model.
    ForwardOperator data_op;
    const std::uint64_t scene_hash = scene.hash();
    if (opt.import_forward) {
      const TaggedMatrix t = import_matrix(*opt.import_forward, static_cast<Eigen::Index>(scene.total_capsules()),
                                           coefficient_count(scene.n_in));
      if (t.tag != scene_hash) {
        throw FormatError("forward operator in " + opt.import_forward->string() + " was built for scene " +
                          hex_hash(t.tag) + ", this scene is " + hex_hash(scene_hash));
      }
      data_op.matrix = t.matrix;
      data_op.n_in = scene.n_in;
      data_op.scene_hash = scene_hash;
      clock.mark("forward_import");
    } else {
      const ForwardModel model(scene, Coupling::multiple);
      data_op = forward_operator(model, threads);
      summary["system_rcond"] = model.rcond();
      clock.mark("forward_operator");
    }
    if (opt.export_forward) export_matrix(*opt.export_forward, data_op.matrix, scene_hash);
    const ComplexVector pressure = data_op.matrix * a_in.values();

    ForwardOperator enc_op;
    if (coupling == Coupling::multiple) {
      enc_op = std::move(data_op);
    } else {
      const ForwardModel single(scene, Coupling::single);
      enc_op = forward_operator(single, threads);
      summary["single_rcond"] = single.rcond();
    }
    const RidgeFamily family(enc_op.matrix, threads);
    const double scale = family.spectral_norm_squared();
    const auto& ev = family.gram_eigenvalues();
    summary["operator_norm_squared"] = scale;
    summary["operator_condition"] = ev.minCoeff() > 0.0 ? std::sqrt(ev.maxCoeff() / ev.minCoeff())
                                                        : std::numeric_limits<double>::infinity();
    clock.mark("factorize");

    double sigma = cfg.regularization.relative ? cfg.regularization.sigma * scale : cfg.regularization.sigma;
    if (cfg.regularization.search) {
      const auto& s = *cfg.regularization.search;
      const auto sigmas = log_sigma_grid(s.relative ? scale : 1.0, s.min, s.max, s.points);
      const GridSpec sg = detail::search_grid(cfg);
      const FieldGrid truth_s = ground_truth_field(scene.source, k, sg, threads);
      const PixelMask mask_s = sphere_mask(sg, masked);
      const auto search = regularization_search(sigmas, [&](double sg_sigma) {
        const CoefficientVector a(k, scene.n_in, family.solve(pressure, sg_sigma));
        return sdr_map(reconstruct_field(a, sg, Vec3::Zero(), threads), truth_s, mask_s, cfg.threshold);
      });
      sigma = search.best;
      summary["sigma_search"] = detail::trace_json(search.trace);
      clock.mark("sigma_search");
    }
    res.coefficients = CoefficientVector(k, scene.n_in, family.solve(pressure, sigma));
    summary["truncation"] = {{"incident", scene.n_in}, {"forward", scene.n_fwd}};
    summary["sigma"] = sigma;
    summary["sigma_relative"] = scale > 0.0 ? sigma / scale : 0.0;
    clock.mark("encode");
  }

  res.estimate = reconstruct_field(res.coefficients, cfg.grid, Vec3::Zero(), threads);
  res.report = sdr_map(res.estimate, res.truth, sphere_mask(cfg.grid, masked), cfg.threshold);
  clock.mark("reconstruct");

  summary["ssa_m2"] = res.report.ssa;
  summary["max_sdr_db"] = res.report.max_sdr;
  summary["mean_sdr_db"] = res.report.mean_sdr;
  summary["grid"] = {{"plane", to_string(cfg.grid.plane)},
                     {"offset", cfg.grid.offset},
                     {"center", {cfg.grid.center_u, cfg.grid.center_v}},
                     {"width", cfg.grid.width},
                     {"height", cfg.grid.height},
                     {"resolution", cfg.grid.resolution},
                     {"pixels", {cfg.grid.nu(), cfg.grid.nv()}}};
  res.summary = std::move(summary);

  if (opt.write_files) {
    const auto& dir = res.output_dir;
    std::filesystem::create_directories(dir);
    write_text(dir / "ground_truth.csv", field_csv(res.truth, config_hash));
    write_text(dir / "estimate.csv", field_csv(res.estimate, config_hash));
    write_text(dir / "sdr.csv", sdr_csv(res.report, cfg.grid, config_hash));
    export_matrix(dir / "ground_truth.bin", res.truth.values, config_hash);
    export_matrix(dir / "estimate.bin", res.estimate.values, config_hash);
    ComplexMatrix sdr = res.report.sdr.cast<Complex>();
    for (Eigen::Index i = 0; i < sdr.rows(); ++i) {
      for (Eigen::Index j = 0; j < sdr.cols(); ++j) {
        if (res.report.mask(i, j)) sdr(i, j) = std::numeric_limits<double>::quiet_NaN();
      }
    }
    export_matrix(dir / "sdr.bin", sdr, config_hash);
    if (opt.dump_coeffs) {
      write_text(dir / "coefficients.csv", detail::coefficients_csv(res.coefficients, cfg.method, config_hash));
      export_matrix(dir / "coefficients.bin", res.coefficients.values(), config_hash);
    }
    write_text(dir / "summary.json", res.summary.dump(2) + "\n");
    clock.mark("write");
  }
  res.timing = clock.finish();
  res.timing["config_hash"] = hex_hash(config_hash);
  res.timing["threads"] = threads;
  if (opt.write_files) write_text(res.output_dir / "timing.json", res.timing.dump(2) + "\n");
  return res;
}

}  // namespace msa
