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

// Reconstruction on planar grids, SDR maps, sweet-spot area and
// hyperparameter searches.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "msa/encode.hpp"
#include "msa/parallel.hpp"
#include "msa/scene.hpp"

namespace msa {

/// Planar pixel grid. Pixel (iu, iv) has its center at the lower-left corner
/// plus ((iu + 0.5), (iv + 0.5)) * resolution in plane coordinates (u, v);
/// the third coordinate is `offset`.
struct GridSpec {
  Plane plane = Plane::xy;
  double offset = 0.0;
  double center_u = 0.0;
  double center_v = 0.0;
  double width = 2.0;
  double height = 2.0;
  double resolution = 0.005;

  int nu() const { return static_cast<int>(std::lround(width / resolution)); }
  int nv() const { return static_cast<int>(std::lround(height / resolution)); }
  double pixel_area() const { return resolution * resolution; }
  double corner_u() const { return center_u - 0.5 * width; }
  double corner_v() const { return center_v - 0.5 * height; }

  Vec3 pixel_center(int iu, int iv) const {
    const double u = corner_u() + (iu + 0.5) * resolution;
    const double v = corner_v() + (iv + 0.5) * resolution;
    switch (plane) {
      case Plane::xy: return {u, v, offset};
      case Plane::yz: return {offset, u, v};
      case Plane::xz: return {u, offset, v};
    }
    return {u, v, offset};
  }

  void validate() const {
    if (!(resolution > 0.0) || !(width > 0.0) || !(height > 0.0)) throw ConfigError("grid extent and resolution must be > 0");
    if (nu() < 1 || nv() < 1) throw ConfigError("grid has no pixels");
  }

  bool congruent(const GridSpec& o) const {
    return plane == o.plane && offset == o.offset && center_u == o.center_u && center_v == o.center_v &&
           nu() == o.nu() && nv() == o.nv() && resolution == o.resolution;
  }
};

/// Complex samples; values(iv, iu), i.e. one row per v line.
struct FieldGrid {
  GridSpec spec;
  ComplexMatrix values;
};

using PixelMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SdrReport {
  Eigen::MatrixXd sdr;  // dB, same shape as the field grids
  PixelMask mask;       // true where the pixel is excluded
  double threshold = 30.0;
  double pixel_area = 0.0;
  double ssa = 0.0;     // m^2
  double max_sdr = 0.0;
  double mean_sdr = 0.0;
};

inline constexpr double kSdrCap = 150.0;

namespace detail {
template <typename Fn>
FieldGrid fill_grid(const GridSpec& spec, unsigned threads, Fn&& value_at) {
  spec.validate();
  FieldGrid g{spec, ComplexMatrix(spec.nv(), spec.nu())};
  parallel_for(static_cast<std::size_t>(spec.nv()), threads, [&](std::size_t iv) {
    for (int iu = 0; iu < spec.nu(); ++iu) {
      g.values(static_cast<Eigen::Index>(iv), iu) = value_at(spec.pixel_center(iu, static_cast<int>(iv)));
    }
  });
  return g;
}
}  // namespace detail

/// Sum_l A_l j_n(k|r - center|) Y_l at every pixel center.
inline FieldGrid reconstruct_field(const CoefficientVector& a, const GridSpec& spec, const Vec3& center = Vec3::Zero(),
                                   unsigned threads = 1) {
  return detail::fill_grid(spec, threads, [&](const Vec3& r) { return eval_expansion(BasisKind::regular, a, r, center); });
}

inline FieldGrid ground_truth_field(const IncidentSource& source, double k, const GridSpec& spec, unsigned threads = 1) {
  return detail::fill_grid(spec, threads, [&](const Vec3& r) { return incident_field(source, k, r); });
}

/// True for pixels strictly inside any sphere.
inline PixelMask sphere_mask(const GridSpec& spec, const std::vector<RsmaSpec>& spheres) {
  PixelMask mask = PixelMask::Constant(spec.nv(), spec.nu(), false);
  for (int iv = 0; iv < spec.nv(); ++iv) {
    for (int iu = 0; iu < spec.nu(); ++iu) {
      const Vec3 r = spec.pixel_center(iu, iv);
      for (const auto& s : spheres) {
        if ((r - s.center).norm() < s.radius) {
          mask(iv, iu) = true;
          break;
        }
      }
    }
  }
  return mask;
}

/// 10 log10(|p_true|^2 / |p_est - p_true|^2), clamped to [-150, 150] dB.
inline double sdr_value(Complex estimate, Complex truth) {
  const double signal = std::norm(truth);
  const double error = std::norm(estimate - truth);
  if (error == 0.0) return kSdrCap;
  if (signal == 0.0) return -kSdrCap;
  return std::clamp(10.0 * std::log10(signal / error), -kSdrCap, kSdrCap);
}

inline SdrReport sdr_map(const FieldGrid& estimate, const FieldGrid& truth, const PixelMask& mask,
                         double threshold = 30.0) {
  if (!estimate.spec.congruent(truth.spec) || estimate.values.rows() != truth.values.rows() ||
      estimate.values.cols() != truth.values.cols()) {
    throw IndexError("SDR needs congruent grids");
  }
  if (mask.rows() != truth.values.rows() || mask.cols() != truth.values.cols()) {
    throw IndexError("mask shape does not match the grids");
  }
  SdrReport rep;
  rep.threshold = threshold;
  rep.mask = mask;
  rep.pixel_area = truth.spec.pixel_area();
  rep.sdr.resize(truth.values.rows(), truth.values.cols());
  std::size_t above = 0, counted = 0;
  double sum = 0.0;
  rep.max_sdr = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rep.sdr.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.sdr.cols(); ++j) {
      const double v = sdr_value(estimate.values(i, j), truth.values(i, j));
      rep.sdr(i, j) = v;
      if (mask(i, j)) continue;
      ++counted;
      sum += v;
      rep.max_sdr = std::max(rep.max_sdr, v);
      if (v > threshold) ++above;
    }
  }
  rep.mean_sdr = counted ? sum / static_cast<double>(counted) : 0.0;
  if (!counted) rep.max_sdr = 0.0;
  rep.ssa = static_cast<double>(above) * rep.pixel_area;
  return rep;
}

/// SSA recomputed at a different threshold.
inline double sweet_spot_area(const SdrReport& rep, double threshold) {
  std::size_t above = 0;
  for (Eigen::Index i = 0; i < rep.sdr.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.sdr.cols(); ++j) {
      if (!rep.mask(i, j) && rep.sdr(i, j) > threshold) ++above;
    }
  }
  return static_cast<double>(above) * rep.pixel_area;
}

template <typename Param>
struct SearchResult {
  Param best;
  SdrReport report;
  std::vector<std::pair<Param, double>> trace;  // (parameter, SSA) in evaluation order
};

/// Grid search maximizing SSA; ties go to the larger sigma.
template <typename Evaluate>
SearchResult<double> regularization_search(std::span<const double> sigmas, Evaluate&& evaluate) {
  if (sigmas.empty()) throw ConfigError("empty sigma grid");
  std::optional<SearchResult<double>> best;
  std::vector<std::pair<double, double>> trace;
  for (const double sigma : sigmas) {
    SdrReport rep = evaluate(sigma);
    trace.emplace_back(sigma, rep.ssa);
    if (!best || rep.ssa > best->report.ssa || (rep.ssa == best->report.ssa && sigma > best->best)) {
      best = SearchResult<double>{sigma, std::move(rep), {}};
    }
  }
  best->trace = std::move(trace);
  return std::move(*best);
}

struct HoaSearchOptions {
  double sigma_relative = 0.0;  // sigma = sigma_relative * |Lambda|_2^2
  int data_truncation = -1;     // degree of the synthetic capsule data; -1 picks one from k a
  double threshold = 30.0;
  unsigned threads = 1;
  std::vector<RsmaSpec> extra_mask;  // further spheres whose interior is excluded
};

/// Incident-field coefficients about `center` instead of the origin.
inline CoefficientVector incident_coeffs_about(const IncidentSource& source, double k, int N, const Vec3& center) {
  if (const auto* pw = std::get_if<PlaneWave>(&source)) {
    CoefficientVector a = plane_wave_coeffs(pw->direction, k, N);
    a.values() *= std::polar(1.0, k * pw->direction.dot(center));
    return a;
  }
  const auto& mono = std::get<Monopole>(source);
  return monopole_coeffs(mono.position - center, mono.amplitude, k, N);
}

/// Conventional encoding with one isolated array: synthesizes capsule data
/// for `source`, encodes at each candidate truncation and keeps the one with
/// the largest SSA (ties to the smaller truncation).
inline SearchResult<int> best_truncation_search(const RsmaSpec& sphere, const IncidentSource& source, double k,
                                                std::span<const int> truncations, const GridSpec& spec,
                                                const HoaSearchOptions& opt = {}) {
  if (truncations.empty()) throw ConfigError("empty truncation range");
  const int n_max = *std::max_element(truncations.begin(), truncations.end());
  const int n_data = opt.data_truncation >= 0
                         ? opt.data_truncation
                         : n_max + 10 + static_cast<int>(std::ceil(std::numbers::e * k * sphere.radius));
  const CoefficientVector a_true = incident_coeffs_about(source, k, n_data, sphere.center);
  const ComplexVector pressure = surface_response_matrix(sphere, k, n_data) * a_true.values();
  const FieldGrid truth = ground_truth_field(source, k, spec, opt.threads);
  std::vector<RsmaSpec> masked = opt.extra_mask;
  masked.push_back(sphere);
  const PixelMask mask = sphere_mask(spec, masked);

  std::optional<SearchResult<int>> best;
  std::vector<std::pair<int, double>> trace;
  for (const int n : truncations) {
    double sigma = 0.0;
    if (opt.sigma_relative > 0.0) {
      const double top = Eigen::JacobiSVD<ComplexMatrix>(surface_response_matrix(sphere, k, n)).singularValues()(0);
      sigma = opt.sigma_relative * top * top;
    }
    const Encoder enc = hoa_encoder(sphere, k, n, sigma);
    const CoefficientVector est = apply_encoder(enc, pressure);
    SdrReport rep = sdr_map(reconstruct_field(est, spec, sphere.center, opt.threads), truth, mask, opt.threshold);
    trace.emplace_back(n, rep.ssa);
    if (!best || rep.ssa > best->report.ssa || (rep.ssa == best->report.ssa && n < best->best)) {
      best = SearchResult<int>{n, std::move(rep), {}};
    }
  }
  best->trace = std::move(trace);
  return std::move(*best);
}

}  // namespace msa
