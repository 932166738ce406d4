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

// Geometry of rigid spherical microphone arrays and incident-field sources.

#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "msa/basis.hpp"

namespace msa {

/// One rigid spherical microphone array: capsule q sits at
/// center + radius * capsule_dirs[q].
struct RsmaSpec {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<Vec3> capsule_dirs;

  std::size_t capsule_count() const { return capsule_dirs.size(); }
  Vec3 capsule_position(std::size_t q) const { return center + radius * capsule_dirs[q]; }

  void validate() const {
    if (!(radius > 0.0)) throw GeometryError("sphere radius must be > 0");
    if (capsule_dirs.empty()) throw GeometryError("sphere needs at least one capsule");
    for (const auto& d : capsule_dirs) {
      if (std::abs(d.norm() - 1.0) > 1e-12) throw GeometryError("capsule direction is not unit norm");
    }
    for (std::size_t i = 0; i < capsule_dirs.size(); ++i) {
      for (std::size_t j = i + 1; j < capsule_dirs.size(); ++j) {
        if ((capsule_dirs[i] - capsule_dirs[j]).norm() < 1e-12) {
          throw GeometryError("capsules " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
      }
    }
  }
};

struct PlaneWave {
  Vec3 direction = Vec3::UnitZ();  // propagation direction, unit norm
};

/// Point source with kernel amplitude * e^{ikd} / (4 pi d).
struct Monopole {
  Vec3 position = Vec3::Zero();
  Complex amplitude{1.0, 0.0};
};

using IncidentSource = std::variant<PlaneWave, Monopole>;

enum class IncidentEvaluation {
  direct,      // p_in at capsules from the global expansion about the origin
  translated,  // p_in from the per-sphere translated (and truncated) expansion
};

struct SceneConfig {
  std::vector<RsmaSpec> spheres;
  IncidentSource source = PlaneWave{};
  double frequency = 1000.0;
  double sound_speed = 343.0;
  int n_in = 10;
  int n_fwd = 10;
  double sigma = 0.0;
  IncidentEvaluation incident_eval = IncidentEvaluation::direct;

  double wavenumber() const { return 2.0 * kPi * frequency / sound_speed; }

  std::size_t total_capsules() const {
    return std::accumulate(spheres.begin(), spheres.end(), std::size_t{0},
                           [](std::size_t acc, const RsmaSpec& s) { return acc + s.capsule_count(); });
  }

  // First row of sphere s in stacked capsule vectors.
  std::size_t capsule_offset(std::size_t s) const {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < s; ++i) offset += spheres[i].capsule_count();
    return offset;
  }

  void validate() const {
    if (spheres.empty()) throw GeometryError("scene needs at least one sphere");
    if (!(frequency > 0.0) || !(sound_speed > 0.0)) throw GeometryError("frequency and sound speed must be > 0");
    if (n_in < 0 || n_fwd < 0) throw GeometryError("truncation degrees must be >= 0");
    if (!(sigma >= 0.0)) throw GeometryError("regularization must be >= 0");
    for (const auto& s : spheres) s.validate();
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      for (std::size_t j = i + 1; j < spheres.size(); ++j) {
        const double dist = (spheres[i].center - spheres[j].center).norm();
        if (!(dist > spheres[i].radius + spheres[j].radius)) {
          throw GeometryError("spheres " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
      }
    }
    if (const auto* mono = std::get_if<Monopole>(&source)) {
      if (mono->position.norm() == 0.0) throw GeometryError("monopole source at the expansion origin");
      for (std::size_t i = 0; i < spheres.size(); ++i) {
        if ((mono->position - spheres[i].center).norm() <= spheres[i].radius) {
          throw GeometryError("monopole source inside sphere " + std::to_string(i));
        }
      }
    } else {
      const auto& pw = std::get<PlaneWave>(source);
      if (std::abs(pw.direction.norm() - 1.0) > 1e-12) throw GeometryError("plane-wave direction is not unit norm");
    }
  }

  std::uint64_t hash() const {
    Fnv1a h;
    h.add(frequency).add(sound_speed).add(std::int64_t{n_in}).add(std::int64_t{n_fwd});
    h.add(std::int64_t{incident_eval == IncidentEvaluation::direct ? 0 : 1});
    for (const auto& s : spheres) {
      h.add(s.center).add(s.radius).add(static_cast<std::int64_t>(s.capsule_count()));
      for (const auto& d : s.capsule_dirs) h.add(d);
    }
    return h.value();
  }
};

/// Spherical Fibonacci lattice: z_q = 1 - (2q+1)/Q, phi_q = 2 pi q / golden ratio.
inline std::vector<Vec3> fibonacci_grid(std::size_t count) {
  if (count == 0) throw GeometryError("Fibonacci grid needs at least one point");
  const double golden = std::numbers::phi;
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (std::size_t q = 0; q < count; ++q) {
    const double z = 1.0 - (2.0 * static_cast<double>(q) + 1.0) / static_cast<double>(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * static_cast<double>(q) / golden;
    Vec3 v(rho * std::cos(phi), rho * std::sin(phi), z);
    pts.push_back(v.normalized());
  }
  return pts;
}

/// Coefficients of e^{i k dir . r} about the origin: A_n^m = 4 pi i^n conj(Y_n^m(dir)).
inline CoefficientVector plane_wave_coeffs(const Vec3& direction, double k, int N) {
  if (std::abs(direction.norm() - 1.0) > 1e-12) throw GeometryError("plane-wave direction is not unit norm");
  CoefficientVector a(k, N);
  const ComplexVector y = spherical_harmonics(N, to_spherical(direction));
  for (int n = 0; n <= N; ++n) {
    const Complex scale = 4.0 * kPi * ipow(n);
    for (int m = -n; m <= n; ++m) a.values()(packed_index(n, m)) = scale * std::conj(y(packed_index(n, m)));
  }
  return a;
}

/// Coefficients of amplitude * e^{ik|r - src|} / (4 pi |r - src|) about the
/// origin, valid for |r| < |src|: A_n^m = amplitude i k h_n(k|src|) conj(Y_n^m(src)).
inline CoefficientVector monopole_coeffs(const Vec3& position, Complex amplitude, double k, int N) {
  const SphericalPoint sp = to_spherical(position);
  if (sp.r == 0.0) throw GeometryError("monopole at the expansion origin has no regular expansion");
  CoefficientVector a(k, N);
  if (amplitude == Complex(0.0)) return a;
  const ComplexVector y = spherical_harmonics(N, sp);
  const auto h = sph_hankel1_array(N, k * sp.r);
  for (int n = 0; n <= N; ++n) {
    const Complex scale = amplitude * kI * k * h[static_cast<std::size_t>(n)];
    for (int m = -n; m <= n; ++m) a.values()(packed_index(n, m)) = scale * std::conj(y(packed_index(n, m)));
  }
  return a;
}

inline CoefficientVector incident_coeffs(const IncidentSource& source, double k, int N) {
  if (const auto* pw = std::get_if<PlaneWave>(&source)) return plane_wave_coeffs(pw->direction, k, N);
  const auto& mono = std::get<Monopole>(source);
  return monopole_coeffs(mono.position, mono.amplitude, k, N);
}

/// Direct evaluation of the source kernel (no series truncation).
inline Complex incident_field(const IncidentSource& source, double k, const Vec3& r) {
  if (const auto* pw = std::get_if<PlaneWave>(&source)) return std::polar(1.0, k * pw->direction.dot(r));
  const auto& mono = std::get<Monopole>(source);
  const double d = (r - mono.position).norm();
  if (d == 0.0) throw DomainError("field evaluated at the monopole position");
  return mono.amplitude * std::polar(1.0, k * d) / (4.0 * kPi * d);
}

namespace detail {
inline void check_spacing(double spacing, double radius) {
  if (!(spacing > 2.0 * radius)) {
    throw GeometryError("spacing " + std::to_string(spacing) + " does not exceed sphere diameter " +
                        std::to_string(2.0 * radius));
  }
}
}  // namespace detail

/// `count` centers along `axis`, equally spaced and centered on the origin.
inline std::vector<Vec3> layout_linear(int count, double spacing, Axis axis, double radius) {
  if (count < 1) throw GeometryError("layout needs at least one sphere");
  if (count > 1) detail::check_spacing(spacing, radius);
  std::vector<Vec3> centers;
  const Vec3 dir = axis_vector(axis);
  for (int i = 0; i < count; ++i) centers.push_back((i - 0.5 * (count - 1)) * spacing * dir);
  return centers;
}

/// rows x cols centers on a square lattice in `plane`, centered on the origin.
/// Rows run along the second plane axis, columns along the first.
inline std::vector<Vec3> layout_cartesian(int rows, int cols, double spacing, Plane plane, double radius) {
  if (rows < 1 || cols < 1) throw GeometryError("layout needs at least one sphere");
  if (rows * cols > 1) detail::check_spacing(spacing, radius);
  Vec3 u, v;
  switch (plane) {
    case Plane::xy: u = Vec3::UnitX(); v = Vec3::UnitY(); break;
    case Plane::yz: u = Vec3::UnitY(); v = Vec3::UnitZ(); break;
    case Plane::xz: u = Vec3::UnitX(); v = Vec3::UnitZ(); break;
  }
  std::vector<Vec3> centers;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      centers.push_back((c - 0.5 * (cols - 1)) * spacing * u + (r - 0.5 * (rows - 1)) * spacing * v);
    }
  }
  return centers;
}

/// Identical arrays at the given centers.
inline std::vector<RsmaSpec> make_arrays(const std::vector<Vec3>& centers, double radius, std::size_t capsules) {
  const auto dirs = fibonacci_grid(capsules);
  std::vector<RsmaSpec> out;
  for (const auto& c : centers) out.push_back({c, radius, dirs});
  return out;
}

}  // namespace msa
