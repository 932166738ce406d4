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

// Acoustic scattering by one or more rigid spheres.
//
// Sphere s receives the regular expansion A^(s) (the incident field
// re-expanded about its center) plus the fields radiated by every other
// sphere. Its own radiating coefficients B^(s) satisfy
//   A^(s) = Lambda^(s) B^(s) - Sum_{t != s} T_SR^(s,t) B^(t),
//   Lambda^(s) = diag(-h'_n(k a_s) / j'_n(k a_s)),
// which is the block system A' = S B'.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msa/basis.hpp"
#include "msa/parallel.hpp"
#include "msa/scene.hpp"
#include "msa/translation.hpp"

namespace msa {

enum class Coupling {
  multiple,  // full inter-sphere interaction
  single,    // off-diagonal blocks of the system matrix zeroed
};

/// i / ((ka)^2 h'_n(ka)) for n = 0..N: total surface pressure per unit
/// incident coefficient on a rigid sphere.
inline ComplexVector rigid_surface_factors(double ka, int N) {
  const auto h = sph_hankel1_array(N + 1, ka);
  ComplexVector out(N + 1);
  for (int n = 0; n <= N; ++n) out(n) = kI / (ka * ka * detail::sph_deriv_from(h, n, ka));
  return out;
}

/// -h'_n(ka) / j'_n(ka) for n = 0..N.
inline ComplexVector single_scattering_factors(double ka, int N) {
  const auto h = sph_hankel1_array(N + 1, ka);
  const auto j = sph_bessel_j_array(N + 1, ka);
  ComplexVector out(N + 1);
  for (int n = 0; n <= N; ++n) out(n) = -detail::sph_deriv_from(h, n, ka) / detail::sph_deriv_from(j, n, ka);
  return out;
}

/// Q x (N+1)^2 matrix mapping incident coefficients about the sphere center
/// to total pressure at the capsules.
inline ComplexMatrix surface_response_matrix(const RsmaSpec& sphere, double k, int N) {
  const double ka = k * sphere.radius;
  if (!(ka > 0.0)) throw DomainError("surface response needs k * radius > 0");
  const ComplexVector factor = rigid_surface_factors(ka, N);
  ComplexMatrix lambda(static_cast<Eigen::Index>(sphere.capsule_count()), coefficient_count(N));
  for (std::size_t q = 0; q < sphere.capsule_count(); ++q) {
    const ComplexVector y = spherical_harmonics(N, to_spherical(sphere.capsule_dirs[q]));
    for (int n = 0; n <= N; ++n) {
      lambda.row(static_cast<Eigen::Index>(q)).segment(n * n, 2 * n + 1) =
          factor(n) * y.segment(n * n, 2 * n + 1).transpose();
    }
  }
  return lambda;
}

/// Incident plus scattered field of a rigid sphere of radius R centered at
/// the origin, at |r| >= R.
inline Complex single_sphere_total_field(const CoefficientVector& a, double radius, const Vec3& r) {
  const double k = a.wavenumber();
  const int N = a.truncation();
  const SphericalPoint sp = to_spherical(r);
  if (sp.r < radius * (1.0 - 1e-12)) throw GeometryError("evaluation point inside the rigid sphere");
  const double ka = k * radius;
  const auto jR = sph_bessel_j_array(N + 1, ka);
  const auto hR = sph_hankel1_array(N + 1, ka);
  const auto j = sph_bessel_j_array(N, k * sp.r);
  const auto h = sph_hankel1_array(N, k * sp.r);
  const ComplexVector y = spherical_harmonics(N, sp);
  Complex sum = 0.0;
  for (int n = 0; n <= N; ++n) {
    const Complex ratio = detail::sph_deriv_from(jR, n, ka) / detail::sph_deriv_from(hR, n, ka);
    const Complex radial = j[static_cast<std::size_t>(n)] - h[static_cast<std::size_t>(n)] * ratio;
    sum += radial * y.segment(n * n, 2 * n + 1).cwiseProduct(a.values().segment(n * n, 2 * n + 1)).sum();
  }
  return sum;
}

/// N_S (N_fwd+1)^2 square block system matrix.
inline ComplexMatrix assemble_system_matrix(const SceneConfig& scene, Coupling coupling = Coupling::multiple) {
  scene.validate();
  const double k = scene.wavenumber();
  const int N = scene.n_fwd;
  const Eigen::Index L = coefficient_count(N);
  const auto S = static_cast<Eigen::Index>(scene.spheres.size());
  ComplexMatrix sys = ComplexMatrix::Zero(S * L, S * L);
  for (Eigen::Index s = 0; s < S; ++s) {
    const ComplexVector diag = single_scattering_factors(k * scene.spheres[static_cast<std::size_t>(s)].radius, N);
    for (int n = 0; n <= N; ++n) {
      for (int m = -n; m <= n; ++m) sys(s * L + packed_index(n, m), s * L + packed_index(n, m)) = diag(n);
    }
    if (coupling == Coupling::single) continue;
    for (Eigen::Index t = 0; t < S; ++t) {
      if (t == s) continue;
      // Radiation of sphere t re-expanded about sphere s.
      const Vec3 d = scene.spheres[static_cast<std::size_t>(s)].center - scene.spheres[static_cast<std::size_t>(t)].center;
      sys.block(s * L, t * L, L, L) = -sr_translation(d, k, N, N).entries;
    }
  }
  return sys;
}

struct ScatterSolution {
  std::vector<CoefficientVector> local_incident;  // A^(s), truncation n_fwd
  std::vector<CoefficientVector> radiating;       // B^(s), truncation n_fwd
  double relative_residual = 0.0;                 // |A' - S B'| / |A'|
};

/// Translations, system matrix and its factorization for one scene.
class ForwardModel {
 public:
  explicit ForwardModel(const SceneConfig& scene, Coupling coupling = Coupling::multiple)
      : scene_(scene), coupling_(coupling), k_(scene.wavenumber()) {
    scene_.validate();
    if (scene_.n_fwd > scene_.n_in) throw GeometryError("forward truncation exceeds incident truncation");
    const Eigen::Index L = coefficient_count(scene_.n_fwd);
    const auto S = static_cast<Eigen::Index>(scene_.spheres.size());
    translate_ = ComplexMatrix(S * L, coefficient_count(scene_.n_in));
    for (Eigen::Index s = 0; s < S; ++s) {
      translate_.middleRows(s * L, L) =
          rr_translation(scene_.spheres[static_cast<std::size_t>(s)].center, k_, scene_.n_in, scene_.n_fwd).entries;
    }
    system_ = assemble_system_matrix(scene_, coupling_);
    // |Lambda_n| spans many decades once n > ka; factorize D S D with
    // D = |diag S|^{-1/2}, whose conditioning reflects the physics.
    scale_ = system_.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
    if (coupling_ == Coupling::multiple) {
      lu_.compute(scale_.asDiagonal() * system_ * scale_.asDiagonal());
      rcond_ = lu_.rcond();
    } else {
      diag_ = system_.diagonal();
      const Eigen::VectorXd scaled = (scale_.array().square() * diag_.array().abs()).matrix();
      const double hi = scaled.maxCoeff();
      rcond_ = hi > 0.0 ? scaled.minCoeff() / hi : 0.0;
    }
    if (!std::isfinite(rcond_) || rcond_ < 1e-15) {
      throw SolverError("system matrix is numerically singular (condition estimate " +
                        std::to_string(rcond_ > 0.0 ? 1.0 / rcond_ : INFINITY) + ")");
    }
  }

  const SceneConfig& scene() const { return scene_; }
  Coupling coupling() const { return coupling_; }
  double wavenumber() const { return k_; }
  const ComplexMatrix& system_matrix() const { return system_; }
  // Stacked R|R translations: N_S (N_fwd+1)^2 x (N_in+1)^2.
  const ComplexMatrix& local_incident_operator() const { return translate_; }
  // Reciprocal condition estimate of the diagonally equilibrated system matrix.
  double rcond() const { return rcond_; }

  ComplexMatrix solve_system(const ComplexMatrix& rhs) const {
    ComplexMatrix out = (coupling_ == Coupling::multiple)
                            ? ComplexMatrix(scale_.asDiagonal() * lu_.solve(scale_.asDiagonal() * rhs))
                            : ComplexMatrix(diag_.cwiseInverse().asDiagonal() * rhs);
    if (!out.allFinite()) throw SolverError("scattering solve produced non-finite values");
    return out;
  }

  ScatterSolution solve(const CoefficientVector& a_in) const {
    if (a_in.truncation() != scene_.n_in) {
      throw IndexError("incident coefficients must be truncated at n_in = " + std::to_string(scene_.n_in));
    }
    const ComplexVector a_local = translate_ * a_in.values();
    const ComplexVector b = solve_system(a_local);
    ScatterSolution sol;
    const Eigen::Index L = coefficient_count(scene_.n_fwd);
    for (std::size_t s = 0; s < scene_.spheres.size(); ++s) {
      const auto off = static_cast<Eigen::Index>(s) * L;
      sol.local_incident.emplace_back(k_, scene_.n_fwd, a_local.segment(off, L));
      sol.radiating.emplace_back(k_, scene_.n_fwd, b.segment(off, L));
    }
    const double norm = a_local.norm();
    sol.relative_residual = norm > 0.0 ? (a_local - system_ * b).norm() / norm : 0.0;
    return sol;
  }

 private:
  SceneConfig scene_;
  Coupling coupling_;
  double k_;
  ComplexMatrix translate_;
  ComplexMatrix system_;
  Eigen::PartialPivLU<ComplexMatrix> lu_;
  ComplexVector diag_;
  Eigen::VectorXd scale_;
  double rcond_ = 0.0;
};

inline ScatterSolution forward_solve(const SceneConfig& scene, const CoefficientVector& a_in,
                                     Coupling coupling = Coupling::multiple) {
  return ForwardModel(scene, coupling).solve(a_in);
}

namespace detail {
inline void check_outside(const SceneConfig& scene, const Vec3& r) {
  for (std::size_t s = 0; s < scene.spheres.size(); ++s) {
    const auto& sp = scene.spheres[s];
    if ((r - sp.center).norm() < sp.radius * (1.0 - 1e-12)) {
      throw GeometryError("evaluation point inside sphere " + std::to_string(s));
    }
  }
}
}  // namespace detail

/// p_tot(r) = Sum_t Sum_l B_l^(t) S_l(r - c_t) + p_in(r), with p_in taken
/// from the global expansion about the origin.
inline Complex eval_total_field(const SceneConfig& scene, const ScatterSolution& sol, const CoefficientVector& a_in,
                                const Vec3& r) {
  detail::check_outside(scene, r);
  Complex p = eval_expansion(BasisKind::regular, a_in, r, Vec3::Zero());
  for (std::size_t t = 0; t < scene.spheres.size(); ++t) {
    p += eval_expansion(BasisKind::singular, sol.radiating[t], r, scene.spheres[t].center);
  }
  return p;
}

/// Outward normal derivative of p_tot on sphere s at center + radius * direction.
inline Complex eval_radial_derivative(const SceneConfig& scene, const ScatterSolution& sol,
                                      const CoefficientVector& a_in, std::size_t s, const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-12) throw GeometryError("direction must be unit norm");
  if (s >= scene.spheres.size()) throw IndexError("sphere index out of range");
  const Vec3 r = scene.spheres[s].center + scene.spheres[s].radius * direction;
  detail::check_outside(scene, r);
  auto accumulate = [&](const ComplexVec3& g) {
    return g[0] * direction.x() + g[1] * direction.y() + g[2] * direction.z();
  };
  Complex d = accumulate(eval_expansion_gradient(BasisKind::regular, a_in, r, Vec3::Zero()));
  for (std::size_t t = 0; t < scene.spheres.size(); ++t) {
    d += accumulate(eval_expansion_gradient(BasisKind::singular, sol.radiating[t], r, scene.spheres[t].center));
  }
  return d;
}

struct ForwardOperator {
  ComplexMatrix matrix;  // total capsules x (n_in+1)^2
  int n_in = 0;
  Coupling coupling = Coupling::multiple;
  double system_rcond = 0.0;
  std::uint64_t scene_hash = 0;
};

/// Capsule-by-sphere singular basis values: rows are capsules of all spheres,
/// columns are (sphere t, l) with l <= n_fwd.
inline ComplexMatrix capsule_singular_matrix(const SceneConfig& scene) {
  const double k = scene.wavenumber();
  const Eigen::Index L = coefficient_count(scene.n_fwd);
  const auto S = static_cast<Eigen::Index>(scene.spheres.size());
  ComplexMatrix out(static_cast<Eigen::Index>(scene.total_capsules()), S * L);
  Eigen::Index row = 0;
  for (const auto& sphere : scene.spheres) {
    for (std::size_t q = 0; q < sphere.capsule_count(); ++q, ++row) {
      const Vec3 r = sphere.capsule_position(q);
      for (Eigen::Index t = 0; t < S; ++t) {
        out.row(row).segment(t * L, L) =
            basis_values(BasisKind::singular, scene.n_fwd, k, r, scene.spheres[static_cast<std::size_t>(t)].center).transpose();
      }
    }
  }
  return out;
}

/// Incident pressure at the capsules per unit incident coefficient.
inline ComplexMatrix capsule_incident_matrix(const ForwardModel& model) {
  const SceneConfig& scene = model.scene();
  const double k = model.wavenumber();
  ComplexMatrix out(static_cast<Eigen::Index>(scene.total_capsules()), coefficient_count(scene.n_in));
  const Eigen::Index L = coefficient_count(scene.n_fwd);
  Eigen::Index row = 0;
  for (std::size_t s = 0; s < scene.spheres.size(); ++s) {
    const auto& sphere = scene.spheres[s];
    for (std::size_t q = 0; q < sphere.capsule_count(); ++q, ++row) {
      const Vec3 r = sphere.capsule_position(q);
      if (scene.incident_eval == IncidentEvaluation::direct) {
        out.row(row) = basis_values(BasisKind::regular, scene.n_in, k, r, Vec3::Zero()).transpose();
      } else {
        const ComplexVector local = basis_values(BasisKind::regular, scene.n_fwd, k, r, sphere.center);
        out.row(row) = local.transpose() *
                       model.local_incident_operator().middleRows(static_cast<Eigen::Index>(s) * L, L);
      }
    }
  }
  return out;
}

/// Dense forward operator: column l is the capsule pressure for the unit
/// incident coefficient e_l. Columns are processed in fixed-width chunks so the
/// result is bitwise independent of `threads`.
inline ForwardOperator forward_operator(const ForwardModel& model, unsigned threads = 1) {
  const SceneConfig& scene = model.scene();
  const ComplexMatrix singular = capsule_singular_matrix(scene);
  ForwardOperator op;
  op.n_in = scene.n_in;
  op.coupling = model.coupling();
  op.system_rcond = model.rcond();
  op.scene_hash = scene.hash();
  op.matrix = capsule_incident_matrix(model);
  const ComplexMatrix& rhs = model.local_incident_operator();
  const Eigen::Index cols = rhs.cols();
  const auto chunks = static_cast<std::size_t>((cols + kColumnChunk - 1) / kColumnChunk);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const Eigen::Index start = static_cast<Eigen::Index>(c) * kColumnChunk;
    const Eigen::Index width = std::min<Eigen::Index>(kColumnChunk, cols - start);
    const ComplexMatrix b = model.solve_system(rhs.middleCols(start, width));
    op.matrix.middleCols(start, width).noalias() += singular * b;
  });
  return op;
}

inline ForwardOperator forward_operator(const SceneConfig& scene, Coupling coupling = Coupling::multiple,
                                        unsigned threads = 1) {
  return forward_operator(ForwardModel(scene, coupling), threads);
}

}  // namespace msa
