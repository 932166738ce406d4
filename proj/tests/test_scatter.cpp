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

#include <gtest/gtest.h>

#include "msa/scatter.hpp"
#include "oracles.hpp"

namespace {

using msa::Complex;
using msa::ComplexVector;
using msa::Vec3;

/// Plane-wave coefficients about `center`: 4 pi i^n conj(Y_n^m(d)) e^{i k d.c}.
Eigen::VectorXcd oracle_plane_wave(const Vec3& d, double k, int N, const Vec3& center) {
  double r, th, ph;
  oracle::angles(d, r, th, ph);
  Eigen::VectorXcd a((N + 1) * (N + 1));
  const Complex shift = std::polar(1.0, k * d.dot(center));
  for (int n = 0; n <= N; ++n) {
    for (int m = -n; m <= n; ++m) a(n * n + n + m) = 4.0 * oracle::kPi * oracle::ipow(n) * std::conj(oracle::Y(n, m, th, ph)) * shift;
  }
  return a;
}

msa::SceneConfig single_scene(const Vec3& center, double frequency, int n_in, int n_fwd) {
  msa::SceneConfig s;
  s.spheres = msa::make_arrays({center}, 0.08, 64);
  s.source = msa::PlaneWave{Vec3(1, 0, 0)};
  s.frequency = frequency;
  s.n_in = n_in;
  s.n_fwd = n_fwd;
  return s;
}

msa::SceneConfig pair_scene(double spacing, double frequency, int n_in, int n_fwd) {
  msa::SceneConfig s;
  s.spheres = msa::make_arrays(msa::layout_linear(2, spacing, msa::Axis::x, 0.08), 0.08, 50);
  s.source = msa::Monopole{Vec3(10, 10, 10), 1.0};
  s.frequency = frequency;
  s.n_in = n_in;
  s.n_fwd = n_fwd;
  return s;
}

TEST(SurfaceResponse, MatchesWronskianForm) {
  const double k = 30.0;
  msa::RsmaSpec sphere{Vec3::Zero(), 0.08, msa::fibonacci_grid(40)};
  const int N = 12;
  const auto lambda = msa::surface_response_matrix(sphere, k, N);
  const Eigen::VectorXcd a = oracle_plane_wave(Vec3(0, 0.6, 0.8), k, N, Vec3::Zero());
  const ComplexVector p = lambda * a;
  for (std::size_t q = 0; q < sphere.capsule_count(); ++q) {
    double r, th, ph;
    oracle::angles(sphere.capsule_dirs[q], r, th, ph);
    const Complex want = oracle::rigid_surface_pressure(a, N, k, 0.08, th, ph);
    EXPECT_NEAR(std::abs(p(static_cast<Eigen::Index>(q)) - want) / std::abs(want), 0.0, 1e-12);
  }
}

TEST(SingleSphere, PipelineAtOriginMatchesAnalyticField) {
  const auto scene = single_scene(Vec3::Zero(), 2000.0, 20, 20);
  const double k = scene.wavenumber();
  const auto op = msa::forward_operator(scene);
  const Eigen::VectorXcd a = oracle_plane_wave(Vec3(-0.3, 0.4, std::sqrt(0.75)), k, 20, Vec3::Zero());
  const ComplexVector p = op.matrix * a;
  for (std::size_t q = 0; q < scene.spheres[0].capsule_count(); ++q) {
    double r, th, ph;
    oracle::angles(scene.spheres[0].capsule_dirs[q], r, th, ph);
    const Complex want = oracle::rigid_surface_pressure(a, 20, k, 0.08, th, ph);
    EXPECT_NEAR(std::abs(p(static_cast<Eigen::Index>(q)) - want) / std::abs(want), 0.0, 1e-9);
  }
}

TEST(SingleSphere, OffsetPipelineMatchesAnalyticField) {
  const Vec3 c(0.3, -0.1, 0.2);
  const auto scene = single_scene(c, 1000.0, 34, 18);
  const double k = scene.wavenumber();
  const Vec3 d = Vec3(1, 2, -0.5).normalized();
  const msa::CoefficientVector a_in(k, 34, oracle_plane_wave(d, k, 34, Vec3::Zero()));
  const ComplexVector p = msa::forward_operator(scene).matrix * a_in.values();
  const Eigen::VectorXcd local = oracle_plane_wave(d, k, 18, c);
  for (std::size_t q = 0; q < scene.spheres[0].capsule_count(); ++q) {
    double r, th, ph;
    oracle::angles(scene.spheres[0].capsule_dirs[q], r, th, ph);
    const Complex want = oracle::rigid_surface_pressure(local, 18, k, 0.08, th, ph);
    EXPECT_NEAR(std::abs(p(static_cast<Eigen::Index>(q)) - want), 0.0, 1e-9);
  }
}

TEST(SingleSphere, TotalFieldOffSurfaceMatchesClosedForm) {
  const auto scene = single_scene(Vec3::Zero(), 1500.0, 24, 24);
  const double k = scene.wavenumber();
  const msa::CoefficientVector a(k, 24, oracle_plane_wave(Vec3(0, 0, 1), k, 24, Vec3::Zero()));
  const auto sol = msa::forward_solve(scene, a);
  for (const Vec3& r : {Vec3(0.1, 0.0, 0.05), Vec3(0.0, -0.2, 0.1), Vec3(0.0, 0.0, -0.3)}) {
    const Complex got = msa::eval_total_field(scene, sol, a, r);
    const Complex want = msa::single_sphere_total_field(a, 0.08, r);
    EXPECT_NEAR(std::abs(got - want), 0.0, 1e-11);
  }
  EXPECT_THROW(msa::eval_total_field(scene, sol, a, Vec3(0.01, 0, 0)), msa::GeometryError);
  EXPECT_THROW(msa::single_sphere_total_field(a, 0.08, Vec3(0.01, 0, 0)), msa::GeometryError);
}

double boundary_residual(int n_fwd) {
  const auto scene = pair_scene(0.25, 2000.0, 30, n_fwd);
  const double k = scene.wavenumber();
  const auto a_in = msa::incident_coeffs(scene.source, k, scene.n_in);
  const auto sol = msa::forward_solve(scene, a_in);
  double worst = 0.0;
  for (std::size_t s = 0; s < scene.spheres.size(); ++s) {
    for (const Vec3& dir : msa::fibonacci_grid(200)) {
      const Vec3 r = scene.spheres[s].center + 0.08 * dir;
      const auto g = msa::eval_expansion_gradient(msa::BasisKind::regular, a_in, r, Vec3::Zero());
      const double ref = std::abs(g[0]) + std::abs(g[1]) + std::abs(g[2]);
      worst = std::max(worst, std::abs(msa::eval_radial_derivative(scene, sol, a_in, s, dir)) / ref);
    }
  }
  return worst;
}

TEST(MultipleScattering, RigidBoundaryResidualConverges) {
  double prev = 1.0;
  for (int n : {4, 8, 12, 16}) {
    const double res = boundary_residual(n);
    EXPECT_LT(res, prev) << "N_fwd=" << n;
    prev = res;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(MultipleScattering, ResidualOfLinearSystemIsSmall) {
  const auto scene = pair_scene(0.25, 2000.0, 20, 10);
  const auto sol = msa::forward_solve(scene, msa::incident_coeffs(scene.source, scene.wavenumber(), 20));
  EXPECT_LT(sol.relative_residual, 1e-12);
  ASSERT_EQ(sol.radiating.size(), 2u);
  EXPECT_EQ(sol.radiating[1].truncation(), 10);
}

TEST(MultipleScattering, FarSeparatedSpheresDecouple) {
  auto scene = pair_scene(100.0, 20.0, 3, 3);
  scene.source = msa::PlaneWave{Vec3(0, 0, 1)};
  const auto coupled = msa::forward_operator(scene, msa::Coupling::multiple).matrix;
  const auto single = msa::forward_operator(scene, msa::Coupling::single).matrix;
  EXPECT_LT((coupled - single).norm() / single.norm(), 1e-6);
  // Coupling is physical, not absent: it shows up at close range.
  auto near = pair_scene(0.25, 20.0, 3, 3);
  const auto c2 = msa::forward_operator(near, msa::Coupling::multiple).matrix;
  const auto s2 = msa::forward_operator(near, msa::Coupling::single).matrix;
  EXPECT_GT((c2 - s2).norm() / s2.norm(), 1e-4);
}

TEST(ForwardOperator, TranslatedIncidentAgreesWithDirect) {
  auto scene = pair_scene(0.25, 1000.0, 20, 16);
  const auto direct = msa::forward_operator(scene).matrix;
  scene.incident_eval = msa::IncidentEvaluation::translated;
  const auto translated = msa::forward_operator(scene).matrix;
  const auto a = msa::incident_coeffs(scene.source, scene.wavenumber(), 20);
  EXPECT_LT(oracle::relative_error(translated * a.values(), direct * a.values()), 1e-9);
}

TEST(ForwardOperator, ColumnsMatchPerColumnSolve) {
  const auto scene = pair_scene(0.25, 1000.0, 6, 5);
  const msa::ForwardModel model(scene);
  const auto op = msa::forward_operator(model);
  EXPECT_EQ(op.matrix.rows(), 100);
  EXPECT_EQ(op.matrix.cols(), 49);
  EXPECT_EQ(op.scene_hash, scene.hash());
  const double k = scene.wavenumber();
  for (Eigen::Index l : {0, 7, 48}) {
    msa::CoefficientVector e(k, 6);
    e.values()(l) = 1.0;
    const auto sol = model.solve(e);
    Eigen::Index row = 0;
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t q = 0; q < scene.spheres[s].capsule_count(); ++q, ++row) {
        const Complex p = msa::eval_total_field(scene, sol, e, scene.spheres[s].capsule_position(q));
        EXPECT_NEAR(std::abs(op.matrix(row, l) - p), 0.0, 1e-12 * (1.0 + std::abs(p)));
      }
    }
  }
}

TEST(ForwardOperator, BitwiseIdenticalAcrossThreadCounts) {
  const auto scene = pair_scene(0.25, 1500.0, 12, 8);
  const auto one = msa::forward_operator(scene, msa::Coupling::multiple, 1).matrix;
  for (unsigned t : {2u, 3u, 8u}) {
    const auto many = msa::forward_operator(scene, msa::Coupling::multiple, t).matrix;
    ASSERT_EQ(one.size(), many.size());
    EXPECT_EQ(std::memcmp(one.data(), many.data(), sizeof(Complex) * static_cast<std::size_t>(one.size())), 0)
        << "threads=" << t;
  }
}

TEST(ForwardModel, RejectsBadInputs) {
  auto scene = pair_scene(0.25, 1000.0, 5, 6);
  EXPECT_THROW(msa::ForwardModel{scene}, msa::GeometryError);
  scene.n_fwd = 4;
  const msa::ForwardModel model(scene);
  EXPECT_THROW(model.solve(msa::CoefficientVector(scene.wavenumber(), 4)), msa::IndexError);
  const auto sol = model.solve(msa::CoefficientVector(scene.wavenumber(), 5));
  EXPECT_THROW(msa::eval_radial_derivative(scene, sol, msa::CoefficientVector(scene.wavenumber(), 5), 2, Vec3(1, 0, 0)),
               msa::IndexError);
  EXPECT_THROW(msa::eval_radial_derivative(scene, sol, msa::CoefficientVector(scene.wavenumber(), 5), 0, Vec3(2, 0, 0)),
               msa::GeometryError);
}

}  // namespace
