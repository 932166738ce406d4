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

// Regularized least-squares encoders mapping capsule pressures to incident
// expansion coefficients: A = (T^H T + sigma I)^{-1} T^H p.

#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "msa/scatter.hpp"

namespace msa {

enum class EncoderKind { hoa, single, mshoa };

inline std::string_view to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::hoa: return "HOA";
    case EncoderKind::single: return "Single";
    case EncoderKind::mshoa: return "MSHOA";
  }
  return "?";
}

struct Encoder {
  EncoderKind kind = EncoderKind::mshoa;
  ComplexMatrix matrix;  // (truncation+1)^2 x capsules
  double sigma = 0.0;
  int truncation = 0;
  double k = 0.0;
  std::uint64_t provenance = 0;

  Eigen::Index capsule_count() const { return matrix.cols(); }
};

/// (T^H T + sigma I)^{-1} T^H. sigma > 0 factorizes the Hermitian positive
/// definite normal matrix with Cholesky; sigma == 0 goes through an SVD and
/// rejects rank-deficient T.
inline ComplexMatrix ridge_encoding_matrix(const ComplexMatrix& T, double sigma) {
  if (!(sigma >= 0.0)) throw SolverError("regularization must be >= 0");
  if (sigma > 0.0) {
    ComplexMatrix normal = T.adjoint() * T;
    normal.diagonal().array() += sigma;
    Eigen::LLT<ComplexMatrix> llt(normal);
    if (llt.info() != Eigen::Success) throw SolverError("Cholesky factorization of the normal matrix failed");
    return llt.solve(T.adjoint());
  }
  Eigen::BDCSVD<ComplexMatrix> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = std::max(T.rows(), T.cols()) * std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  if (s.size() < T.cols() || (s.array() <= tol).any()) {
    throw SolverError("normal matrix is singular at sigma = 0 (rank-deficient operator)");
  }
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
}

/// Conventional encoder for one isolated array; coefficients about its center.
inline Encoder hoa_encoder(const RsmaSpec& sphere, double k, int truncation, double sigma) {
  sphere.validate();
  if (static_cast<Eigen::Index>(sphere.capsule_count()) < coefficient_count(truncation)) {
    std::clog << "warning: " << sphere.capsule_count() << " capsules for " << coefficient_count(truncation)
              << " coefficients; the encoding problem is underdetermined\n";
  }
  const ComplexMatrix lambda = surface_response_matrix(sphere, k, truncation);
  Fnv1a h;
  h.add(sphere.center).add(sphere.radius).add(k).add(std::int64_t{truncation}).add(sigma);
  for (const auto& d : sphere.capsule_dirs) h.add(d);
  return {EncoderKind::hoa, ridge_encoding_matrix(lambda, sigma), sigma, truncation, k, h.value()};
}

inline Encoder mshoa_encoder(const ForwardOperator& forward, double sigma, double k) {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(forward.scene_hash)).add(sigma);
  return {forward.coupling == Coupling::multiple ? EncoderKind::mshoa : EncoderKind::single,
          ridge_encoding_matrix(forward.matrix, sigma), sigma, forward.n_in, k, h.value()};
}

inline Encoder mshoa_encoder(const SceneConfig& scene, double sigma, unsigned threads = 1) {
  return mshoa_encoder(forward_operator(scene, Coupling::multiple, threads), sigma, scene.wavenumber());
}

/// Same pipeline as MS-HOA with inter-sphere coupling switched off.
inline Encoder single_scattering_encoder(const SceneConfig& scene, double sigma, unsigned threads = 1) {
  return mshoa_encoder(forward_operator(scene, Coupling::single, threads), sigma, scene.wavenumber());
}

inline CoefficientVector apply_encoder(const Encoder& enc, const ComplexVector& pressure) {
  if (pressure.size() != enc.capsule_count()) {
    throw IndexError("pressure vector has " + std::to_string(pressure.size()) + " entries, encoder expects " +
                     std::to_string(enc.capsule_count()));
  }
  return {enc.k, enc.truncation, enc.matrix * pressure};
}

/// Ridge solutions of one operator for many sigma values. Diagonalizes the
/// smaller Gram matrix once: T T^H when T is wide (via
/// (T^H T + s I)^{-1} T^H = T^H (T T^H + s I)^{-1}), T^H T otherwise.
class RidgeFamily {
 public:
  explicit RidgeFamily(const ComplexMatrix& T, unsigned threads = 1) : wide_(T.rows() < T.cols()) {
    const ComplexMatrix gram = wide_ ? gram_product(T, T.adjoint(), threads) : gram_product(T.adjoint(), T, threads);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
    if (eig.info() != Eigen::Success) throw SolverError("eigendecomposition of the Gram matrix failed");
    eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
    if (wide_) {
      left_ = T.adjoint() * eig.eigenvectors();  // cols x rows
      right_ = eig.eigenvectors().adjoint();      // rows x rows
    } else {
      left_ = eig.eigenvectors();                          // cols x cols
      right_ = eig.eigenvectors().adjoint() * T.adjoint();  // cols x rows
    }
  }

  /// Largest squared singular value of T.
  double spectral_norm_squared() const { return eigenvalues_.size() ? eigenvalues_.maxCoeff() : 0.0; }
  const Eigen::VectorXd& gram_eigenvalues() const { return eigenvalues_; }

  ComplexVector solve(const ComplexVector& p, double sigma) const {
    return left_ * (weights(sigma).asDiagonal() * (right_ * p));
  }

  ComplexMatrix matrix(double sigma) const { return left_ * weights(sigma).asDiagonal() * right_; }

 private:
  static ComplexMatrix gram_product(const ComplexMatrix& a, const ComplexMatrix& b, unsigned threads) {
    ComplexMatrix out(a.rows(), b.cols());
    const auto chunks = static_cast<std::size_t>((b.cols() + kColumnChunk - 1) / kColumnChunk);
    parallel_for(chunks, threads, [&](std::size_t c) {
      const Eigen::Index start = static_cast<Eigen::Index>(c) * kColumnChunk;
      const Eigen::Index width = std::min<Eigen::Index>(kColumnChunk, b.cols() - start);
      out.middleCols(start, width).noalias() = a * b.middleCols(start, width);
    });
    return out;
  }

  Eigen::VectorXd weights(double sigma) const {
    if (!(sigma >= 0.0)) throw SolverError("regularization must be >= 0");
    const double tol = std::max<double>(static_cast<double>(eigenvalues_.size()), 1.0) *
                       std::numeric_limits<double>::epsilon() * spectral_norm_squared();
    Eigen::VectorXd w(eigenvalues_.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double lam = eigenvalues_(i);
      w(i) = (sigma == 0.0 && lam <= tol) ? 0.0 : 1.0 / (lam + sigma);
    }
    return w;
  }

  bool wide_;
  Eigen::VectorXd eigenvalues_;
  ComplexMatrix left_;
  ComplexMatrix right_;
};

/// `points` log-spaced values from lo * scale to hi * scale.
inline std::vector<double> log_sigma_grid(double scale, double lo = 1e-16, double hi = 1e2, int points = 19) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw ConfigError("invalid sigma grid");
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid.push_back(scale * std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
  }
  return grid;
}

}  // namespace msa
