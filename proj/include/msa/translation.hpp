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

// Translation operators between spherical expansion origins.
//
// A translation by t re-expands a field given about origin c about the new
// origin c + t:
//   Sum_l' (T a)_l' R_l'(r - c - t) = Sum_l a_l F_l(r - c),
// where F is R (regular-to-regular) or S (singular-to-regular, valid for
// |r - c - t| < |t|).
//
// Assembly: rotate so that t lies on the z axis, apply the coaxial operator
// (block diagonal in m), rotate back. Coaxial entries are
//   R|R: i^{n'-n} 2 pi Int_{-1}^{1} e^{ikdx} Pbar_n^m(x) Pbar_n'^m(x) dx
//   S|R: i^{n'-n} Sum_n'' i^n'' (2n''+1) h_n''(k|d|) 2 pi Int Pbar_n^m Pbar_n'^m P_n'' dx
// with the integrals evaluated by Gauss-Legendre quadrature.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msa/basis.hpp"
#include "msa/quadrature.hpp"
#include "msa/rotation.hpp"

namespace msa {

enum class TranslationKind { regular_to_regular, singular_to_regular };

struct TranslationMatrix {
  TranslationKind kind;
  Vec3 displacement;
  double k;
  int n_src;
  int n_dst;
  ComplexMatrix entries;  // (n_dst+1)^2 x (n_src+1)^2

  CoefficientVector apply(const CoefficientVector& a) const {
    if (a.truncation() != n_src) {
      throw IndexError("translation expects truncation " + std::to_string(n_src) + ", got " +
                       std::to_string(a.truncation()));
    }
    return {k, n_dst, entries * a.values()};
  }
};

namespace detail {

// Pbar_n^m(x_q) for n in [m, N]: rows are nodes, columns n - m.
inline std::vector<Eigen::MatrixXd> legendre_columns(int N, int m_max, const GaussLegendre& rule) {
  const auto Q = static_cast<Eigen::Index>(rule.nodes.size());
  std::vector<Eigen::MatrixXd> cols(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) cols[static_cast<std::size_t>(m)].resize(Q, N - m + 1);
  for (Eigen::Index q = 0; q < Q; ++q) {
    const double x = rule.nodes[static_cast<std::size_t>(q)];
    const auto p = normalized_legendre_table(N, x, std::sqrt((1.0 - x) * (1.0 + x)));
    for (int m = 0; m <= m_max; ++m) {
      for (int n = m; n <= N; ++n) cols[static_cast<std::size_t>(m)](q, n - m) = p[triangular_index(n, m)];
    }
  }
  return cols;
}

/// Coaxial R|R blocks for translation by d along +z (d may be negative).
/// Block m has shape (n_dst-m+1) x (n_src-m+1); it also serves -m.
inline std::vector<ComplexMatrix> coaxial_rr(double k, double d, int n_src, int n_dst) {
  const int m_max = std::min(n_src, n_dst);
  const double kd = std::abs(k * d);
  const int bandwidth = static_cast<int>(std::ceil(kd + 10.0 * std::cbrt(kd))) + 40;
  const auto rule = gauss_legendre((n_src + n_dst + bandwidth) / 2 + 1);
  const int N = std::max(n_src, n_dst);
  const auto P = legendre_columns(N, m_max, rule);
  const auto Q = static_cast<Eigen::Index>(rule.nodes.size());
  ComplexVector kernel(Q);
  for (Eigen::Index q = 0; q < Q; ++q) {
    kernel(q) = 2.0 * kPi * rule.weights[static_cast<std::size_t>(q)] * std::polar(1.0, k * d * rule.nodes[static_cast<std::size_t>(q)]);
  }
  std::vector<ComplexMatrix> blocks(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    const Eigen::MatrixXd& Pm = P[static_cast<std::size_t>(m)];
    const ComplexMatrix src = kernel.asDiagonal() * Pm.leftCols(n_src - m + 1).cast<Complex>();
    ComplexMatrix block = Pm.leftCols(n_dst - m + 1).transpose().cast<Complex>() * src;
    for (int np = m; np <= n_dst; ++np) {
      for (int n = m; n <= n_src; ++n) block(np - m, n - m) *= ipow(np - n);
    }
    blocks[static_cast<std::size_t>(m)] = std::move(block);
  }
  return blocks;
}

/// Coaxial S|R blocks for translation by d along +z, d != 0.
inline std::vector<ComplexMatrix> coaxial_sr(double k, double d, int n_src, int n_dst) {
  if (d == 0.0) throw GeometryError("singular-to-regular translation needs a nonzero displacement");
  const int m_max = std::min(n_src, n_dst);
  const int n_sum = n_src + n_dst;
  const auto rule = gauss_legendre(n_sum + 1);
  const int N = std::max(n_src, n_dst);
  const auto P = legendre_columns(N, m_max, rule);
  const auto Q = static_cast<Eigen::Index>(rule.nodes.size());

  // Weighted ordinary Legendre polynomials 2 pi w_q P_n''(x_q).
  Eigen::MatrixXd legendre(Q, n_sum + 1);
  for (Eigen::Index q = 0; q < Q; ++q) {
    const double x = rule.nodes[static_cast<std::size_t>(q)];
    const double w = 2.0 * kPi * rule.weights[static_cast<std::size_t>(q)];
    double p0 = 1.0, p1 = x;
    legendre(q, 0) = w;
    if (n_sum >= 1) legendre(q, 1) = w * x;
    for (int l = 2; l <= n_sum; ++l) {
      const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
      legendre(q, l) = w * p2;
      p0 = p1;
      p1 = p2;
    }
  }
  const auto h = sph_hankel1_array(n_sum, k * std::abs(d));
  std::vector<Complex> radial(static_cast<std::size_t>(n_sum) + 1);
  for (int l = 0; l <= n_sum; ++l) radial[static_cast<std::size_t>(l)] = ipow(l) * (2.0 * l + 1.0) * h[static_cast<std::size_t>(l)];

  std::vector<ComplexMatrix> blocks(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    const Eigen::MatrixXd& Pm = P[static_cast<std::size_t>(m)];
    ComplexMatrix block(n_dst - m + 1, n_src - m + 1);
    for (int n = m; n <= n_src; ++n) {
      // gaunt(n' - m, n'') = 2 pi Int Pbar_n^m Pbar_n'^m P_n'' dx
      const Eigen::MatrixXd gaunt =
          Pm.leftCols(n_dst - m + 1).transpose() * (Pm.col(n - m).asDiagonal() * legendre);
      for (int np = m; np <= n_dst; ++np) {
        Complex sum = 0.0;
        for (int l = std::abs(n - np); l <= n + np; l += 2) sum += radial[static_cast<std::size_t>(l)] * gaunt(np - m, l);
        const double sign = (d < 0.0) ? parity(n + np) : 1.0;
        block(np - m, n - m) = sign * ipow(np - n) * sum;
      }
    }
    blocks[static_cast<std::size_t>(m)] = std::move(block);
  }
  return blocks;
}

// W_dst^H * diag_m(coax) * W_src, assembled degree block by degree block.
inline ComplexMatrix rotate_coaxial(const std::vector<ComplexMatrix>& coax, const std::vector<ComplexMatrix>& w,
                                    int n_src, int n_dst) {
  ComplexMatrix out = ComplexMatrix::Zero(coefficient_count(n_dst), coefficient_count(n_src));
  for (int np = 0; np <= n_dst; ++np) {
    const ComplexMatrix& wd = w[static_cast<std::size_t>(np)];
    for (int n = 0; n <= n_src; ++n) {
      const ComplexMatrix& ws = w[static_cast<std::size_t>(n)];
      const int mm = std::min(n, np);
      ComplexMatrix scaled = ws.middleRows(n - mm, 2 * mm + 1);
      for (int m = -mm; m <= mm; ++m) {
        const int am = std::abs(m);
        scaled.row(m + mm) *= coax[static_cast<std::size_t>(am)](np - am, n - am);
      }
      out.block(np * np, n * n, 2 * np + 1, 2 * n + 1).noalias() =
          wd.middleRows(np - mm, 2 * mm + 1).adjoint() * scaled;
    }
  }
  return out;
}

struct AxisAlignment {
  double azimuth = 0.0;
  double tilt = 0.0;
  double signed_distance = 0.0;
};

// Rotation bringing t onto +z, or onto -z when t points into the lower
// hemisphere, so that |tilt| <= pi/2.
inline AxisAlignment align_to_z(const Vec3& t) {
  const SphericalPoint sp = to_spherical(t);
  AxisAlignment a;
  a.azimuth = sp.phi();
  const double beta = sp.theta();
  if (beta > 0.5 * kPi) {
    a.tilt = kPi - beta;
    a.signed_distance = -sp.r;
  } else {
    a.tilt = -beta;
    a.signed_distance = sp.r;
  }
  return a;
}

}  // namespace detail

/// Regular-to-regular translation by t (source origin to destination origin).
inline TranslationMatrix rr_translation(const Vec3& t, double k, int n_src, int n_dst) {
  if (n_src < 0 || n_dst < 0) throw IndexError("translation truncations must be >= 0");
  TranslationMatrix tm{TranslationKind::regular_to_regular, t, k, n_src, n_dst, {}};
  if (t.norm() == 0.0) {
    tm.entries = ComplexMatrix::Identity(coefficient_count(n_dst), coefficient_count(n_src));
    return tm;
  }
  const auto align = detail::align_to_z(t);
  const auto coax = detail::coaxial_rr(k, align.signed_distance, n_src, n_dst);
  const auto w = rotation_blocks(std::max(n_src, n_dst), align.azimuth, align.tilt);
  tm.entries = detail::rotate_coaxial(coax, w, n_src, n_dst);
  return tm;
}

/// Singular-to-regular translation by t; the result is valid inside the ball
/// of radius |t| about the destination origin.
inline TranslationMatrix sr_translation(const Vec3& t, double k, int n_src, int n_dst) {
  if (n_src < 0 || n_dst < 0) throw IndexError("translation truncations must be >= 0");
  if (t.norm() == 0.0) throw GeometryError("singular-to-regular translation with zero displacement");
  TranslationMatrix tm{TranslationKind::singular_to_regular, t, k, n_src, n_dst, {}};
  const auto align = detail::align_to_z(t);
  const auto coax = detail::coaxial_sr(k, align.signed_distance, n_src, n_dst);
  const auto w = rotation_blocks(std::max(n_src, n_dst), align.azimuth, align.tilt);
  tm.entries = detail::rotate_coaxial(coax, w, n_src, n_dst);
  return tm;
}

}  // namespace msa
