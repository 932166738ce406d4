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

// Rotation of spherical-harmonic expansions.

#pragma once

#include <cmath>
#include <vector>

#include "msa/basis.hpp"

namespace msa {

/// Wigner small-d matrices d^n_{m'm}(beta) for n = 0..N. Entry (m'+n, m+n)
/// of element n. Computed by the three-term recurrence in degree seeded with
/// the closed form at n = max(|m|, |m'|).
inline std::vector<Eigen::MatrixXd> wigner_d_matrices(int N, double beta) {
  std::vector<Eigen::MatrixXd> d(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) d[static_cast<std::size_t>(n)] = Eigen::MatrixXd::Zero(2 * n + 1, 2 * n + 1);
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const double cb = std::cos(beta);

  // c^p s^q sqrt(binom(2j, j+mu)) evaluated in log space; zero bases give 0 for p, q > 0.
  auto seed = [&](int j, int mu, int p, int q) {
    if ((p > 0 && c == 0.0) || (q > 0 && s == 0.0)) return 0.0;
    const double log_binom = std::lgamma(2.0 * j + 1.0) - std::lgamma(j + mu + 1.0) - std::lgamma(j - mu + 1.0);
    double log_mag = 0.5 * log_binom;
    double sign = 1.0;
    if (p > 0) {
      log_mag += p * std::log(std::abs(c));
      if (c < 0.0 && p % 2 == 1) sign = -sign;
    }
    if (q > 0) {
      log_mag += q * std::log(std::abs(s));
      if (s < 0.0 && q % 2 == 1) sign = -sign;
    }
    return sign * std::exp(log_mag);
  };

  for (int mp = -N; mp <= N; ++mp) {
    for (int m = -N; m <= N; ++m) {
      const int l0 = std::max(std::abs(m), std::abs(mp));
      double start;
      if (std::abs(mp) >= std::abs(m)) {
        if (mp == l0) {
          start = parity(l0 - m) * seed(l0, m, l0 + m, l0 - m);
        } else {
          start = seed(l0, m, l0 - m, l0 + m);
        }
      } else {
        if (m == l0) {
          start = seed(l0, mp, l0 + mp, l0 - mp);
        } else {
          start = parity(l0 + mp) * seed(l0, mp, l0 - mp, l0 + mp);
        }
      }
      double prev = 0.0;
      double cur = start;
      d[static_cast<std::size_t>(l0)](mp + l0, m + l0) = cur;
      int l = l0;
      if (l0 == 0 && N >= 1) {
        prev = cur;
        cur = cb;
        d[1](1, 1) = cur;
        l = 1;
      }
      for (; l < N; ++l) {
        const double l2 = static_cast<double>(l) * l;
        const double lp2 = (l + 1.0) * (l + 1.0);
        const double mm = static_cast<double>(m) * m;
        const double mpmp = static_cast<double>(mp) * mp;
        const double next =
            ((2.0 * l + 1.0) * (l * (l + 1.0) * cb - static_cast<double>(m) * mp) * cur -
             (l + 1.0) * std::sqrt(std::max(0.0, (l2 - mm) * (l2 - mpmp))) * prev) /
            (l * std::sqrt((lp2 - mm) * (lp2 - mpmp)));
        prev = cur;
        cur = next;
        d[static_cast<std::size_t>(l) + 1](mp + l + 1, m + l + 1) = cur;
      }
    }
  }
  return d;
}

/// Per-degree rotation blocks W_n acting on expansion coefficients.
///
/// For a rotation Rot taking world coordinates u to rotated coordinates
/// u' = Rot u, Sum_m c_m Y_n^m(u) = Sum_m' (W_n c)_m' Y_n^m'(u'). The rotation
/// is parameterized as Rot = R_y(tilt) R_z(-azimuth), which is how directions
/// are brought onto the z axis.
inline std::vector<ComplexMatrix> rotation_blocks(int N, double azimuth, double tilt) {
  const auto d = wigner_d_matrices(N, tilt);
  std::vector<ComplexMatrix> w(d.size());
  for (int n = 0; n <= N; ++n) {
    auto& block = w[static_cast<std::size_t>(n)];
    block = d[static_cast<std::size_t>(n)].cast<Complex>();
    for (int m = -n; m <= n; ++m) block.col(m + n) *= std::polar(1.0, m * azimuth);
  }
  return w;
}

/// Applies per-degree blocks to a packed coefficient vector.
inline ComplexVector apply_rotation(const std::vector<ComplexMatrix>& blocks, const ComplexVector& c) {
  const int N = truncation_for_count(c.size());
  if (N >= static_cast<int>(blocks.size())) throw IndexError("rotation blocks shorter than expansion");
  ComplexVector out(c.size());
  for (int n = 0; n <= N; ++n) out.segment(n * n, 2 * n + 1) = blocks[static_cast<std::size_t>(n)] * c.segment(n * n, 2 * n + 1);
  return out;
}

/// 3x3 matrix of Rot = R_y(tilt) R_z(-azimuth).
inline Eigen::Matrix3d rotation_matrix(double azimuth, double tilt) {
  return (Eigen::AngleAxisd(tilt, Vec3::UnitY()) * Eigen::AngleAxisd(-azimuth, Vec3::UnitZ())).toRotationMatrix();
}

}  // namespace msa
