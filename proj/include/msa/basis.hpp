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

// Spherical Bessel/Hankel functions, complex orthonormal spherical harmonics
// and the regular/singular solutions of the Helmholtz equation built on them.
//
// Conventions:
//   Y_n^m(theta, phi) = sqrt((2n+1)/(4pi) (n-m)!/(n+m)!) P_n^m(cos theta) e^{i m phi}
//   P_n^m carries the Condon-Shortley phase (-1)^m.
//   Y_n^{-m} = (-1)^m conj(Y_n^m).
//   Coefficients are packed 0-based at l = n^2 + n + m.
//   theta is measured from +z, phi from +x; phi = 0 on the z axis.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "msa/common.hpp"

namespace msa {

struct HarmonicIndex {
  int n = 0;
  int m = 0;

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
};

constexpr int packed_index(int n, int m) { return n * n + n + m; }
constexpr int packed_index(HarmonicIndex idx) { return packed_index(idx.n, idx.m); }
constexpr int coefficient_count(int truncation) { return (truncation + 1) * (truncation + 1); }

inline HarmonicIndex unpack_index(int l) {
  if (l < 0) throw IndexError("packed index must be >= 0, got " + std::to_string(l));
  int n = static_cast<int>(std::sqrt(static_cast<double>(l)));
  while (n * n > l) --n;
  while ((n + 1) * (n + 1) <= l) ++n;
  return {n, l - n * n - n};
}

// Truncation degree N such that (N+1)^2 == count; throws if count is not square.
inline int truncation_for_count(Eigen::Index count) {
  if (count <= 0) throw IndexError("coefficient count must be > 0");
  const int n = unpack_index(static_cast<int>(count) - 1).n;
  if (coefficient_count(n) != count) {
    throw IndexError("coefficient count " + std::to_string(count) + " is not a perfect square");
  }
  return n;
}

/// Expansion weights at a fixed wavenumber, truncated at degree N and packed
/// by l = n^2 + n + m.
class CoefficientVector {
 public:
  CoefficientVector(double k, int truncation)
      : k_(k), truncation_(truncation),
        values_(ComplexVector::Zero(coefficient_count(check_truncation(truncation)))) {}

  CoefficientVector(double k, int truncation, ComplexVector values)
      : k_(k), truncation_(check_truncation(truncation)), values_(std::move(values)) {
    if (values_.size() != coefficient_count(truncation_)) {
      throw IndexError("coefficient vector length " + std::to_string(values_.size()) +
                       " does not match truncation " + std::to_string(truncation_));
    }
  }

  double wavenumber() const { return k_; }
  int truncation() const { return truncation_; }
  Eigen::Index size() const { return values_.size(); }
  const ComplexVector& values() const { return values_; }
  ComplexVector& values() { return values_; }

  Complex operator()(int n, int m) const { return values_(checked(n, m)); }
  Complex& operator()(int n, int m) { return values_(checked(n, m)); }

  // Keeps entries n <= truncation unchanged.
  CoefficientVector truncated(int truncation) const {
    if (truncation > truncation_) {
      throw IndexError("cannot truncate degree " + std::to_string(truncation_) + " up to " +
                       std::to_string(truncation));
    }
    return {k_, truncation, values_.head(coefficient_count(truncation))};
  }

  // Truncates or zero-pads to the requested degree.
  CoefficientVector resized(int truncation) const {
    CoefficientVector out(k_, truncation);
    const auto common = std::min(out.size(), size());
    out.values_.head(common) = values_.head(common);
    return out;
  }

 private:
  static int check_truncation(int truncation) {
    if (truncation < 0) throw IndexError("truncation degree must be >= 0");
    return truncation;
  }
  Eigen::Index checked(int n, int m) const {
    if (n < 0 || n > truncation_ || std::abs(m) > n) {
      throw IndexError("harmonic index (" + std::to_string(n) + "," + std::to_string(m) +
                       ") outside truncation " + std::to_string(truncation_));
    }
    return packed_index(n, m);
  }

  double k_;
  int truncation_;
  ComplexVector values_;
};

// ---------------------------------------------------------------------------
// Spherical Bessel functions

namespace detail {

inline double sph_j0(double x) { return std::sin(x) / x; }
inline double sph_j1(double x) { return std::sin(x) / (x * x) - std::cos(x) / x; }

inline std::vector<double> sph_bessel_j_upward(int N, double x) {
  std::vector<double> j(static_cast<std::size_t>(N) + 1);
  j[0] = sph_j0(x);
  if (N >= 1) j[1] = sph_j1(x);
  for (int n = 1; n < N; ++n) {
    j[n + 1] = (2.0 * n + 1.0) / x * j[n] - j[n - 1];
  }
  return j;
}

// Miller's algorithm: recur downward from well above max(N, x) and normalize
// against the closed-form j0 or j1, whichever has the larger magnitude.
inline std::vector<double> sph_bessel_j_downward(int N, double x) {
  const double top = std::max(static_cast<double>(N), x);
  const int start = static_cast<int>(std::ceil(top)) + 20 + static_cast<int>(std::ceil(std::sqrt(40.0 * top)));
  std::vector<double> f(static_cast<std::size_t>(std::max(N, 1)) + 1, 0.0);
  double next = 0.0;     // f_{n+1}
  double current = 1e-300;  // f_n
  for (int n = start; n > 0; --n) {
    const double prev = (2.0 * n + 1.0) / x * current - next;  // f_{n-1}
    next = current;
    current = prev;
    if (n - 1 < static_cast<int>(f.size())) f[n - 1] = current;
    if (n < static_cast<int>(f.size())) f[n] = next;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      for (auto& v : f) v *= 1e-250;
    }
  }
  const double j0 = sph_j0(x);
  const double j1 = sph_j1(x);
  const double scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f[0] : j1 / f[1];
  f.resize(static_cast<std::size_t>(N) + 1);
  for (auto& v : f) v *= scale;
  return f;
}

}  // namespace detail

/// j_0(x) .. j_N(x) for x >= 0.
inline std::vector<double> sph_bessel_j_array(int N, double x) {
  if (N < 0) throw IndexError("spherical Bessel degree must be >= 0");
  if (x < 0.0) throw DomainError("spherical Bessel argument must be >= 0");
  if (x == 0.0) {
    std::vector<double> j(static_cast<std::size_t>(N) + 1, 0.0);
    j[0] = 1.0;
    return j;
  }
  if (N <= x) return detail::sph_bessel_j_upward(N, x);
  return detail::sph_bessel_j_downward(N, x);
}

/// y_0(x) .. y_N(x) for x > 0 by upward recurrence.
inline std::vector<double> sph_bessel_y_array(int N, double x) {
  if (N < 0) throw IndexError("spherical Bessel degree must be >= 0");
  if (!(x > 0.0)) throw DomainError("spherical Neumann function is singular at x = 0");
  std::vector<double> y(static_cast<std::size_t>(N) + 1);
  y[0] = -std::cos(x) / x;
  if (N >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 1; n < N; ++n) {
    y[n + 1] = (2.0 * n + 1.0) / x * y[n] - y[n - 1];
  }
  return y;
}

/// h_0(x) .. h_N(x), spherical Hankel functions of the first kind, x > 0.
inline std::vector<Complex> sph_hankel1_array(int N, double x) {
  if (!(x > 0.0)) throw DomainError("spherical Hankel function is singular at x = 0");
  const auto j = sph_bessel_j_array(N, x);
  const auto y = sph_bessel_y_array(N, x);
  std::vector<Complex> h(j.size());
  for (std::size_t n = 0; n < j.size(); ++n) h[n] = {j[n], y[n]};
  return h;
}

inline double sph_bessel_j(int n, double x) { return sph_bessel_j_array(n, x)[static_cast<std::size_t>(n)]; }
inline Complex sph_hankel1(int n, double x) { return sph_hankel1_array(n, x)[static_cast<std::size_t>(n)]; }

namespace detail {

// f'_n from an array holding f_0 .. f_{n+1} at x != 0.
template <typename T>
T sph_deriv_from(const std::vector<T>& f, int n, double x) {
  if (n == 0) return -f[1];
  return f[static_cast<std::size_t>(n) - 1] - (n + 1.0) / x * f[static_cast<std::size_t>(n)];
}

}  // namespace detail

inline double sph_bessel_j_deriv(int n, double x) {
  if (n < 0) throw IndexError("spherical Bessel degree must be >= 0");
  if (x == 0.0) return n == 1 ? 1.0 / 3.0 : 0.0;
  return detail::sph_deriv_from(sph_bessel_j_array(n + 1, x), n, x);
}

inline Complex sph_hankel1_deriv(int n, double x) {
  if (n < 0) throw IndexError("spherical Bessel degree must be >= 0");
  return detail::sph_deriv_from(sph_hankel1_array(n + 1, x), n, x);
}

enum class BesselKind { j, h };

// Derivative with respect to the argument; the j kind returns a real value in
// the complex result.
inline Complex sph_bessel_deriv(BesselKind kind, int n, double x) {
  return kind == BesselKind::j ? Complex(sph_bessel_j_deriv(n, x)) : sph_hankel1_deriv(n, x);
}

/// Derivatives f'_0 .. f'_N given f_0 .. f_{N+1}.
template <typename T>
std::vector<T> sph_deriv_array(const std::vector<T>& f, double x) {
  std::vector<T> d(f.size() - 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = detail::sph_deriv_from(f, static_cast<int>(n), x);
  return d;
}

// ---------------------------------------------------------------------------
// Legendre functions and spherical harmonics

/// Associated Legendre function with the Condon-Shortley phase, 0 <= m <= n.
inline double assoc_legendre(int n, int m, double x) {
  if (m < 0 || m > n) {
    throw IndexError("associated Legendre requires 0 <= m <= n, got n=" + std::to_string(n) +
                     " m=" + std::to_string(m));
  }
  if (std::abs(x) > 1.0) throw DomainError("associated Legendre argument outside [-1, 1]");
  double pmm = 1.0;
  const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
  double odd = 1.0;
  for (int i = 1; i <= m; ++i) {
    pmm *= -odd * somx2;
    odd += 2.0;
  }
  if (n == m) return pmm;
  double pmm1 = x * (2.0 * m + 1.0) * pmm;
  for (int l = m + 2; l <= n; ++l) {
    const double pll = ((2.0 * l - 1.0) * x * pmm1 - (l + m - 1.0) * pmm) / (l - m);
    pmm = pmm1;
    pmm1 = pll;
  }
  return pmm1;
}

constexpr int triangular_index(int n, int m) { return n * (n + 1) / 2 + m; }

/// Orthonormalized Legendre values Pbar_n^m(x) for 0 <= m <= n <= N, with
/// Y_n^m = Pbar_n^m e^{i m phi}. Stored at triangular_index(n, m).
/// `sine` is sqrt(1 - x^2), passed separately to avoid cancellation near the poles.
inline std::vector<double> normalized_legendre_table(int N, double x, double sine) {
  std::vector<double> p(static_cast<std::size_t>(triangular_index(N, N)) + 1, 0.0);
  p[0] = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= N; ++m) {
    p[triangular_index(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sine * p[triangular_index(m - 1, m - 1)];
  }
  for (int m = 0; m < N; ++m) {
    p[triangular_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[triangular_index(m, m)];
  }
  for (int m = 0; m <= N; ++m) {
    for (int n = m + 2; n <= N; ++n) {
      const double a = std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - static_cast<double>(m) * m));
      const double b = std::sqrt((2.0 * n + 1.0) / (2.0 * n - 3.0) *
                                 ((n - 1.0) * (n - 1.0) - static_cast<double>(m) * m) /
                                 (static_cast<double>(n) * n - static_cast<double>(m) * m));
      p[triangular_index(n, m)] = a * x * p[triangular_index(n - 1, m)] - b * p[triangular_index(n - 2, m)];
    }
  }
  return p;
}

/// Direction of a point in spherical coordinates. For points on the z axis
/// (including the origin) the azimuth is 0.
struct SphericalPoint {
  double r = 0.0;
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  Complex e_iphi{1.0, 0.0};

  double theta() const { return std::atan2(sin_theta, cos_theta); }
  double phi() const {
    const double p = std::atan2(e_iphi.imag(), e_iphi.real());
    return p < 0.0 ? p + 2.0 * kPi : p;
  }
};

inline SphericalPoint to_spherical(const Vec3& v) {
  SphericalPoint s;
  s.r = v.norm();
  const double rho = std::hypot(v.x(), v.y());
  if (s.r == 0.0) return s;
  s.cos_theta = v.z() / s.r;
  s.sin_theta = rho / s.r;
  if (rho > 0.0) s.e_iphi = Complex(v.x() / rho, v.y() / rho);
  return s;
}

inline Vec3 direction_from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

/// All Y_n^m, n <= N, at one direction, packed by l.
inline ComplexVector spherical_harmonics(int N, const SphericalPoint& dir) {
  const auto p = normalized_legendre_table(N, dir.cos_theta, dir.sin_theta);
  ComplexVector y(coefficient_count(N));
  Complex phase{1.0, 0.0};
  for (int m = 0; m <= N; ++m) {
    const double sign = parity(m);
    for (int n = m; n <= N; ++n) {
      const Complex v = p[triangular_index(n, m)] * phase;
      y(packed_index(n, m)) = v;
      if (m > 0) y(packed_index(n, -m)) = sign * std::conj(v);
    }
    phase *= dir.e_iphi;
  }
  return y;
}

inline ComplexVector spherical_harmonics(int N, double theta, double phi) {
  SphericalPoint dir;
  dir.r = 1.0;
  dir.cos_theta = std::cos(theta);
  dir.sin_theta = std::sin(theta);
  dir.e_iphi = std::polar(1.0, phi);
  return spherical_harmonics(N, dir);
}

inline Complex sph_harm(int n, int m, double theta, double phi) {
  if (n < 0 || std::abs(m) > n) {
    throw IndexError("spherical harmonic index requires |m| <= n, got n=" + std::to_string(n) +
                     " m=" + std::to_string(m));
  }
  return spherical_harmonics(n, theta, phi)(packed_index(n, m));
}

// ---------------------------------------------------------------------------
// Regular and singular basis functions about an arbitrary center

enum class BasisKind { regular, singular };

/// Values of R_l (regular, j_n) or S_l (singular, h_n) for all l up to
/// degree N at `r` relative to `center`.
inline ComplexVector basis_values(BasisKind kind, int N, double k, const Vec3& r, const Vec3& center) {
  const SphericalPoint sp = to_spherical(r - center);
  ComplexVector out = spherical_harmonics(N, sp);
  if (kind == BasisKind::regular) {
    const auto j = sph_bessel_j_array(N, k * sp.r);
    for (int n = 0; n <= N; ++n) out.segment(n * n, 2 * n + 1) *= j[static_cast<std::size_t>(n)];
  } else {
    if (sp.r == 0.0) throw DomainError("singular basis evaluated at its own center");
    const auto h = sph_hankel1_array(N, k * sp.r);
    for (int n = 0; n <= N; ++n) out.segment(n * n, 2 * n + 1) *= h[static_cast<std::size_t>(n)];
  }
  return out;
}

inline Complex eval_regular_basis(HarmonicIndex idx, double k, const Vec3& r, const Vec3& center) {
  if (idx.n < 0 || std::abs(idx.m) > idx.n) throw IndexError("invalid harmonic index");
  return basis_values(BasisKind::regular, idx.n, k, r, center)(packed_index(idx));
}

inline Complex eval_singular_basis(HarmonicIndex idx, double k, const Vec3& r, const Vec3& center) {
  if (idx.n < 0 || std::abs(idx.m) > idx.n) throw IndexError("invalid harmonic index");
  return basis_values(BasisKind::singular, idx.n, k, r, center)(packed_index(idx));
}

/// Sum_l c_l F_l(r - center).
inline Complex eval_expansion(BasisKind kind, const CoefficientVector& c, const Vec3& r, const Vec3& center) {
  return basis_values(kind, c.truncation(), c.wavenumber(), r, center).cwiseProduct(c.values()).sum();
}

using ComplexVec3 = std::array<Complex, 3>;

/// Gradient of Sum_l c_l F_l(r - center) in Cartesian components.
///
/// Uses the ladder relations for F_n^m = f_n(kr) Y_n^m, valid for every
/// spherical Bessel-type radial function f:
///   d/dz      F_n^m = k [ a(n,m) F_{n-1}^m - a(n+1,m) F_{n+1}^m ]
///   (dx+i dy) F_n^m = k [ b(n,m) F_{n-1}^{m+1} + c(n,m) F_{n+1}^{m+1} ]
///   (dx-i dy) F_n^m = -k [ b(n,-m) F_{n-1}^{m-1} + c(n,-m) F_{n+1}^{m-1} ]
/// with a(n,m) = sqrt((n-m)(n+m)/((2n-1)(2n+1))),
///      b(n,m) = sqrt((n-m-1)(n-m)/((2n-1)(2n+1))),
///      c(n,m) = sqrt((n+m+1)(n+m+2)/((2n+1)(2n+3))).
inline ComplexVec3 eval_expansion_gradient(BasisKind kind, const CoefficientVector& c, const Vec3& r,
                                           const Vec3& center) {
  const int N = c.truncation();
  const double k = c.wavenumber();
  const ComplexVector f = basis_values(kind, N + 1, k, r, center);
  auto at = [&](int n, int m) -> Complex {
    if (n < 0 || std::abs(m) > n) return 0.0;
    return f(packed_index(n, m));
  };
  auto a = [](int n, int m) {
    if (n <= 0) return 0.0;
    return std::sqrt(static_cast<double>((n - m) * (n + m)) / ((2.0 * n - 1.0) * (2.0 * n + 1.0)));
  };
  auto b = [](int n, int m) {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(0.0, static_cast<double>((n - m - 1) * (n - m))) /
                     ((2.0 * n - 1.0) * (2.0 * n + 1.0)));
  };
  auto cc = [](int n, int m) {
    return std::sqrt(static_cast<double>((n + m + 1) * (n + m + 2)) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)));
  };
  Complex dz = 0.0, dplus = 0.0, dminus = 0.0;
  for (int n = 0; n <= N; ++n) {
    for (int m = -n; m <= n; ++m) {
      const Complex w = c.values()(packed_index(n, m));
      if (w == Complex(0.0)) continue;
      dz += w * (a(n, m) * at(n - 1, m) - a(n + 1, m) * at(n + 1, m));
      dplus += w * (b(n, m) * at(n - 1, m + 1) + cc(n, m) * at(n + 1, m + 1));
      dminus -= w * (b(n, -m) * at(n - 1, m - 1) + cc(n, -m) * at(n + 1, m - 1));
    }
  }
  dz *= k;
  dplus *= k;
  dminus *= k;
  return {0.5 * (dplus + dminus), (dplus - dminus) / (2.0 * kI), dz};
}

}  // namespace msa
