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

// File formats.
//
// Binary matrix (all integers little-endian):
//   offset  size  field
//   0       8     magic "MSAMAT\0\0"
//   8       4     version (1)
//   12      4     dtype tag (1 = complex double)
//   16      8     rows
//   24      8     cols
//   32      8     tag (config or scene hash, 0 if unused)
//   40      ...   rows*cols pairs (re, im) of IEEE-754 doubles, row-major
//
// CSV grids: three '#' header lines (plane/offset, extent/resolution, config
// hash), then one row per v line.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "msa/eval.hpp"

namespace msa {

inline constexpr std::array<char, 8> kMatrixMagic{'M', 'S', 'A', 'M', 'A', 'T', '\0', '\0'};
inline constexpr std::uint32_t kMatrixVersion = 1;
inline constexpr std::uint32_t kDtypeComplex128 = 1;
inline constexpr std::size_t kMatrixHeaderBytes = 40;

struct TaggedMatrix {
  ComplexMatrix matrix;
  std::uint64_t tag = 0;
};

namespace detail {

template <typename T>
void put_le(std::string& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(bytes.data(), bytes.size());
}

template <typename T>
T get_le(const char* p) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace detail

inline std::string encode_matrix(const ComplexMatrix& m, std::uint64_t tag = 0) {
  std::string buf;
  buf.reserve(kMatrixHeaderBytes + static_cast<std::size_t>(m.size()) * 16);
  buf.append(kMatrixMagic.data(), kMatrixMagic.size());
  detail::put_le(buf, kMatrixVersion);
  detail::put_le(buf, kDtypeComplex128);
  detail::put_le(buf, static_cast<std::uint64_t>(m.rows()));
  detail::put_le(buf, static_cast<std::uint64_t>(m.cols()));
  detail::put_le(buf, tag);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_le(buf, m(i, j).real());
      detail::put_le(buf, m(i, j).imag());
    }
  }
  return buf;
}

inline TaggedMatrix decode_matrix(const std::string& buf) {
  if (buf.size() < kMatrixHeaderBytes) throw FormatError("matrix file header is truncated");
  if (std::memcmp(buf.data(), kMatrixMagic.data(), kMatrixMagic.size()) != 0) throw FormatError("bad matrix magic");
  const auto version = detail::get_le<std::uint32_t>(buf.data() + 8);
  if (version != kMatrixVersion) throw FormatError("unsupported matrix version " + std::to_string(version));
  const auto dtype = detail::get_le<std::uint32_t>(buf.data() + 12);
  if (dtype != kDtypeComplex128) throw FormatError("unsupported matrix dtype " + std::to_string(dtype));
  const auto rows = detail::get_le<std::uint64_t>(buf.data() + 16);
  const auto cols = detail::get_le<std::uint64_t>(buf.data() + 24);
  const auto tag = detail::get_le<std::uint64_t>(buf.data() + 32);
  constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 31;
  if (rows >= kMaxDim || cols >= kMaxDim) throw FormatError("corrupt matrix dimensions");
  const std::uint64_t payload = rows * cols * 16;
  if (buf.size() - kMatrixHeaderBytes != payload) {
    throw FormatError("matrix payload has " + std::to_string(buf.size() - kMatrixHeaderBytes) + " bytes, header implies " +
                      std::to_string(payload));
  }
  TaggedMatrix out{ComplexMatrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)), tag};
  const char* p = buf.data() + kMatrixHeaderBytes;
  for (Eigen::Index i = 0; i < out.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.matrix.cols(); ++j, p += 16) {
      out.matrix(i, j) = {detail::get_le<double>(p), detail::get_le<double>(p + 8)};
    }
  }
  return out;
}

inline void export_matrix(const std::filesystem::path& path, const ComplexMatrix& m, std::uint64_t tag = 0) {
  detail::write_file(path, encode_matrix(m, tag));
}

inline TaggedMatrix import_matrix(const std::filesystem::path& path) { return decode_matrix(detail::read_file(path)); }

/// Import with an expected shape.
inline TaggedMatrix import_matrix(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols) {
  TaggedMatrix t = import_matrix(path);
  if (t.matrix.rows() != rows || t.matrix.cols() != cols) {
    throw FormatError("matrix in " + path.string() + " is " + std::to_string(t.matrix.rows()) + "x" +
                      std::to_string(t.matrix.cols()) + ", expected " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
  return t;
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

inline std::string grid_header(const GridSpec& g, std::uint64_t config_hash) {
  std::string h;
  h += "# plane=" + std::string(to_string(g.plane)) + " offset=" + format_double(g.offset) + "\n";
  h += "# center=" + format_double(g.center_u) + "," + format_double(g.center_v) + " extent=" + format_double(g.width) +
       "x" + format_double(g.height) + " resolution=" + format_double(g.resolution) + " pixels=" +
       std::to_string(g.nu()) + "x" + std::to_string(g.nv()) + "\n";
  h += "# config_hash=" + hex_hash(config_hash) + "\n";
  return h;
}

}  // namespace detail

/// Complex grid as CSV: each row holds re,im pairs for one v line.
inline std::string field_csv(const FieldGrid& f, std::uint64_t config_hash) {
  std::string out = detail::grid_header(f.spec, config_hash);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) {
      if (j) out += ',';
      out += detail::format_double(f.values(i, j).real());
      out += ',';
      out += detail::format_double(f.values(i, j).imag());
    }
    out += '\n';
  }
  return out;
}

/// SDR map as CSV in dB; masked pixels are written as "nan".
inline std::string sdr_csv(const SdrReport& rep, const GridSpec& spec, std::uint64_t config_hash) {
  std::string out = detail::grid_header(spec, config_hash);
  for (Eigen::Index i = 0; i < rep.sdr.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.sdr.cols(); ++j) {
      if (j) out += ',';
      out += rep.mask(i, j) ? std::string("nan") : detail::format_double(rep.sdr(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) { detail::write_file(path, text); }

}  // namespace msa
