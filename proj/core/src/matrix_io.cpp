// SPDX-License-Identifier: Apache-2.0
#include "sasa/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "sasa/error.hpp"

namespace sasa {
namespace {

constexpr std::array<char, 4> kMagic = {'S', 'A', 'S', 'A'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw FormatError(std::string("matrix file truncated while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("write_matrix: dimensions exceed u32");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kMatrixFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) put_le<double>(out, v);
}

Matrix read_matrix(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("matrix file: bad magic (expected \"SASA\")");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kMatrixFormatVersion) {
    throw FormatError("matrix file: unsupported version " + std::to_string(version));
  }
  const auto rows = get_le<std::uint32_t>(in, "rows");
  const auto cols = get_le<std::uint32_t>(in, "cols");
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  for (double& v : data) v = get_le<double>(in, "data");
  try {
    return Matrix(rows, cols, std::move(data));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("matrix file: ") + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_matrix(out, m);
  if (!out) throw FormatError("write failed for " + path.string());
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace sasa
