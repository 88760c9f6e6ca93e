// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "sasa/matrix.hpp"

namespace sasa {

/// Binary tensor layout: "SASA", then version, rows, cols as little-endian
/// u32, then rows·cols little-endian IEEE-754 doubles in row-major order.
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

}  // namespace sasa
