// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sasa/matrix.hpp"

namespace sasa {

/// Softmax of scale·scores restricted to entries where allowed[i] != 0.
///
/// Disallowed entries come out as exactly 0. The maximum is taken over the
/// allowed set only. Throws ContractViolation when nothing is allowed.
std::vector<double> masked_row_softmax(std::span<const double> scores,
                                       std::span<const std::uint8_t> allowed, double scale);

/// In-place variant used by the attention kernels; `row` holds raw scores on
/// entry and probabilities on exit.
void masked_row_softmax_inplace(std::span<double> row, std::span<const std::uint8_t> allowed,
                                double scale);

using ScalarFunction = std::function<double(const Matrix&)>;

/// Central-difference gradient of f at x, one entry at a time.
Matrix finite_diff_gradient(const ScalarFunction& f, const Matrix& x, double eps);

}  // namespace sasa
