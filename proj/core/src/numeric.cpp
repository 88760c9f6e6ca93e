// SPDX-License-Identifier: Apache-2.0
#include "sasa/numeric.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sasa/error.hpp"

namespace sasa {

void masked_row_softmax_inplace(std::span<double> row, std::span<const std::uint8_t> allowed,
                                double scale) {
  if (row.size() != allowed.size()) {
    throw InvalidArgument("masked_row_softmax: scores and mask lengths differ");
  }
  double peak = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (allowed[i]) {
      peak = std::max(peak, scale * row[i]);
      any = true;
    }
  }
  if (!any) {
    throw ContractViolation("masked_row_softmax: row has no allowed entries");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (allowed[i]) {
      row[i] = std::exp(scale * row[i] - peak);
      total += row[i];
    } else {
      row[i] = 0.0;
    }
  }
  const double inv = 1.0 / total;
  for (std::size_t i = 0; i < row.size(); ++i) row[i] *= inv;
}

std::vector<double> masked_row_softmax(std::span<const double> scores,
                                       std::span<const std::uint8_t> allowed, double scale) {
  std::vector<double> out(scores.begin(), scores.end());
  masked_row_softmax_inplace(out, allowed, scale);
  return out;
}

Matrix finite_diff_gradient(const ScalarFunction& f, const Matrix& x, double eps) {
  if (!(eps > 0.0)) {
    throw InvalidArgument("finite_diff_gradient: eps must be positive");
  }
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  auto cells = probe.data();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double saved = cells[i];
    cells[i] = saved + eps;
    const double up = f(probe);
    cells[i] = saved - eps;
    const double down = f(probe);
    cells[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_gradient: non-finite evaluation at entry " +
                         std::to_string(i));
    }
    grad.data()[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace sasa
