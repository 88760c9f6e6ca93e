// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/random.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"

namespace sasa::cost {

/// ceil(n/b) * min(ceil(n/b), w + |g| + 2k).
std::size_t analytic_block_bound(const mask::AttentionConfig& cfg);

struct CostReport {
  std::size_t n = 0;
  std::size_t b = 0;
  std::size_t w = 0;
  std::size_t g = 0;
  std::size_t k = 0;
  std::size_t selected_blocks = 0;
  std::size_t dense_blocks = 0;
  std::size_t score_cells_sparse = 0;
  std::size_t score_cells_dense = 0;
  double ratio = 0.0;
  double wall_time = 0.0;
  std::size_t peak_score_bytes = 0;
  std::size_t fixtures_measured = 0;
};

struct Fixture {
  std::string name;
  std::string source;
  ast::Language language = ast::Language::Java;
};

struct FixtureFailure {
  std::size_t config_index = 0;
  std::string fixture;
  std::string message;
};

struct ScalingOptions {
  const tokenizer::Vocabulary* vocab = nullptr;
  /// Null means all-zero pair scores.
  const frequency::FrequencyMatrix* frequency = nullptr;
  std::uint32_t tree_distance = ast::kDefaultTreeDistance;
  /// Forward passes timed per configuration; the median is reported.
  std::size_t timing_runs = 5;
  std::size_t d_head = 16;
  std::uint64_t seed = 0;
};

struct ScalingResult {
  std::vector<CostReport> reports;
  std::vector<FixtureFailure> failures;
};

/// For every configuration, builds real masks from each fixture truncated to
/// cfg.n tokens. selected_blocks and peak_score_bytes are maxima over the
/// fixtures; wall_time is the median single-thread sparse forward time on
/// the worst fixture. Fixtures that fail to prepare, or hold fewer than
/// cfg.n tokens, are reported and skipped.
ScalingResult measure_scaling(std::span<const mask::AttentionConfig> sweep,
                              std::span<const Fixture> fixtures, const ScalingOptions& opts);

/// Report for an already-built mask, without timing.
CostReport report_for_mask(const mask::AttentionConfig& cfg, const mask::BlockMask& mask);

struct PolynomialFit {
  /// coefficients[p] multiplies x^p.
  std::vector<double> coefficients;
  double r_squared = 0.0;
};

/// Least-squares polynomial fit. Needs more points than the degree.
PolynomialFit fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                             std::size_t degree);

std::string to_json_line(const CostReport& report);
CostReport from_json_line(const std::string& line);
void write_json_lines(std::ostream& out, std::span<const CostReport> reports);
void write_table(std::ostream& out, std::span<const CostReport> reports);

/// A syntactically valid program of at least min_tokens surface tokens,
/// built from a repeating mix of statement shapes chosen by rng.
std::string synthetic_program(ast::Language lang, std::size_t min_tokens, Rng& rng);

}  // namespace sasa::cost
