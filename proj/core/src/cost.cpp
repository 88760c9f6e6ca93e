// SPDX-License-Identifier: Apache-2.0
#include "sasa/cost.hpp"

#include <algorithm>
#include <chrono>
#include <Eigen/Dense>
#include <iomanip>
#include <json.hpp>
#include <ostream>

#include "sasa/attention.hpp"
#include "sasa/error.hpp"
#include "sasa/pipeline.hpp"

namespace sasa::cost {

using mask::AttentionConfig;

std::size_t analytic_block_bound(const AttentionConfig& cfg) {
  cfg.validate();
  const std::size_t nb = cfg.num_blocks();
  const std::size_t per_row = cfg.w + cfg.global_blocks.size() + 2 * cfg.k;
  return nb * std::min(nb, per_row);
}

CostReport report_for_mask(const AttentionConfig& cfg, const mask::BlockMask& mask) {
  CostReport r;
  r.n = cfg.n;
  r.b = cfg.b;
  r.w = cfg.w;
  r.g = cfg.global_blocks.size();
  r.k = cfg.k;
  r.selected_blocks = mask.selected_count();
  r.dense_blocks = cfg.num_blocks() * cfg.num_blocks();
  r.score_cells_sparse = r.selected_blocks * cfg.b * cfg.b;
  r.score_cells_dense = cfg.n * cfg.n;
  r.ratio = static_cast<double>(r.score_cells_sparse) / static_cast<double>(r.score_cells_dense);
  r.peak_score_bytes = attention::BlockSparseScores(mask, cfg.b).bytes();
  r.fixtures_measured = 1;
  return r;
}

namespace {

double median_forward_seconds(const AttentionConfig& cfg, const mask::BlockMask& mask,
                              const ScalingOptions& opts) {
  Rng rng(opts.seed);
  const attention::AttentionTensors t{random_matrix(rng, cfg.n, opts.d_head),
                                      random_matrix(rng, cfg.n, opts.d_head),
                                      random_matrix(rng, cfg.n, opts.d_head),
                                      mask,
                                      cfg.b,
                                      std::nullopt};
  std::vector<double> times;
  const std::size_t runs = std::max<std::size_t>(1, opts.timing_runs);
  // One untimed pass to warm caches.
  (void)attention::sparse_attention_forward(t);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const auto out = attention::sparse_attention_forward(t);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(runs / 2),
                   times.end());
  return times[runs / 2];
}

}  // namespace

ScalingResult measure_scaling(std::span<const AttentionConfig> sweep,
                              std::span<const Fixture> fixtures, const ScalingOptions& opts) {
  if (opts.vocab == nullptr) throw InvalidArgument("measure_scaling: vocabulary required");
  ScalingResult result;
  for (std::size_t c = 0; c < sweep.size(); ++c) {
    const AttentionConfig& cfg = sweep[c];
    cfg.validate();
    std::optional<CostReport> worst;
    std::optional<mask::BlockMask> worst_mask;
    std::size_t measured = 0;
    for (const Fixture& fx : fixtures) {
      try {
        const PreparedInput in = prepare_input(fx.source, fx.language, *opts.vocab,
                                               opts.frequency, cfg.n, opts.tree_distance);
        if (in.tokens.size() < cfg.n) {
          throw InvalidArgument("fixture has " + std::to_string(in.tokens.size()) +
                                " tokens, fewer than n=" + std::to_string(cfg.n));
        }
        mask::BlockMask m = mask::build_mask(cfg, in.pair_scores, in.adjacency);
        CostReport r = report_for_mask(cfg, m);
        ++measured;
        if (!worst || r.selected_blocks > worst->selected_blocks) {
          worst = r;
          worst_mask = std::move(m);
        }
      } catch (const std::exception& e) {
        result.failures.push_back({c, fx.name, e.what()});
      }
    }
    if (!worst) continue;
    worst->fixtures_measured = measured;
    worst->wall_time = median_forward_seconds(cfg, *worst_mask, opts);
    result.reports.push_back(*worst);
  }
  return result;
}

PolynomialFit fit_polynomial(std::span<const double> xs, std::span<const double> ys,
                             std::size_t degree) {
  if (xs.size() != ys.size()) throw InvalidArgument("fit_polynomial: x and y sizes differ");
  if (xs.size() <= degree) throw InvalidArgument("fit_polynomial: too few points for degree");
  const auto rows = static_cast<Eigen::Index>(xs.size());
  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double power = 1.0;
    for (Eigen::Index p = 0; p < cols; ++p) {
      design(r, p) = power;
      power *= xs[static_cast<std::size_t>(r)];
    }
    target(r) = ys[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd residual = target - design * coef;
  const double mean = target.mean();
  const double ss_tot = (target.array() - mean).square().sum();
  const double ss_res = residual.squaredNorm();

  PolynomialFit fit;
  fit.coefficients.assign(coef.data(), coef.data() + coef.size());
  fit.r_squared = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  return fit;
}

std::string to_json_line(const CostReport& r) {
  const nlohmann::json j = {{"n", r.n},
                            {"b", r.b},
                            {"w", r.w},
                            {"g", r.g},
                            {"k", r.k},
                            {"selected_blocks", r.selected_blocks},
                            {"dense_blocks", r.dense_blocks},
                            {"score_cells_sparse", r.score_cells_sparse},
                            {"score_cells_dense", r.score_cells_dense},
                            {"ratio", r.ratio},
                            {"wall_time", r.wall_time},
                            {"peak_score_bytes", r.peak_score_bytes},
                            {"fixtures_measured", r.fixtures_measured}};
  return j.dump();
}

CostReport from_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    CostReport r;
    j.at("n").get_to(r.n);
    j.at("b").get_to(r.b);
    j.at("w").get_to(r.w);
    j.at("g").get_to(r.g);
    j.at("k").get_to(r.k);
    j.at("selected_blocks").get_to(r.selected_blocks);
    j.at("dense_blocks").get_to(r.dense_blocks);
    j.at("score_cells_sparse").get_to(r.score_cells_sparse);
    j.at("score_cells_dense").get_to(r.score_cells_dense);
    j.at("ratio").get_to(r.ratio);
    j.at("wall_time").get_to(r.wall_time);
    j.at("peak_score_bytes").get_to(r.peak_score_bytes);
    j.at("fixtures_measured").get_to(r.fixtures_measured);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("cost report: ") + e.what());
  }
}

void write_json_lines(std::ostream& out, std::span<const CostReport> reports) {
  for (const auto& r : reports) out << to_json_line(r) << '\n';
}

void write_table(std::ostream& out, std::span<const CostReport> reports) {
  out << std::left << std::setw(7) << "n" << std::setw(5) << "b" << std::setw(4) << "w"
      << std::setw(4) << "g" << std::setw(4) << "k" << std::setw(10) << "selected"
      << std::setw(10) << "dense" << std::setw(10) << "ratio" << std::setw(12) << "time_ms"
      << "score_bytes\n";
  for (const auto& r : reports) {
    out << std::setw(7) << r.n << std::setw(5) << r.b << std::setw(4) << r.w << std::setw(4)
        << r.g << std::setw(4) << r.k << std::setw(10) << r.selected_blocks << std::setw(10)
        << r.dense_blocks << std::setw(10) << std::fixed << std::setprecision(4) << r.ratio
        << std::setw(12) << std::setprecision(3) << r.wall_time * 1e3 << r.peak_score_bytes
        << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

namespace {

const char* const kNames[] = {"count", "total", "index", "limit", "value", "width",
                              "offset", "left", "right", "size", "step", "acc"};

std::string pick(Rng& rng) { return kNames[rng.below(std::size(kNames))]; }

std::string function_body(Rng& rng, bool java) {
  const std::string a = pick(rng);
  const std::string b = pick(rng) + "2";
  std::string s;
  s += "    int " + a + " = x + y * " + std::to_string(rng.below(9) + 1) + ";\n";
  s += "    int " + b + " = 0;\n";
  switch (rng.below(4)) {
    case 0:
      s += "    for (int i = 0; i < x; i++) {\n      " + b + " += " + a + " % (i + 1);\n    }\n";
      break;
    case 1:
      s += "    while (" + a + " > 0 && " + b + " < 100) {\n      " + a + " = " + a +
           " - 3;\n      " + b + "++;\n    }\n";
      break;
    case 2:
      s += "    if (" + a + " > y) {\n      " + b + " = " + a + " - y;\n    } else {\n      " +
           b + " = y - " + a + ";\n    }\n";
      break;
    default:
      s += java ? "    " + b + " = Math.max(" + a + ", y) + x;\n"
                : "    " + b + " = helper(" + a + ", y) + x;\n";
      break;
  }
  s += "    return " + a + " + " + b + ";\n";
  return s;
}

}  // namespace

std::string synthetic_program(ast::Language lang, std::size_t min_tokens, Rng& rng) {
  const bool java = lang == ast::Language::Java;
  std::string head = java ? "public class Generated {\n" : "";
  std::string tail = java ? "}\n" : "";
  std::string body;
  std::size_t tokens = tokenizer::split_surface(head + tail).size();
  for (std::size_t f = 0; tokens < min_tokens; ++f) {
    std::string fn = java ? "  public int method" : "int function";
    fn += std::to_string(f) + "(int x, int y) {\n" + function_body(rng, java) + (java ? "  }\n" : "}\n");
    tokens += tokenizer::split_surface(fn).size();
    body += fn;
  }
  return head + body + tail;
}

}  // namespace sasa::cost
