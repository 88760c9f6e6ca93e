// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances and case counts are fixed here.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sasa/attention.hpp"
#include "sasa/cost.hpp"
#include "sasa/encoder.hpp"
#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/matrix_io.hpp"
#include "sasa/pipeline.hpp"
#include "sasa/random.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"
#include "sasa/verification.hpp"
#include "test_support.hpp"

namespace {

using namespace sasa;
using sasa::testing::fixture;
using sasa::testing::read_text;

constexpr double kOracleTolerance = 1e-10;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientEps = 1e-5;
constexpr double kLinearR2 = 0.999;
constexpr double kRatioAt1024 = 352.0 / 1024.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Rng rng(1001);
  std::size_t cases = 0;
  double worst = 0.0;
  const std::size_t ns[] = {17, 64, 128, 256};
  const std::size_t bs[] = {4, 8, 16};
  const std::size_t ws[] = {1, 3};
  const std::size_t gs[] = {0, 1, 2};
  const std::size_t ks[] = {0, 2, 3};
  auto run_case = [&](std::size_t n, std::size_t b, std::size_t w, std::size_t g, std::size_t k) {
    mask::AttentionConfig cfg;
    cfg.n = n;
    cfg.b = b;
    cfg.w = w;
    cfg.k = k;
    cfg.global_blocks.clear();
    // Global blocks drawn without replacement from the valid range.
    std::vector<std::uint32_t> pool(cfg.num_blocks());
    for (std::uint32_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < std::min(g, pool.size()); ++i) {
      const std::size_t pick = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[pick]);
      cfg.global_blocks.push_back(pool[i]);
    }
    std::sort(cfg.global_blocks.begin(), cfg.global_blocks.end());
    const std::size_t d_head = 4 + 4 * rng.below(4);
    const auto t = verify::random_attention_case(rng, cfg, d_head, 0.02 + 0.1 * rng.uniform());
    const Matrix sparse = attention::sparse_attention_forward(t).output;
    worst = std::max(worst, max_abs_diff(sparse, attention::dense_oracle(t)));
    worst = std::max(worst, max_abs_diff(sparse, sasa::testing::reference_attention(t)));
    ++cases;
  };
  for (auto n : ns)
    for (auto b : bs)
      for (auto w : ws)
        for (auto g : gs)
          for (auto k : ks) run_case(n, b, w, g, k);
  for (int extra = 0; extra < 24; ++extra) {
    run_case(ns[rng.below(4)], bs[rng.below(3)], ws[rng.below(2)], gs[rng.below(3)],
             ks[rng.below(3)]);
  }
  return {cases >= 200 && worst < kOracleTolerance,
          std::to_string(cases) + " configs, max deviation " + fmt("%.3e", worst) +
              " (tolerance 1e-10)"};
}

// ---------------------------------------------------------------------------

double loss(const attention::AttentionTensors& t, const Matrix& upstream) {
  const Matrix out = sasa::testing::reference_attention(t);
  double s = 0.0;
  for (std::size_t i = 0; i < out.data().size(); ++i) s += out.data()[i] * upstream.data()[i];
  return s;
}

// Central differences through the test-side reference forward pass.
Matrix numeric_gradient(attention::AttentionTensors t, Matrix attention::AttentionTensors::*which,
                        const Matrix& upstream) {
  Matrix& x = t.*which;
  Matrix grad(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + kGradientEps;
    const double plus = loss(t, upstream);
    x.data()[i] = saved - kGradientEps;
    const double minus = loss(t, upstream);
    x.data()[i] = saved;
    grad.data()[i] = (plus - minus) / (2.0 * kGradientEps);
  }
  return grad;
}

double relative_error(const Matrix& a, const Matrix& f) {
  double diff = 0.0, na = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    diff += (a.data()[i] - f.data()[i]) * (a.data()[i] - f.data()[i]);
    na += a.data()[i] * a.data()[i];
    nf += f.data()[i] * f.data()[i];
  }
  const double denom = std::max(std::sqrt(na), std::sqrt(nf));
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

Outcome gradient_correctness() {
  Rng rng(2002);
  constexpr std::size_t kCases = 60;
  double worst = 0.0, worst_library = 0.0;
  for (std::size_t c = 0; c < kCases; ++c) {
    mask::AttentionConfig cfg;
    cfg.n = 5 + rng.below(28);
    cfg.b = std::size_t{2} << rng.below(3);
    cfg.w = rng.below(2) ? 3 : 1;
    cfg.k = rng.below(3);
    cfg.global_blocks.clear();
    if (rng.below(2)) cfg.global_blocks.push_back(0);
    const auto t = verify::random_attention_case(rng, cfg, 2 + rng.below(5), 0.1);
    const Matrix upstream = random_matrix(rng, cfg.n, t.v.cols());
    const auto g = attention::attention_backward(t, upstream);
    using T = attention::AttentionTensors;
    worst = std::max({worst, relative_error(g.dq, numeric_gradient(t, &T::q, upstream)),
                      relative_error(g.dk, numeric_gradient(t, &T::k, upstream)),
                      relative_error(g.dv, numeric_gradient(t, &T::v, upstream))});
    worst_library = std::max(worst_library, verify::gradient_relative_error(t, rng, kGradientEps));
  }
  const double overall = std::max(worst, worst_library);
  return {overall <= kGradientTolerance,
          std::to_string(kCases) + " cases n<=32, max relative error " + fmt("%.3e", overall) +
              " (tolerance 1e-4, eps 1e-5)"};
}

// ---------------------------------------------------------------------------

std::string oracle_mask_file(const mask::AttentionConfig& cfg, const sasa::testing::OracleMask& m) {
  std::ostringstream out;
  out << "n=" << cfg.n << " b=" << cfg.b << " w=" << cfg.w << " g=";
  for (std::size_t i = 0; i < cfg.global_blocks.size(); ++i) {
    out << (i ? "," : "") << cfg.global_blocks[i];
  }
  out << " k=" << cfg.k << '\n';
  for (const auto& [pair, bits] : m) {
    out << pair.first << '\t' << pair.second << '\t' << ((bits & mask::kLocal) ? 'L' : '-')
        << ((bits & mask::kGlobal) ? 'G' : '-') << ((bits & mask::kTopK) ? 'T' : '-')
        << ((bits & mask::kAst) ? 'A' : '-') << '\n';
  }
  return out.str();
}

Outcome mask_fidelity() {
  Rng rng(3003);
  constexpr std::size_t kFixtures = 120;
  std::size_t equal = 0, bytes_equal = 0, topk_pairs = 0;
  for (std::size_t f = 0; f < kFixtures; ++f) {
    mask::AttentionConfig cfg;
    cfg.b = std::size_t{4} << rng.below(3);
    cfg.n = 8 + rng.below(400);
    cfg.w = 1 + 2 * rng.below(3);
    cfg.k = rng.below(5);
    if (rng.below(3) == 0) cfg.ast_k = rng.below(5);
    cfg.global_blocks.clear();
    for (std::uint32_t g = 0; g < cfg.num_blocks(); ++g) {
      if (rng.uniform() < 0.1) cfg.global_blocks.push_back(g);
    }
    const auto s = verify::random_structure(rng, cfg.n, 0.005 + 0.03 * rng.uniform());
    const auto m = mask::build_mask(cfg, s.pair_scores, s.adjacency);
    const auto oracle = sasa::testing::oracle_mask(cfg, s.pair_scores, s.adjacency);
    if (sasa::testing::as_oracle(m) == oracle) ++equal;
    std::ostringstream file;
    mask::write_mask(file, mask::MaskHeader::from_config(cfg), m);
    if (file.str() == oracle_mask_file(cfg, oracle)) ++bytes_equal;
    for (const auto& [pair, bits] : oracle) topk_pairs += (bits & (mask::kTopK | mask::kAst)) != 0;
  }
  return {equal == kFixtures && bytes_equal == kFixtures && topk_pairs > 0,
          std::to_string(equal) + "/" + std::to_string(kFixtures) + " masks equal, " +
              std::to_string(bytes_equal) + "/" + std::to_string(kFixtures) +
              " mask files bit-equal"};
}

// ---------------------------------------------------------------------------

std::vector<cost::Fixture> code_fixtures() {
  std::vector<cost::Fixture> out;
  for (const auto& path : sasa::testing::corpus_files()) {
    out.push_back({path.filename().string(), read_text(path),
                   path.extension() == ".java" ? ast::Language::Java : ast::Language::C});
  }
  out.push_back({"long_1500.java", read_text(fixture("long_1500.java")), ast::Language::Java});
  out.push_back({"small_30.c", read_text(fixture("small_30.c")), ast::Language::C});
  return out;
}

frequency::FrequencyMatrix toy_frequency(const tokenizer::Vocabulary& vocab,
                                         const std::vector<cost::Fixture>& fixtures,
                                         std::size_t window, std::uint64_t seed) {
  attention::ToyEncoderConfig ecfg;
  ecfg.max_len = window;
  const attention::ToyEncoder encoder(vocab.size(), ecfg, seed);
  frequency::FrequencyMatrix fm(vocab.size());
  for (const auto& f : fixtures) {
    const auto code = tokenizer::tokenize(f.source, vocab, window);
    frequency::accumulate_frequency(fm, code.ids, encoder.dense_attention_maps(code.ids),
                                    frequency::HeadReduction::Mean);
  }
  return fm;
}

Outcome cost_claim() {
  Rng rng(4004);
  std::vector<cost::Fixture> fixtures = code_fixtures();
  const std::size_t real = fixtures.size();
  for (int i = 0; i < 3; ++i) {
    const auto lang = i == 1 ? ast::Language::C : ast::Language::Java;
    fixtures.push_back({"synthetic-" + std::to_string(i), cost::synthetic_program(lang, 2048, rng),
                        lang});
  }
  std::vector<std::string> corpus;
  for (const auto& f : fixtures) corpus.push_back(f.source);
  const auto vocab = tokenizer::build_vocabulary(corpus, 50000);
  const auto fm = toy_frequency(vocab, fixtures, 256, 4004);

  // Bound on every fixture at the default config, n = its own token count.
  std::size_t checked = 0, violations = 0;
  for (const auto& f : fixtures) {
    for (std::size_t max_len : {std::size_t{1024}, std::size_t{2048}}) {
      const auto in = prepare_input(f.source, f.language, vocab, &fm, max_len);
      mask::AttentionConfig cfg;
      cfg.n = in.tokens.size();
      if (cfg.num_blocks() <= 1) cfg.global_blocks = {0};
      const auto m = mask::build_mask(cfg, in.pair_scores, in.adjacency);
      const std::size_t nb = cfg.num_blocks();
      const std::size_t loose = nb * (cfg.w + cfg.global_blocks.size() + 2 * cfg.k);
      if (m.selected_count() > std::min(loose, cost::analytic_block_bound(cfg))) ++violations;
      ++checked;
    }
  }

  // Sweep on the long synthetic programs.
  std::vector<mask::AttentionConfig> sweep;
  for (std::size_t n : {256, 512, 1024, 2048}) {
    mask::AttentionConfig cfg;
    cfg.n = n;
    sweep.push_back(cfg);
  }
  cost::ScalingOptions opts;
  opts.vocab = &vocab;
  opts.frequency = &fm;
  opts.timing_runs = 1;
  opts.seed = 4004;
  const std::vector<cost::Fixture> long_fixtures(fixtures.begin() + static_cast<long>(real),
                                                 fixtures.end());
  const auto res = cost::measure_scaling(sweep, long_fixtures, opts);
  if (res.reports.size() != sweep.size() || !res.failures.empty()) {
    return {false, "sweep did not measure every configuration"};
  }
  std::vector<double> xs, selected, dense;
  double ratio_1024 = 1.0;
  for (const auto& r : res.reports) {
    xs.push_back(static_cast<double>(r.n));
    selected.push_back(static_cast<double>(r.selected_blocks));
    dense.push_back(static_cast<double>(r.score_cells_dense));
    if (r.selected_blocks > cost::analytic_block_bound(sweep[xs.size() - 1])) ++violations;
    if (r.n == 1024) ratio_1024 = r.ratio;
  }
  const auto linear = cost::fit_polynomial(xs, selected, 1);
  const auto dense_quad = cost::fit_polynomial(xs, dense, 2);
  const auto dense_lin = cost::fit_polynomial(xs, dense, 1);
  const bool quadratic = dense_quad.r_squared >= kLinearR2 && dense_lin.r_squared < kLinearR2 &&
                         std::abs(dense_quad.coefficients[2] - 1.0) < 1e-6;
  std::string counts;
  for (double s : selected) counts += (counts.empty() ? "" : "/") + std::to_string(static_cast<long>(s));
  return {violations == 0 && linear.r_squared >= kLinearR2 && quadratic &&
              ratio_1024 <= kRatioAt1024,
          std::to_string(checked) + " fixture masks within bound, selected " + counts +
              " for n=256..2048, linear R2 " + fmt("%.5f", linear.r_squared) +
              ", dense quadratic R2 " + fmt("%.5f", dense_quad.r_squared) + " (linear " +
              fmt("%.3f", dense_lin.r_squared) + "), ratio@1024 " + fmt("%.4f", ratio_1024) +
              " (<= 0.3438)"};
}

// ---------------------------------------------------------------------------

struct StabilityCase {
  std::string file;
  std::string token_a;
  std::size_t occurrence_a;
  std::string token_b;
  std::size_t occurrence_b;
  std::uint32_t distance;
};

std::vector<StabilityCase> stability_manifest() {
  std::istringstream in(read_text(fixture("stability/manifest.tsv")));
  std::vector<StabilityCase> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    StabilityCase c;
    fields >> c.file >> c.token_a >> c.occurrence_a >> c.token_b >> c.occurrence_b >> c.distance;
    if (!fields) throw std::runtime_error("bad manifest line: " + line);
    out.push_back(c);
  }
  return out;
}

// Token index of the occurrence-th (1-based) token with this surface.
std::optional<std::size_t> find_token(const tokenizer::TokenizedCode& code,
                                      const std::string& surface, std::size_t occurrence) {
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code.surface(i) == surface && --occurrence == 0) return i;
  }
  return std::nullopt;
}

Outcome ast_stability() {
  constexpr std::string_view kMarker = "/* @insert */";
  const std::string kInsertion = "int unrelated = 42;";
  const auto cases = stability_manifest();
  std::size_t preserved = 0;
  std::string broken;
  for (const auto& c : cases) {
    const std::string raw = read_text(fixture("stability/" + c.file));
    const std::size_t at = raw.find(kMarker);
    const auto lang = c.file.ends_with(".java") ? ast::Language::Java : ast::Language::C;
    const std::string before = raw.substr(0, at) + raw.substr(at + kMarker.size());
    const std::string after = raw.substr(0, at) + kInsertion + raw.substr(at + kMarker.size());
    const auto vocab = tokenizer::build_vocabulary(std::vector<std::string>{before, after}, 1000);

    bool ok = at != std::string::npos;
    std::size_t shift = 0;
    std::optional<std::size_t> a0, b0;
    if (ok) {
      const auto in0 = prepare_input(before, lang, vocab, nullptr, 1024, c.distance);
      const auto in1 = prepare_input(after, lang, vocab, nullptr, 1024, c.distance);
      shift = in1.tokens.size() - in0.tokens.size();
      a0 = find_token(in0.tokens, c.token_a, c.occurrence_a);
      b0 = find_token(in0.tokens, c.token_b, c.occurrence_b);
      ok = a0 && b0 && shift == 5 && !in0.tree.has_errors() && !in1.tree.has_errors() &&
           in0.tokens.spans[*a0].end <= at && in0.tokens.spans[*b0].begin >= at;
      if (ok) {
        // The insertion sits between the pair, so only b moves.
        const std::size_t a1 = *a0, b1 = *b0 + shift;
        ok = in1.tokens.surface(a1) == c.token_a && in1.tokens.surface(b1) == c.token_b &&
             in0.adjacency.contains(static_cast<std::uint32_t>(*a0), static_cast<std::uint32_t>(*b0)) &&
             in1.adjacency.contains(static_cast<std::uint32_t>(a1), static_cast<std::uint32_t>(b1));
      }
    }
    if (ok) {
      ++preserved;
    } else {
      broken += " " + c.file;
    }
  }
  return {cases.size() >= 20 && preserved == cases.size(),
          std::to_string(preserved) + "/" + std::to_string(cases.size()) +
              " fixtures keep the pair connected after insertion" +
              (broken.empty() ? "" : "; broken:" + broken)};
}

// ---------------------------------------------------------------------------

Outcome frequency_fidelity() {
  sasa::testing::TempDir tmp;
  const auto files = sasa::testing::corpus_files();
  std::vector<std::string> corpus;
  for (std::size_t i = 0; i < 10; ++i) corpus.push_back(read_text(files[i * 5]));
  const auto vocab = tokenizer::build_vocabulary(corpus, 5000);
  attention::ToyEncoderConfig ecfg;
  ecfg.d_model = 32;
  ecfg.heads = 4;
  ecfg.layers = 2;
  ecfg.max_len = 128;
  ecfg.init_scale = 1.5;
  const attention::ToyEncoder encoder(vocab.size(), ecfg, 6006);

  frequency::FrequencyMatrix whole(vocab.size(), 0.1), left(vocab.size(), 0.1),
      right(vocab.size(), 0.1);
  std::vector<std::vector<tokenizer::TokenId>> ids;
  std::size_t maps_per_sample = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto code = tokenizer::tokenize(corpus[s], vocab, ecfg.max_len);
    const auto maps = encoder.dense_attention_maps(code.ids);
    maps_per_sample = maps.size();
    for (std::size_t m = 0; m < maps.size(); ++m) {
      save_matrix(tmp / ("s" + std::to_string(s) + "_" + std::to_string(m) + ".bin"), maps[m]);
    }
    frequency::accumulate_frequency(whole, code.ids, maps, frequency::HeadReduction::Mean);
    frequency::accumulate_frequency(s < 4 ? left : right, code.ids, maps,
                                    frequency::HeadReduction::Mean);
    ids.push_back(code.ids);
  }

  // Offline scan: reload the dumped maps, average, threshold, count.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> expected;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    std::vector<Matrix> maps;
    for (std::size_t m = 0; m < maps_per_sample; ++m) {
      maps.push_back(load_matrix(tmp / ("s" + std::to_string(s) + "_" + std::to_string(m) + ".bin")));
    }
    for (std::size_t i = 0; i < ids[s].size(); ++i) {
      for (std::size_t j = 0; j < ids[s].size(); ++j) {
        double total = 0.0;
        for (const auto& m : maps) total += m(i, j);
        if (total / static_cast<double>(maps.size()) > 0.1) ++expected[{ids[s][i], ids[s][j]}];
      }
    }
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> actual;
  for (const auto& e : whole.sorted_entries()) actual[{e.from, e.to}] = e.count;
  const bool scan_ok = actual == expected && !expected.empty();

  frequency::FrequencyMatrix merged = right;
  merged.merge(left);
  std::ostringstream whole_bytes, merged_bytes;
  frequency::write_frequency(whole_bytes, whole);
  frequency::write_frequency(merged_bytes, merged);
  const bool merge_ok = merged == whole && merged_bytes.str() == whole_bytes.str();

  std::uint64_t total = 0;
  for (const auto& [pair, count] : expected) total += count;
  return {scan_ok && merge_ok,
          "10 samples, " + std::to_string(expected.size()) + " pairs / total count " +
              std::to_string(total) + (scan_ok ? " equal to" : " DIFFER from") +
              " offline scan; shard merge " + (merge_ok ? "bit-exact" : "MISMATCH")};
}

// ---------------------------------------------------------------------------

// Checks one ablation: every pair of `reduced` is in `full` with the removed
// pattern's bits cleared, and every dropped pair owed its presence only to
// the removed patterns.
bool accounts_for(const mask::BlockMask& full, const mask::BlockMask& reduced,
                  mask::Provenance removed, std::size_t& dropped) {
  for (const auto& p : reduced.pairs()) {
    const auto bits = full.provenance(p.query, p.key);
    if (bits == 0 || reduced.provenance(p.query, p.key) != (bits & ~removed)) return false;
  }
  dropped = 0;
  for (const auto& p : full.pairs()) {
    const auto bits = full.provenance(p.query, p.key);
    const bool kept = reduced.contains(p.query, p.key);
    if (kept != ((bits & ~removed) != 0)) return false;
    dropped += kept ? 0 : 1;
  }
  return true;
}

Outcome ablation_hooks() {
  Rng rng(7007);
  std::vector<cost::Fixture> fixtures;
  for (int i = 0; i < 4; ++i) {
    const auto lang = i % 2 ? ast::Language::C : ast::Language::Java;
    fixtures.push_back({"synthetic", cost::synthetic_program(lang, 1100, rng), lang});
  }
  std::vector<std::string> corpus;
  for (const auto& f : fixtures) corpus.push_back(f.source);
  const auto vocab = tokenizer::build_vocabulary(corpus, 50000);
  const auto fm = toy_frequency(vocab, fixtures, 256, 7007);

  struct Input {
    mask::AttentionConfig cfg;
    frequency::PairScoreMatrix p;
    ast::TokenAdjacency t;
  };
  std::vector<Input> inputs;
  for (const auto& f : fixtures) {
    auto in = prepare_input(f.source, f.language, vocab, &fm, 1024);
    mask::AttentionConfig cfg;
    cfg.n = in.tokens.size();
    inputs.push_back({cfg, std::move(in.pair_scores), std::move(in.adjacency)});
  }
  for (int i = 0; i < 40; ++i) {
    mask::AttentionConfig cfg;
    cfg.n = 128 + rng.below(900);
    cfg.b = std::size_t{8} << rng.below(3);
    // With k = 1 the AST pick is always the diagonal block, which the local
    // window already holds, so removing it could not shrink the mask.
    cfg.k = 2 + rng.below(2);
    auto s = verify::random_structure(rng, cfg.n, 0.01);
    inputs.push_back({cfg, std::move(s.pair_scores), std::move(s.adjacency)});
  }

  std::size_t strict = 0, accounted = 0, dropped_topk = 0, dropped_ast = 0;
  for (const auto& in : inputs) {
    const auto full = mask::build_mask(in.cfg, in.p, in.t);
    auto variant = [&](bool topk, bool ast) {
      mask::AttentionConfig c = in.cfg;
      c.use_topk = topk;
      c.use_ast = ast;
      return mask::build_mask(c, in.p, in.t);
    };
    std::size_t d1 = 0, d2 = 0, d3 = 0;
    const bool ok = accounts_for(full, variant(false, true), mask::kTopK, d1) &&
                    accounts_for(full, variant(true, false), mask::kAst, d2) &&
                    accounts_for(full, variant(false, false), mask::kTopK | mask::kAst, d3);
    accounted += ok;
    strict += (d1 > 0 && d2 > 0 && d3 >= std::max(d1, d2)) ? 1 : 0;
    dropped_topk += d1;
    dropped_ast += d2;
  }
  return {accounted == inputs.size() && strict == inputs.size(),
          std::to_string(inputs.size()) + " inputs, " + std::to_string(strict) +
              " strict subsets, provenance accounts for removals in " + std::to_string(accounted) +
              " (dropped " + std::to_string(dropped_topk) + " top-k / " +
              std::to_string(dropped_ast) + " AST pairs)"};
}

// ---------------------------------------------------------------------------

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"oracle-equivalence", 120, oracle_equivalence},
      {"gradient-correctness", 120, gradient_correctness},
      {"mask-union-fidelity", 60, mask_fidelity},
      {"cost-claim", 60, cost_claim},
      {"ast-position-stability", 30, ast_stability},
      {"frequency-fidelity", 30, frequency_fidelity},
      {"ablation-hooks", 30, ablation_hooks},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %s: %s [%.1fs, budget %.0fs%s]\n", pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
