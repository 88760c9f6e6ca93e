// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sasa/adjacency.hpp"
#include "sasa/attention.hpp"
#include "sasa/cost.hpp"
#include "sasa/encoder.hpp"
#include "sasa/error.hpp"
#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/matrix_io.hpp"
#include "sasa/pipeline.hpp"
#include "sasa/random.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"
#include "sasa/verification.hpp"

namespace sasa::cli {
namespace {

namespace fs = std::filesystem;

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Runs fn, tagging any failure with the pipeline stage it happened in.
template <typename Fn>
decltype(auto) stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct Options {
  std::vector<std::string> inputs;
  std::string out;
  std::size_t n = tokenizer::kDefaultMaxLen;
  std::size_t b = 32;
  std::size_t w = 3;
  std::optional<std::string> g;
  std::size_t k = 3;
  std::optional<std::size_t> ast_k;
  bool no_topk = false;
  bool no_ast = false;
  std::uint32_t tree_distance = ast::kDefaultTreeDistance;
  double threshold = frequency::kDefaultThreshold;
  std::size_t heads = 4;
  std::size_t d_model = 64;
  std::optional<std::uint64_t> seed;
  std::string lang;

  // Command-specific.
  std::size_t max_size = 50000;
  std::string vocab;
  std::string freq;
  std::string adj;
  std::string source;
  std::string tokens_out;
  std::vector<std::string> attention;
  std::vector<std::string> merge;
  std::string reduce = "mean";
  std::size_t layers = 2;
  std::string q, kmat, v, mask, upstream, grad_out;
  std::size_t threads = 1;
  bool check = false;
  std::size_t cases = 1;
  std::size_t grad_n = 24;
  std::size_t grad_b = 4;
  double eps = 1e-5;
  std::string sweep = "256,512,1024,2048";
  std::size_t runs = 5;
  std::string table;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool is_source_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".java" || ext == ".c" || ext == ".h";
}

// Files as given; directories contribute their .java/.c/.h files, sorted.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file() && is_source_file(entry.path())) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw InvalidArgument("no input files");
  return files;
}

ast::Language language_for(const fs::path& path, const std::string& lang) {
  if (!lang.empty()) return ast::parse_language_id(lang);
  const auto ext = path.extension().string();
  if (ext == ".java") return ast::Language::Java;
  if (ext == ".c" || ext == ".h") return ast::Language::C;
  throw UnsupportedLanguage("cannot infer language of " + path.string() + "; pass --lang");
}

std::vector<std::uint32_t> parse_block_list(const std::string& text) {
  std::vector<std::uint32_t> blocks;
  if (text.empty() || text == "none") return blocks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw InvalidArgument("--g: cannot parse block index '" + item + "'");
    }
    blocks.push_back(static_cast<std::uint32_t>(value));
  }
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  return blocks;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> values;
  for (auto v : parse_block_list(text)) values.push_back(v);
  return values;
}

// The default global set {0, 1} is clipped to the blocks that exist; an
// explicit --g is taken as given and validated.
mask::AttentionConfig make_config(const Options& o, std::size_t n) {
  mask::AttentionConfig cfg;
  cfg.n = n;
  cfg.b = o.b;
  cfg.w = o.w;
  cfg.k = o.k;
  cfg.ast_k = o.ast_k;
  cfg.use_topk = !o.no_topk;
  cfg.use_ast = !o.no_ast;
  cfg.heads = o.heads;
  cfg.d_model = o.d_model;
  if (o.g) {
    cfg.global_blocks = parse_block_list(*o.g);
  } else {
    std::erase_if(cfg.global_blocks, [&](std::uint32_t g) { return g >= cfg.num_blocks(); });
  }
  cfg.validate();
  return cfg;
}

std::uint64_t require_seed(const Options& o, const char* command) {
  if (!o.seed) throw InvalidArgument(std::string(command) + " is randomized and needs --seed");
  return *o.seed;
}

tokenizer::Vocabulary load_vocab(const std::string& path) {
  if (path.empty()) throw InvalidArgument("--vocab is required");
  return stage("vocab", [&] { return tokenizer::load_vocabulary(path); });
}

void add_config_options(CLI::App* app, Options& o) {
  app->add_option("--n", o.n, "Sequence length in tokens")->capture_default_str();
  app->add_option("--b", o.b, "Block size")->capture_default_str();
  app->add_option("--w", o.w, "Sliding window width in blocks (odd)")->capture_default_str();
  app->add_option("--g", o.g, "Global block indices, comma separated, or 'none' (default 0,1)");
  app->add_option("--k", o.k, "Top-k budget in blocks")->capture_default_str();
  app->add_option("--ast-k", o.ast_k, "AST pattern budget (defaults to --k)");
  app->add_flag("--no-topk", o.no_topk, "Disable the frequency top-k pattern");
  app->add_flag("--no-ast", o.no_ast, "Disable the AST pattern");
  app->add_option("--D", o.tree_distance, "Maximum tree distance for AST adjacency")
      ->capture_default_str();
  app->add_option("--threshold", o.threshold, "Attention threshold for frequency counting")
      ->capture_default_str();
  app->add_option("--heads", o.heads, "Attention heads")->capture_default_str();
  app->add_option("--d-model", o.d_model, "Model width")->capture_default_str();
  app->add_option("--seed", o.seed, "Seed for every random draw");
  app->add_option("--lang", o.lang, "Grammar id: c or java (default: from file extension)");
}

int cmd_build_vocab(const Options& o, std::ostream& out) {
  const auto files = stage("io", [&] { return expand_inputs(o.inputs); });
  std::vector<std::string> corpus;
  for (const auto& f : files) corpus.push_back(stage("io", [&] { return read_file(f); }));
  const auto vocab = stage("vocab", [&] { return tokenizer::build_vocabulary(corpus, o.max_size); });
  stage("io", [&] { tokenizer::save_vocabulary(o.out, vocab); });
  out << "vocab: " << vocab.size() << " entries from " << files.size() << " files\n";
  return 0;
}

frequency::HeadReduction parse_reduction(const std::string& text) {
  if (text == "mean") return frequency::HeadReduction::Mean;
  if (text == "max") return frequency::HeadReduction::Max;
  throw InvalidArgument("--reduce must be mean or max, got '" + text + "'");
}

int cmd_build_freq(const Options& o, std::ostream& out) {
  if (!o.merge.empty()) {
    auto merged = stage("frequency", [&] { return frequency::load_frequency(o.merge.front()); });
    for (std::size_t i = 1; i < o.merge.size(); ++i) {
      stage("frequency", [&] { merged.merge(frequency::load_frequency(o.merge[i])); });
    }
    stage("io", [&] { frequency::save_frequency(o.out, merged); });
    out << "frequency: merged " << o.merge.size() << " shards, " << merged.samples_seen()
        << " samples, " << merged.nonzero() << " nonzero pairs\n";
    return 0;
  }

  const auto vocab = load_vocab(o.vocab);
  const auto files = stage("io", [&] { return expand_inputs(o.inputs); });
  const auto reduction = stage("args", [&] { return parse_reduction(o.reduce); });
  if (!o.attention.empty() && o.attention.size() != files.size()) {
    throw StageError("args", "--attention needs one matrix per input file (" +
                                 std::to_string(files.size()) + " inputs, " +
                                 std::to_string(o.attention.size()) + " matrices)");
  }
  std::optional<attention::ToyEncoder> encoder;
  if (o.attention.empty()) {
    const auto seed = stage("args", [&] { return require_seed(o, "build-freq"); });
    attention::ToyEncoderConfig ecfg;
    ecfg.d_model = o.d_model;
    ecfg.heads = o.heads;
    ecfg.layers = o.layers;
    ecfg.max_len = o.n;
    encoder = stage("encoder", [&] { return attention::ToyEncoder(vocab.size(), ecfg, seed); });
  }

  frequency::FrequencyMatrix fm(vocab.size(), o.threshold);
  for (std::size_t f = 0; f < files.size(); ++f) {
    const std::string source = stage("io", [&] { return read_file(files[f]); });
    const auto code = stage("tokenize", [&] { return tokenizer::tokenize(source, vocab, o.n); });
    if (encoder) {
      const auto maps = stage("encoder", [&] { return encoder->dense_attention_maps(code.ids); });
      stage("frequency", [&] { frequency::accumulate_frequency(fm, code.ids, maps, reduction); });
    } else {
      const Matrix attn = stage("io", [&] { return load_matrix(o.attention[f]); });
      stage("frequency", [&] { frequency::accumulate_frequency(fm, code.ids, attn); });
    }
  }
  stage("io", [&] { frequency::save_frequency(o.out, fm); });
  out << "frequency: " << fm.samples_seen() << " samples, " << fm.nonzero()
      << " nonzero pairs, total count " << fm.total() << "\n";
  return 0;
}

int cmd_build_adj(const Options& o, std::ostream& out) {
  if (o.inputs.size() != 1) throw StageError("args", "build-adj takes exactly one source file");
  const fs::path path(o.inputs.front());
  const auto vocab = load_vocab(o.vocab);
  const auto lang = stage("args", [&] { return language_for(path, o.lang); });
  const std::string source = stage("io", [&] { return read_file(path); });
  const auto code = stage("tokenize", [&] { return tokenizer::tokenize(source, vocab, o.n); });
  const auto tree = stage("parse", [&] { return ast::parse_to_tree(source, lang); });
  const auto adj = stage("adjacency", [&] {
    return ast::build_token_adjacency(tree, code, o.tree_distance);
  });
  stage("io", [&] { ast::save_adjacency(o.out, adj); });
  if (!o.tokens_out.empty()) {
    stage("io", [&] {
      std::ofstream dump(o.tokens_out);
      if (!dump) throw FormatError("cannot write " + o.tokens_out);
      tokenizer::write_token_dump(dump, code, vocab);
    });
  }
  out << "adjacency: n=" << adj.n << " pairs=" << adj.entries.size()
      << (tree.has_errors() ? " (source had syntax errors)" : "") << "\n";
  return 0;
}

int cmd_build_mask(const Options& o, std::ostream& out) {
  std::optional<ast::TokenAdjacency> adj;
  if (!o.adj.empty()) adj = stage("adjacency", [&] { return ast::load_adjacency(o.adj); });

  frequency::PairScoreMatrix scores;
  std::size_t n = 0;
  if (!o.source.empty()) {
    const fs::path path(o.source);
    const auto vocab = load_vocab(o.vocab);
    const auto lang = stage("args", [&] { return language_for(path, o.lang); });
    std::optional<frequency::FrequencyMatrix> fm;
    if (!o.freq.empty()) fm = stage("frequency", [&] { return frequency::load_frequency(o.freq); });
    const std::string source = stage("io", [&] { return read_file(path); });
    auto prepared = stage("prepare", [&] {
      return prepare_input(source, lang, vocab, fm ? &*fm : nullptr, o.n, o.tree_distance);
    });
    if (fm && fm->vocab_size() != vocab.size()) {
      throw StageError("frequency", "frequency matrix |V|=" + std::to_string(fm->vocab_size()) +
                                        " does not match vocabulary size " +
                                        std::to_string(vocab.size()));
    }
    n = prepared.tokens.size();
    scores = std::move(prepared.pair_scores);
    if (adj) {
      if (adj->n != n) {
        throw StageError("adjacency", "adjacency n=" + std::to_string(adj->n) +
                                          " does not match " + std::to_string(n) + " tokens");
      }
    } else {
      adj = std::move(prepared.adjacency);
    }
  } else {
    if (!o.freq.empty()) {
      throw StageError("args", "--freq needs --source to look up token pairs");
    }
    n = adj ? adj->n : o.n;
    scores = frequency::zero_pair_scores(n);
    if (!adj) {
      adj.emplace();
      adj->n = n;
      adj->max_distance = o.tree_distance;
    }
  }

  const auto cfg = stage("args", [&] { return make_config(o, n); });
  const auto m = stage("mask", [&] { return mask::build_mask(cfg, scores, *adj); });
  stage("io", [&] { mask::save_mask(o.out, mask::MaskHeader::from_config(cfg), m); });
  out << "mask: n=" << n << " blocks=" << m.num_blocks() << " selected=" << m.selected_count()
      << " bound=" << cost::analytic_block_bound(cfg) << "\n";
  return 0;
}

int cmd_attn(const Options& o, std::ostream& out) {
  attention::AttentionTensors t;
  t.q = stage("io", [&] { return load_matrix(o.q); });
  t.k = stage("io", [&] { return load_matrix(o.kmat); });
  t.v = stage("io", [&] { return load_matrix(o.v); });
  const auto mf = stage("mask", [&] { return mask::load_mask(o.mask); });
  if (mf.header.n != t.q.rows()) {
    throw StageError("attention", "mask header n=" + std::to_string(mf.header.n) +
                                      " does not match " + std::to_string(t.q.rows()) +
                                      " query rows");
  }
  t.mask = mf.mask;
  t.block_size = mf.header.b;
  attention::ForwardOptions fo;
  fo.threads = o.threads;
  const auto fwd = stage("attention", [&] { return attention::sparse_attention_forward(t, fo); });
  stage("io", [&] { save_matrix(o.out, fwd.output); });
  out << "attention: n=" << t.q.rows() << " d_head=" << t.q.cols()
      << " score_cells=" << fwd.probabilities.cells() << " (dense " << t.q.rows() * t.q.rows()
      << ")\n";
  if (o.check) {
    const Matrix dense = stage("attention", [&] { return attention::dense_oracle(t); });
    out << "max deviation from dense oracle: " << std::setprecision(3) << std::scientific
        << max_abs_diff(fwd.output, dense) << std::defaultfloat << "\n";
  }
  if (!o.upstream.empty()) {
    if (o.grad_out.empty()) throw StageError("args", "--upstream needs --grad-out");
    const Matrix up = stage("io", [&] { return load_matrix(o.upstream); });
    const auto g = stage("attention", [&] { return attention::attention_backward(t, fwd, up, fo); });
    stage("io", [&] {
      fs::create_directories(o.grad_out);
      save_matrix(fs::path(o.grad_out) / "dq.bin", g.dq);
      save_matrix(fs::path(o.grad_out) / "dk.bin", g.dk);
      save_matrix(fs::path(o.grad_out) / "dv.bin", g.dv);
    });
  }
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  constexpr double kOracleTolerance = 1e-10;
  constexpr double kGradientTolerance = 1e-4;
  const auto seed = stage("args", [&] { return require_seed(o, "verify"); });
  if (o.heads == 0 || o.d_model % o.heads != 0) {
    throw StageError("args", "--d-model must be a multiple of --heads");
  }
  const std::size_t d_head = o.d_model / o.heads;
  const auto cfg = stage("args", [&] { return make_config(o, o.n); });
  Rng rng(seed);

  double worst = 0.0;
  for (std::size_t c = 0; c < o.cases; ++c) {
    const auto t = stage("mask", [&] { return verify::random_attention_case(rng, cfg, d_head); });
    worst = std::max(worst, stage("verify", [&] { return verify::max_oracle_deviation(t); }));
  }
  Options small = o;
  small.b = o.grad_b;
  small.g.reset();
  const auto grad_cfg = stage("args", [&] { return make_config(small, o.grad_n); });
  const auto gt = stage("mask", [&] { return verify::random_attention_case(rng, grad_cfg, d_head); });
  const double grad_err =
      stage("verify", [&] { return verify::gradient_relative_error(gt, rng, o.eps); });

  const bool oracle_ok = worst < kOracleTolerance;
  const bool grad_ok = grad_err <= kGradientTolerance;
  out << std::scientific << std::setprecision(3);
  out << "oracle: n=" << cfg.n << " b=" << cfg.b << " cases=" << o.cases
      << " max deviation=" << worst << " (tolerance " << kOracleTolerance << ") "
      << (oracle_ok ? "ok" : "FAILED") << "\n";
  out << "gradient: n=" << grad_cfg.n << " b=" << grad_cfg.b << " eps=" << o.eps
      << " max relative error=" << grad_err << " (tolerance " << kGradientTolerance << ") "
      << (grad_ok ? "ok" : "FAILED") << "\n";
  out << std::defaultfloat;
  return oracle_ok && grad_ok ? 0 : 1;
}

int cmd_bench(const Options& o, std::ostream& out) {
  constexpr std::size_t kFrequencyWindow = 256;
  const auto seed = stage("args", [&] { return require_seed(o, "bench"); });
  const auto sweep_n = stage("args", [&] { return parse_size_list(o.sweep); });
  if (sweep_n.empty()) throw StageError("args", "--sweep is empty");
  std::vector<mask::AttentionConfig> sweep;
  for (auto n : sweep_n) sweep.push_back(stage("args", [&] { return make_config(o, n); }));
  const std::size_t longest = *std::max_element(sweep_n.begin(), sweep_n.end());

  std::vector<cost::Fixture> fixtures;
  if (o.inputs.empty()) {
    Rng rng(seed);
    const auto lang = o.lang.empty() ? ast::Language::Java : ast::parse_language_id(o.lang);
    for (int i = 0; i < 3; ++i) {
      fixtures.push_back({"synthetic-" + std::to_string(i),
                          cost::synthetic_program(lang, longest, rng), lang});
    }
  } else {
    for (const auto& f : stage("io", [&] { return expand_inputs(o.inputs); })) {
      fixtures.push_back({f.string(), stage("io", [&] { return read_file(f); }),
                          stage("args", [&] { return language_for(f, o.lang); })});
    }
  }

  tokenizer::Vocabulary vocab;
  if (!o.vocab.empty()) {
    vocab = load_vocab(o.vocab);
  } else {
    std::vector<std::string> corpus;
    for (const auto& f : fixtures) corpus.push_back(f.source);
    vocab = stage("vocab", [&] { return tokenizer::build_vocabulary(corpus, o.max_size); });
  }

  std::optional<frequency::FrequencyMatrix> fm;
  if (!o.freq.empty()) {
    fm = stage("frequency", [&] { return frequency::load_frequency(o.freq); });
  } else {
    attention::ToyEncoderConfig ecfg;
    ecfg.d_model = o.d_model;
    ecfg.heads = o.heads;
    ecfg.max_len = kFrequencyWindow;
    const attention::ToyEncoder encoder(vocab.size(), ecfg, seed);
    fm.emplace(vocab.size(), o.threshold);
    for (const auto& f : fixtures) {
      stage("frequency", [&] {
        const auto code = tokenizer::tokenize(f.source, vocab, kFrequencyWindow);
        frequency::accumulate_frequency(*fm, code.ids, encoder.dense_attention_maps(code.ids),
                                        frequency::HeadReduction::Mean);
      });
    }
  }

  cost::ScalingOptions so;
  so.vocab = &vocab;
  so.frequency = &*fm;
  so.tree_distance = o.tree_distance;
  so.timing_runs = o.runs;
  so.d_head = o.d_model / o.heads;
  so.seed = seed;
  const auto result = stage("bench", [&] { return cost::measure_scaling(sweep, fixtures, so); });

  cost::write_table(out, result.reports);
  bool ok = result.reports.size() == sweep.size();
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    const auto bound = cost::analytic_block_bound(
        *std::find_if(sweep.begin(), sweep.end(), [&](const auto& c) { return c.n == r.n; }));
    const bool within = r.selected_blocks <= bound;
    ok = ok && within;
    out << "n=" << r.n << " selected_blocks=" << r.selected_blocks << " analytic_block_bound="
        << bound << (within ? " ok" : " EXCEEDED") << "\n";
  }
  for (const auto& f : result.failures) {
    out << "fixture failure: n=" << sweep[f.config_index].n << " " << f.fixture << ": "
        << f.message << "\n";
  }
  if (!o.out.empty()) {
    stage("io", [&] {
      std::ofstream file(o.out);
      if (!file) throw FormatError("cannot write " + o.out);
      cost::write_json_lines(file, result.reports);
    });
  }
  if (!o.table.empty()) {
    stage("io", [&] {
      std::ofstream file(o.table);
      if (!file) throw FormatError("cannot write " + o.table);
      cost::write_table(file, result.reports);
    });
  }
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block-sparse structure-aware attention toolkit", "sasa"};
  app.require_subcommand(1);
  Options o;

  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build a vocabulary from source files");
  vocab_cmd->add_option("inputs", o.inputs, "Source files or directories")->required();
  vocab_cmd->add_option("--max-size", o.max_size, "Vocabulary size cap")->capture_default_str();
  vocab_cmd->add_option("--out", o.out, "Vocabulary file")->required();

  auto* freq_cmd = app.add_subcommand("build-freq", "Count attention-weighted token pairs");
  add_config_options(freq_cmd, o);
  freq_cmd->add_option("inputs", o.inputs, "Source files or directories");
  freq_cmd->add_option("--vocab", o.vocab, "Vocabulary file");
  freq_cmd->add_option("--attention", o.attention,
                       "One n×n attention matrix per input instead of the toy encoder");
  freq_cmd->add_option("--reduce", o.reduce, "Head reduction: mean or max")
      ->capture_default_str();
  freq_cmd->add_option("--layers", o.layers, "Toy encoder layers")->capture_default_str();
  freq_cmd->add_option("--merge", o.merge, "Merge these frequency shards instead");
  freq_cmd->add_option("--out", o.out, "Frequency file")->required();

  auto* adj_cmd = app.add_subcommand("build-adj", "Token adjacency from the syntax tree");
  add_config_options(adj_cmd, o);
  adj_cmd->add_option("inputs", o.inputs, "Source file")->required();
  adj_cmd->add_option("--vocab", o.vocab, "Vocabulary file")->required();
  adj_cmd->add_option("--tokens", o.tokens_out, "Also write a token dump here");
  adj_cmd->add_option("--out", o.out, "Adjacency file")->required();

  auto* mask_cmd = app.add_subcommand("build-mask", "Union of the block patterns");
  add_config_options(mask_cmd, o);
  mask_cmd->add_option("--source", o.source, "Source file (tokens and pair scores)");
  mask_cmd->add_option("--vocab", o.vocab, "Vocabulary file (with --source)");
  mask_cmd->add_option("--freq", o.freq, "Frequency file (with --source)");
  mask_cmd->add_option("--adj", o.adj, "Adjacency file");
  mask_cmd->add_option("--out", o.out, "Mask file")->required();

  auto* attn_cmd = app.add_subcommand("attn", "Sparse attention forward over stored tensors");
  attn_cmd->add_option("--q", o.q, "Query matrix")->required();
  attn_cmd->add_option("--k", o.kmat, "Key matrix")->required();
  attn_cmd->add_option("--v", o.v, "Value matrix")->required();
  attn_cmd->add_option("--mask", o.mask, "Mask file")->required();
  attn_cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  attn_cmd->add_flag("--check", o.check, "Compare against the dense oracle");
  attn_cmd->add_option("--upstream", o.upstream, "Upstream gradient for a backward pass");
  attn_cmd->add_option("--grad-out", o.grad_out, "Directory for dq/dk/dv");
  attn_cmd->add_option("--out", o.out, "Output matrix")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Oracle equivalence and gradient check");
  add_config_options(verify_cmd, o);
  verify_cmd->add_option("--cases", o.cases, "Random forward cases")->capture_default_str();
  verify_cmd->add_option("--grad-n", o.grad_n, "Gradient check length")->capture_default_str();
  verify_cmd->add_option("--grad-b", o.grad_b, "Gradient check block size")
      ->capture_default_str();
  verify_cmd->add_option("--eps", o.eps, "Finite difference step")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Selected blocks, score memory and timing vs n");
  add_config_options(bench_cmd, o);
  bench_cmd->add_option("inputs", o.inputs, "Fixture files (default: synthetic programs)");
  bench_cmd->add_option("--sweep", o.sweep, "Sequence lengths")->capture_default_str();
  bench_cmd->add_option("--vocab", o.vocab, "Vocabulary file (default: built from fixtures)");
  bench_cmd->add_option("--freq", o.freq, "Frequency file (default: toy encoder)");
  bench_cmd->add_option("--runs", o.runs, "Timed runs per configuration")->capture_default_str();
  bench_cmd->add_option("--table", o.table, "Also write the text table here");
  bench_cmd->add_option("--out", o.out, "JSON-lines report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (vocab_cmd->parsed()) return cmd_build_vocab(o, out);
    if (freq_cmd->parsed()) return cmd_build_freq(o, out);
    if (adj_cmd->parsed()) return cmd_build_adj(o, out);
    if (mask_cmd->parsed()) return cmd_build_mask(o, out);
    if (attn_cmd->parsed()) return cmd_attn(o, out);
    if (verify_cmd->parsed()) return cmd_verify(o, out);
    if (bench_cmd->parsed()) return cmd_bench(o, out);
  } catch (const StageError& e) {
    err << "sasa: " << e.stage() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "sasa: internal: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace sasa::cli
