// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "sasa/adjacency.hpp"
#include "sasa/attention.hpp"
#include "sasa/frequency.hpp"
#include "sasa/mask.hpp"
#include "sasa/matrix_io.hpp"
#include "sasa/random.hpp"
#include "sasa/syntax_tree.hpp"
#include "sasa/tokenizer.hpp"
#include "sasa/verification.hpp"
#include "test_support.hpp"

namespace sasa::cli {
namespace {

using sasa::testing::fixture;
using sasa::testing::read_text;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result sasa(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  std::string path(const std::string& name) const { return (tmp_ / name).string(); }
  sasa::testing::TempDir tmp_;
};

TEST_F(Cli, BuildVocabMatchesLibrary) {
  const Result r = sasa({"build-vocab", fixture("corpus").string(), "--out", path("v.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> corpus;
  for (const auto& f : sasa::testing::corpus_files()) corpus.push_back(read_text(f));
  EXPECT_EQ(tokenizer::load_vocabulary(path("v.txt")).tokens(),
            tokenizer::build_vocabulary(corpus, 50000).tokens());
  EXPECT_NE(r.out.find("from 56 files"), std::string::npos);
}

TEST_F(Cli, GoldenLocalGlobalMask) {
  const Result r = sasa({"build-mask", "--n", "256", "--out", path("m.mask")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text(path("m.mask")), read_text(fixture("golden/local_global_n256.mask")));
  EXPECT_EQ(r.out, "mask: n=256 blocks=8 selected=44 bound=64\n");
}

TEST_F(Cli, AdjacencyAndMaskFromSource) {
  const std::string src = fixture("small_30.c").string();
  ASSERT_EQ(sasa({"build-vocab", src, "--out", path("v.txt")}).code, 0);
  const Result adj = sasa({"build-adj", src, "--vocab", path("v.txt"), "--D", "3", "--tokens",
                           path("tok.tsv"), "--out", path("a.adj")});
  ASSERT_EQ(adj.code, 0) << adj.err;

  const auto vocab = tokenizer::load_vocabulary(path("v.txt"));
  const std::string text = read_text(src);
  const auto code = tokenizer::tokenize(text, vocab);
  const auto expected = ast::build_token_adjacency(ast::parse_to_tree(text, "c"), code, 3);
  EXPECT_EQ(ast::load_adjacency(path("a.adj")), expected);
  std::ostringstream dump;
  tokenizer::write_token_dump(dump, code, vocab);
  EXPECT_EQ(read_text(path("tok.tsv")), dump.str());

  const Result m = sasa({"build-mask", "--adj", path("a.adj"), "--b", "4", "--g", "0", "--k",
                         "1", "--out", path("m.mask")});
  ASSERT_EQ(m.code, 0) << m.err;
  mask::AttentionConfig cfg;
  cfg.n = 32;
  cfg.b = 4;
  cfg.global_blocks = {0};
  cfg.k = 1;
  const auto file = mask::load_mask(path("m.mask"));
  EXPECT_EQ(file.mask, mask::build_mask(cfg, frequency::zero_pair_scores(32), expected));
  EXPECT_EQ(file.header, mask::MaskHeader::from_config(cfg));

  // Same mask straight from the source, adjacency built internally.
  const Result direct = sasa({"build-mask", "--source", src, "--vocab", path("v.txt"), "--D", "3",
                              "--b", "4", "--g", "0", "--k", "1", "--out", path("m2.mask")});
  ASSERT_EQ(direct.code, 0) << direct.err;
  EXPECT_EQ(read_text(path("m2.mask")), read_text(path("m.mask")));
}

TEST_F(Cli, FrequencyIsDeterministicAndShardsMerge) {
  const auto files = sasa::testing::corpus_files();
  ASSERT_EQ(sasa({"build-vocab", fixture("corpus").string(), "--out", path("v.txt")}).code, 0);
  auto freq = [&](std::vector<std::string> inputs, const std::string& out) {
    std::vector<std::string> args{"build-freq"};
    args.insert(args.end(), inputs.begin(), inputs.end());
    const std::vector<std::string> rest{"--vocab", path("v.txt"), "--seed", "4", "--n", "48",
                                        "--d-model", "16", "--heads", "2", "--out", out};
    args.insert(args.end(), rest.begin(), rest.end());
    return sasa(args);
  };
  std::vector<std::string> all, left, right;
  for (std::size_t i = 0; i < 6; ++i) {
    all.push_back(files[i].string());
    (i < 3 ? left : right).push_back(files[i].string());
  }
  ASSERT_EQ(freq(all, path("whole.freq")).code, 0);
  ASSERT_EQ(freq(all, path("again.freq")).code, 0);
  EXPECT_EQ(read_text(path("whole.freq")), read_text(path("again.freq")));
  ASSERT_EQ(freq(left, path("l.freq")).code, 0);
  ASSERT_EQ(freq(right, path("r.freq")).code, 0);
  const Result merged = sasa({"build-freq", "--merge", path("r.freq"), "--merge", path("l.freq"),
                              "--out", path("merged.freq")});
  ASSERT_EQ(merged.code, 0) << merged.err;
  EXPECT_EQ(read_text(path("merged.freq")), read_text(path("whole.freq")));
  EXPECT_GT(frequency::load_frequency(path("whole.freq")).total(), 0u);
}

TEST_F(Cli, AttentionMatchesLibraryAndWritesGradients) {
  Rng rng(71);
  mask::AttentionConfig cfg;
  cfg.n = 40;
  cfg.b = 8;
  cfg.global_blocks = {0};
  cfg.k = 1;
  const auto t = verify::random_attention_case(rng, cfg, 4, 0.1);
  save_matrix(path("q.bin"), t.q);
  save_matrix(path("k.bin"), t.k);
  save_matrix(path("v.bin"), t.v);
  mask::save_mask(path("m.mask"), mask::MaskHeader::from_config(cfg), t.mask);
  const Matrix up = random_matrix(rng, 40, 4);
  save_matrix(path("up.bin"), up);
  const Result r = sasa({"attn", "--q", path("q.bin"), "--k", path("k.bin"), "--v", path("v.bin"),
                         "--mask", path("m.mask"), "--check", "--upstream", path("up.bin"),
                         "--grad-out", path("grads"), "--out", path("o.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_matrix(path("o.bin")), attention::sparse_attention_forward(t).output);
  EXPECT_EQ(load_matrix(path("grads/dv.bin")), attention::attention_backward(t, up).dv);
  EXPECT_NE(r.out.find("max deviation from dense oracle"), std::string::npos);
}

TEST_F(Cli, VerifyPasses) {
  const Result r = sasa({"verify", "--n", "64", "--b", "8", "--cases", "3", "--seed", "5"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("oracle: n=64 b=8 cases=3"), std::string::npos);
  EXPECT_EQ(r.out.find("FAILED"), std::string::npos);
}

TEST_F(Cli, BenchStaysWithinBound) {
  const Result r = sasa({"bench", "--sweep", "256,512", "--runs", "1", "--seed", "3", "--out",
                         path("cost.jsonl")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("n=512 selected_blocks="), std::string::npos);
  EXPECT_NE(r.out.find("analytic_block_bound=176 ok"), std::string::npos);
  EXPECT_EQ(r.out.find("EXCEEDED"), std::string::npos);
  const std::string lines = read_text(path("cost.jsonl"));
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

TEST_F(Cli, StageTaggedDiagnostics) {
  Result r = sasa({"verify"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("sasa: args: ", 0), 0u) << r.err;

  r = sasa({"build-mask", "--adj", path("missing.adj"), "--out", path("m.mask")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("sasa: adjacency: ", 0), 0u) << r.err;

  r = sasa({"build-mask", "--n", "64", "--g", "5", "--out", path("m.mask")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("sasa: args: ", 0), 0u) << r.err;

  r = sasa({"build-mask", "--n", "64", "--w", "2", "--out", path("m.mask")});
  EXPECT_EQ(r.code, 2);

  r = sasa({"build-adj", fixture("small_30.c").string(), "--vocab", path("none.txt"), "--out",
            path("a.adj")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("none.txt"), std::string::npos);

  r = sasa({"build-mask", "--frobnicate"});
  EXPECT_NE(r.code, 0);
}

TEST_F(Cli, NoGlobalBlocks) {
  const Result r = sasa({"build-mask", "--n", "64", "--b", "8", "--g", "none", "--out",
                         path("m.mask")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto file = mask::load_mask(path("m.mask"));
  EXPECT_TRUE(file.header.global_blocks.empty());
  EXPECT_EQ(file.mask.selected_count(), 3u * 8 - 2);
}

}  // namespace
}  // namespace sasa::cli
