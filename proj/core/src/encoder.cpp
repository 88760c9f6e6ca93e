// SPDX-License-Identifier: Apache-2.0
#include "sasa/encoder.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "sasa/error.hpp"
#include "sasa/matrix_io.hpp"
#include "text_format.hpp"

namespace sasa::attention {
namespace {

Matrix linear(const Matrix& x, const Matrix& w, const Matrix& bias) {
  Matrix out = matmul(x, w);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias(0, c);
  }
  return out;
}

Matrix column_slice(const Matrix& m, std::size_t first, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.row(r).subspan(first, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidArgument("EncoderLayerParams: " + name + " is " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                          "x" + std::to_string(cols));
  }
}

}  // namespace

EncoderLayerParams EncoderLayerParams::random(Rng& rng, std::size_t d_model, std::size_t d_ff,
                                              double scale) {
  EncoderLayerParams p;
  p.w_q = random_matrix(rng, d_model, d_model, scale);
  p.w_k = random_matrix(rng, d_model, d_model, scale);
  p.w_v = random_matrix(rng, d_model, d_model, scale);
  p.w_o = random_matrix(rng, d_model, d_model, scale);
  p.b_q = p.b_k = p.b_v = p.b_o = Matrix(1, d_model);
  p.w_ff1 = random_matrix(rng, d_model, d_ff, scale);
  p.b_ff1 = Matrix(1, d_ff);
  p.w_ff2 = random_matrix(rng, d_ff, d_model, scale);
  p.b_ff2 = Matrix(1, d_model);
  p.ln1_gamma = p.ln2_gamma = Matrix(1, d_model, 1.0);
  p.ln1_beta = p.ln2_beta = Matrix(1, d_model);
  return p;
}

void EncoderLayerParams::validate() const {
  const std::size_t d = d_model();
  const std::size_t ff = d_ff();
  if (d == 0 || ff == 0) throw InvalidArgument("EncoderLayerParams: empty weights");
  check_shape(w_q, d, d, "w_q");
  check_shape(w_k, d, d, "w_k");
  check_shape(w_v, d, d, "w_v");
  check_shape(w_o, d, d, "w_o");
  for (const auto* bias : {&b_q, &b_k, &b_v, &b_o, &b_ff2, &ln1_gamma, &ln1_beta, &ln2_gamma,
                           &ln2_beta}) {
    check_shape(*bias, 1, d, "bias/norm vector");
  }
  check_shape(w_ff1, d, ff, "w_ff1");
  check_shape(b_ff1, 1, ff, "b_ff1");
  check_shape(w_ff2, ff, d, "w_ff2");
  for (const auto& [name, m] : named()) {
    if (!m->all_finite()) throw InvalidArgument("EncoderLayerParams: " + name + " not finite");
  }
}

std::vector<std::pair<std::string, const Matrix*>> EncoderLayerParams::named() const {
  return {{"w_q", &w_q},     {"w_k", &w_k},         {"w_v", &w_v},
          {"w_o", &w_o},     {"b_q", &b_q},         {"b_k", &b_k},
          {"b_v", &b_v},     {"b_o", &b_o},         {"w_ff1", &w_ff1},
          {"b_ff1", &b_ff1}, {"w_ff2", &w_ff2},     {"b_ff2", &b_ff2},
          {"ln1_gamma", &ln1_gamma}, {"ln1_beta", &ln1_beta},
          {"ln2_gamma", &ln2_gamma}, {"ln2_beta", &ln2_beta}};
}

std::vector<std::pair<std::string, Matrix*>> EncoderLayerParams::named() {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (const auto& [name, m] : std::as_const(*this).named()) {
    out.emplace_back(name, const_cast<Matrix*>(m));
  }
  return out;
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

Matrix layer_norm(const Matrix& x, const Matrix& gamma, const Matrix& beta, double eps) {
  Matrix out(x.rows(), x.cols());
  const double width = static_cast<double>(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= width;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= width;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      dst[c] = (row[c] - mean) * inv_std * gamma(0, c) + beta(0, c);
    }
  }
  return out;
}

EncoderLayerOutput encoder_layer_forward(const Matrix& x, const EncoderLayerParams& params,
                                         const mask::BlockMask& mask, std::size_t heads,
                                         std::size_t block_size) {
  params.validate();
  const std::size_t d = params.d_model();
  if (x.cols() != d) {
    throw InvalidArgument("encoder_layer_forward: input width " + std::to_string(x.cols()) +
                          " != d_model " + std::to_string(d));
  }
  if (heads == 0 || d % heads != 0) {
    throw InvalidArgument("encoder_layer_forward: d_model must be a multiple of heads");
  }
  const std::size_t n = x.rows();
  const std::size_t d_head = d / heads;

  const Matrix q = linear(x, params.w_q, params.b_q);
  const Matrix k = linear(x, params.w_k, params.b_k);
  const Matrix v = linear(x, params.w_v, params.b_v);

  EncoderLayerOutput result;
  Matrix concat(n, d);
  for (std::size_t h = 0; h < heads; ++h) {
    AttentionTensors t{column_slice(q, h * d_head, d_head), column_slice(k, h * d_head, d_head),
                       column_slice(v, h * d_head, d_head), mask, block_size, std::nullopt};
    ForwardResult fwd = sparse_attention_forward(t);
    for (std::size_t r = 0; r < n; ++r) {
      const auto src = fwd.output.row(r);
      std::copy(src.begin(), src.end(), concat.row(r).begin() + static_cast<std::ptrdiff_t>(h * d_head));
    }
    result.score_cells += fwd.probabilities.cells();
    result.head_probabilities.push_back(std::move(fwd.probabilities));
  }
  result.attention = linear(concat, params.w_o, params.b_o);

  const Matrix hidden = layer_norm(add(x, result.attention), params.ln1_gamma, params.ln1_beta);
  Matrix ff = linear(hidden, params.w_ff1, params.b_ff1);
  for (double& val : ff.data()) val = gelu(val);
  const Matrix ff_out = linear(ff, params.w_ff2, params.b_ff2);
  result.output = layer_norm(add(hidden, ff_out), params.ln2_gamma, params.ln2_beta);
  return result;
}

void save_encoder_params(const std::filesystem::path& dir, const EncoderLayerParams& params) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw FormatError("cannot write " + (dir / "manifest.txt").string());
  for (const auto& [name, m] : params.named()) {
    const std::string file = name + ".bin";
    save_matrix(dir / file, *m);
    manifest << name << '\t' << file << '\t' << m->rows() << '\t' << m->cols() << '\n';
  }
}

EncoderLayerParams load_encoder_params(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) throw FormatError("cannot open " + (dir / "manifest.txt").string());
  std::map<std::string, Matrix> loaded;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 4) throw FormatError("encoder manifest: malformed line '" + line + "'");
    Matrix m = load_matrix(dir / std::string(fields[1]));
    if (m.rows() != detail::parse_number<std::size_t>(fields[2], "manifest rows") ||
        m.cols() != detail::parse_number<std::size_t>(fields[3], "manifest cols")) {
      throw FormatError("encoder manifest: shape of " + std::string(fields[0]) +
                        " disagrees with its file");
    }
    loaded.emplace(std::string(fields[0]), std::move(m));
  }
  EncoderLayerParams params;
  for (auto& [name, slot] : params.named()) {
    auto it = loaded.find(name);
    if (it == loaded.end()) throw FormatError("encoder manifest: missing " + name);
    *slot = std::move(it->second);
  }
  params.validate();
  return params;
}

ToyEncoder::ToyEncoder(std::size_t vocab_size, const ToyEncoderConfig& cfg, std::uint64_t seed)
    : cfg_(cfg) {
  if (cfg.heads == 0 || cfg.d_model % cfg.heads != 0) {
    throw InvalidArgument("ToyEncoder: d_model must be a multiple of heads");
  }
  Rng rng(seed);
  embeddings_ = random_matrix(rng, vocab_size, cfg.d_model, cfg.init_scale);
  positions_ = random_matrix(rng, cfg.max_len, cfg.d_model, cfg.init_scale);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    layers_.push_back(EncoderLayerParams::random(rng, cfg.d_model, 4 * cfg.d_model,
                                                 cfg.init_scale));
  }
}

Matrix ToyEncoder::embed(std::span<const tokenizer::TokenId> ids) const {
  if (ids.size() > cfg_.max_len) throw InvalidArgument("ToyEncoder: sequence exceeds max_len");
  Matrix x(ids.size(), cfg_.d_model);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= embeddings_.rows()) throw InvalidArgument("ToyEncoder: token id >= |V|");
    auto row = x.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = embeddings_(ids[i], c) + positions_(i, c);
    }
  }
  return x;
}

Matrix ToyEncoder::encode(std::span<const tokenizer::TokenId> ids, const mask::BlockMask& mask,
                          std::size_t block_size) const {
  Matrix x = embed(ids);
  for (const auto& layer : layers_) {
    x = encoder_layer_forward(x, layer, mask, cfg_.heads, block_size).output;
  }
  return x;
}

std::vector<Matrix> ToyEncoder::dense_attention_maps(
    std::span<const tokenizer::TokenId> ids) const {
  const std::size_t n = ids.size();
  const mask::BlockMask everything = mask::BlockMask::full(1);
  std::vector<Matrix> maps;
  Matrix x = embed(ids);
  for (const auto& layer : layers_) {
    EncoderLayerOutput out = encoder_layer_forward(x, layer, everything, cfg_.heads, n);
    for (const auto& probs : out.head_probabilities) maps.push_back(probs.to_dense(everything, n));
    x = std::move(out.output);
  }
  return maps;
}

}  // namespace sasa::attention
