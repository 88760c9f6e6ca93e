// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sasa/attention.hpp"
#include "sasa/mask.hpp"
#include "sasa/matrix.hpp"
#include "sasa/random.hpp"
#include "sasa/tokenizer.hpp"

namespace sasa::attention {

/// Weights of one post-norm transformer encoder layer. Biases and layer-norm
/// parameters are 1×width row vectors.
struct EncoderLayerParams {
  Matrix w_q, w_k, w_v, w_o;
  Matrix b_q, b_k, b_v, b_o;
  Matrix w_ff1, b_ff1;
  Matrix w_ff2, b_ff2;
  Matrix ln1_gamma, ln1_beta;
  Matrix ln2_gamma, ln2_beta;

  std::size_t d_model() const noexcept { return w_q.rows(); }
  std::size_t d_ff() const noexcept { return w_ff1.cols(); }

  /// Uniform(-scale, scale) projections, zero biases, unit layer norms.
  static EncoderLayerParams random(Rng& rng, std::size_t d_model, std::size_t d_ff,
                                   double scale);
  void validate() const;

  /// (name, matrix) pairs in a fixed order, used for serialization.
  std::vector<std::pair<std::string, const Matrix*>> named() const;
  std::vector<std::pair<std::string, Matrix*>> named();

  friend bool operator==(const EncoderLayerParams&, const EncoderLayerParams&) = default;
};

inline constexpr double kLayerNormEps = 1e-5;

struct EncoderLayerOutput {
  Matrix output;
  /// Multi-head attention after the output projection, before residual/norm.
  Matrix attention;
  /// Per head, the normalized attention weights of the selected tiles.
  std::vector<BlockSparseScores> head_probabilities;
  /// Score cells allocated across heads.
  std::size_t score_cells = 0;
};

/// SASA multi-head attention (all heads share `mask`) + residual + layer
/// norm, then GELU feed-forward + residual + layer norm.
EncoderLayerOutput encoder_layer_forward(const Matrix& x, const EncoderLayerParams& params,
                                         const mask::BlockMask& mask, std::size_t heads,
                                         std::size_t block_size);

Matrix layer_norm(const Matrix& x, const Matrix& gamma, const Matrix& beta,
                  double eps = kLayerNormEps);
double gelu(double x);

/// Directory of `<name>.bin` matrices plus `manifest.txt` listing
/// `name<TAB>file<TAB>rows<TAB>cols` per matrix.
void save_encoder_params(const std::filesystem::path& dir, const EncoderLayerParams& params);
EncoderLayerParams load_encoder_params(const std::filesystem::path& dir);

struct ToyEncoderConfig {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t max_len = tokenizer::kDefaultMaxLen;
  /// Init range for embeddings and projections. Larger values give
  /// peakier attention.
  double init_scale = 0.5;
};

/// A randomly initialised encoder stack. Stands in for a pre-trained
/// backbone wherever an attention source is needed.
class ToyEncoder {
 public:
  ToyEncoder(std::size_t vocab_size, const ToyEncoderConfig& cfg, std::uint64_t seed);

  const ToyEncoderConfig& config() const noexcept { return cfg_; }
  std::size_t vocab_size() const noexcept { return embeddings_.rows(); }
  const std::vector<EncoderLayerParams>& layers() const noexcept { return layers_; }

  /// Token plus position embeddings for ids (length <= max_len).
  Matrix embed(std::span<const tokenizer::TokenId> ids) const;

  /// Runs every layer under `mask`, returning the final hidden states.
  Matrix encode(std::span<const tokenizer::TokenId> ids, const mask::BlockMask& mask,
                std::size_t block_size) const;

  /// Dense attention weights for every (layer, head), run without sparsity.
  std::vector<Matrix> dense_attention_maps(std::span<const tokenizer::TokenId> ids) const;

 private:
  ToyEncoderConfig cfg_;
  Matrix embeddings_;
  Matrix positions_;
  std::vector<EncoderLayerParams> layers_;
};

}  // namespace sasa::attention
