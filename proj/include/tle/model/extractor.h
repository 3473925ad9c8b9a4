// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_MODEL_EXTRACTOR_H_
#define TLE_MODEL_EXTRACTOR_H_

#include <cstdint>

#include <torch/torch.h>

#include "tle/model/config.h"

namespace tle::model {

// Tensor layouts used throughout this module:
//   waveform batch   [B, L]
//   feature map      [B, T, N]      (frames x feat_dim per item)
//   chunk tensor     [B, S, K, N]   (n_chunks x chunk_len x feat_dim)
struct ChunkTensor {
  torch::Tensor data;
  int64_t frames = 0;  // frame count before right padding
};

// Splits a feature map into overlapping chunks of chunk_len frames spaced
// chunk_hop apart, zero-padding on the right to complete the last chunk.
ChunkTensor Segment(const torch::Tensor& features, const ModelConfig& cfg);

// Overlap-add inverse of Segment. Each frame is divided by the number of
// chunks covering it, then the padding is dropped.
torch::Tensor MergeChunks(const ChunkTensor& chunks, const ModelConfig& cfg);

// [length, dim] sinusoidal position table.
torch::Tensor SinusoidalEncoding(int64_t length, int64_t dim, const torch::TensorOptions& opts);

// Normalizes each batch item over all of its non-batch elements, with a
// per-feature affine on the last axis.
class GlobalLayerNormImpl : public torch::nn::Module {
 public:
  explicit GlobalLayerNormImpl(int64_t dim, double eps = 1e-8);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  double eps_;
  torch::Tensor weight_, bias_;
};
TORCH_MODULE(GlobalLayerNorm);

class MultiHeadAttentionImpl : public torch::nn::Module {
 public:
  MultiHeadAttentionImpl(int64_t dim, int64_t heads);
  // x: [B, T, N] -> [B, T, N]
  torch::Tensor forward(const torch::Tensor& x);

 private:
  int64_t heads_;
  torch::nn::Linear in_proj_{nullptr}, out_proj_{nullptr};
};
TORCH_MODULE(MultiHeadAttention);

// Pre-norm transformer encoder layer with a ReLU feed-forward.
class TransformerLayerImpl : public torch::nn::Module {
 public:
  TransformerLayerImpl(int64_t dim, int64_t heads, int64_t ff_dim);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::LayerNorm norm1_{nullptr}, norm2_{nullptr};
  MultiHeadAttention attn_{nullptr};
  torch::nn::Linear ff1_{nullptr}, ff2_{nullptr};
};
TORCH_MODULE(TransformerLayer);

// Sinusoidal positions, a stack of layers and a closing layer norm.
class TransformerStackImpl : public torch::nn::Module {
 public:
  TransformerStackImpl(int64_t layers, int64_t dim, int64_t heads, int64_t ff_dim);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::ModuleList layers_;
  torch::nn::LayerNorm final_norm_{nullptr};
};
TORCH_MODULE(TransformerStack);

// One dual-path block: an intra-chunk transformer attends along chunk_len
// within each chunk, then an inter-chunk transformer attends along n_chunks
// at each within-chunk position. Each pass is followed by a global layer
// norm and wrapped in a residual connection.
class DualPathBlockImpl : public torch::nn::Module {
 public:
  explicit DualPathBlockImpl(const ModelConfig& cfg);
  ChunkTensor IntraPass(const ChunkTensor& c);
  ChunkTensor InterPass(const ChunkTensor& c);
  ChunkTensor forward(const ChunkTensor& c);

 private:
  TransformerStack intra_{nullptr}, inter_{nullptr};
  GlobalLayerNorm intra_norm_{nullptr}, inter_norm_{nullptr};
};
TORCH_MODULE(DualPathBlock);

// Time-domain single-target extractor: conv encoder, dual-path masker,
// sigmoid mask, transposed-conv decoder.
class ExtractorImpl : public torch::nn::Module {
 public:
  explicit ExtractorImpl(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }

  // [B, L] -> [B, T, N], non-negative.
  torch::Tensor Encode(const torch::Tensor& mixture);
  // Bottleneck, segmentation, dual-path blocks and overlap-add merge.
  torch::Tensor Mask(const torch::Tensor& features);
  // [B, T, N] -> mask in [0, 1] of the same shape.
  torch::Tensor EstimateMask(const torch::Tensor& merged);
  // [B, T, N] -> [B, length]
  torch::Tensor Decode(const torch::Tensor& features, int64_t length);

  // Full pipeline; accepts [L] or [B, L] and preserves the shape.
  torch::Tensor forward(const torch::Tensor& mixture);
  // Encoder and decoder only (mask fixed to one).
  torch::Tensor Autoencode(const torch::Tensor& mixture);

  DualPathBlock block(int index) { return blocks_->ptr<DualPathBlockImpl>(index); }

 private:
  ModelConfig cfg_;
  torch::nn::Conv1d encoder_{nullptr};
  GlobalLayerNorm bottleneck_norm_{nullptr};
  torch::nn::Linear bottleneck_{nullptr};
  torch::nn::ModuleList blocks_;
  torch::nn::PReLU mask_act_{nullptr};
  torch::nn::Linear mask_proj_{nullptr}, gate_tanh_{nullptr}, gate_sigmoid_{nullptr};
  torch::nn::Linear mask_out_{nullptr};
  torch::nn::ConvTranspose1d decoder_{nullptr};
};
TORCH_MODULE(Extractor);

// Builds an extractor with parameters drawn from `seed`.
Extractor MakeExtractor(const ModelConfig& cfg, uint64_t seed);

}  // namespace tle::model

#endif  // TLE_MODEL_EXTRACTOR_H_
