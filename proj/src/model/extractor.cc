// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/model/extractor.h"

#include <cmath>

#include "tle/util/error.h"

namespace F = torch::nn::functional;

namespace tle::model {

ChunkTensor Segment(const torch::Tensor& features, const ModelConfig& cfg) {
  TLE_CHECK(features.dim() == 3, "segment expects [B, T, N], got ", features.sizes());
  const int64_t frames = features.size(1);
  const int64_t n_chunks = cfg.NumChunks(frames);
  const int64_t padded = (n_chunks - 1) * cfg.chunk_hop + cfg.chunk_len;
  torch::Tensor x = features;
  if (padded > frames) x = F::pad(features, F::PadFuncOptions({0, 0, 0, padded - frames}));
  // unfold: [B, S, N, K] -> [B, S, K, N]
  torch::Tensor chunks = x.unfold(1, cfg.chunk_len, cfg.chunk_hop).permute({0, 1, 3, 2});
  return {chunks.contiguous(), frames};
}

torch::Tensor MergeChunks(const ChunkTensor& chunks, const ModelConfig& cfg) {
  const torch::Tensor& x = chunks.data;
  TLE_CHECK(x.dim() == 4, "merge_chunks expects [B, S, K, N], got ", x.sizes());
  if (x.size(2) != cfg.chunk_len) {
    Fail("merge_chunks: chunk length ", x.size(2), " does not match config ", cfg.chunk_len);
  }
  if (chunks.frames < 1 || cfg.NumChunks(chunks.frames) != x.size(1)) {
    Fail("merge_chunks: stored frame count ", chunks.frames, " is inconsistent with ",
         x.size(1), " chunks (corrupted chunk tensor)");
  }
  const int64_t batch = x.size(0), n_chunks = x.size(1), dim = x.size(3);
  const int64_t padded = (n_chunks - 1) * cfg.chunk_hop + cfg.chunk_len;
  auto fold = F::FoldFuncOptions({1, padded}, {1, cfg.chunk_len}).stride({1, cfg.chunk_hop});

  torch::Tensor cols = x.permute({0, 3, 2, 1}).reshape({batch, dim * cfg.chunk_len, n_chunks});
  torch::Tensor summed = F::fold(cols, fold).reshape({batch, dim, padded});
  torch::Tensor counts =
      F::fold(torch::ones({1, cfg.chunk_len, n_chunks}, x.options()), fold).reshape({1, 1, padded});
  return (summed / counts).transpose(1, 2).slice(1, 0, chunks.frames);
}

torch::Tensor SinusoidalEncoding(int64_t length, int64_t dim, const torch::TensorOptions& opts) {
  torch::Tensor pos = torch::arange(length, opts).unsqueeze(1);
  torch::Tensor idx = torch::arange(0, dim, 2, opts);
  torch::Tensor freq = torch::exp(idx * (-std::log(10000.0) / static_cast<double>(dim)));
  torch::Tensor pe = torch::zeros({length, dim}, opts);
  pe.index_put_({torch::indexing::Slice(), torch::indexing::Slice(0, torch::indexing::None, 2)},
                torch::sin(pos * freq));
  pe.index_put_({torch::indexing::Slice(), torch::indexing::Slice(1, torch::indexing::None, 2)},
                torch::cos(pos * freq).slice(1, 0, dim / 2));
  return pe;
}

GlobalLayerNormImpl::GlobalLayerNormImpl(int64_t dim, double eps) : eps_(eps) {
  weight_ = register_parameter("weight", torch::ones({dim}));
  bias_ = register_parameter("bias", torch::zeros({dim}));
}

torch::Tensor GlobalLayerNormImpl::forward(const torch::Tensor& x) {
  std::vector<int64_t> dims;
  for (int64_t d = 1; d < x.dim(); ++d) dims.push_back(d);
  torch::Tensor mean = x.mean(dims, /*keepdim=*/true);
  torch::Tensor var = (x - mean).pow(2).mean(dims, true);
  return (x - mean) / torch::sqrt(var + eps_) * weight_ + bias_;
}

MultiHeadAttentionImpl::MultiHeadAttentionImpl(int64_t dim, int64_t heads) : heads_(heads) {
  in_proj_ = register_module("in_proj", torch::nn::Linear(dim, 3 * dim));
  out_proj_ = register_module("out_proj", torch::nn::Linear(dim, dim));
  torch::NoGradGuard no_grad;
  torch::nn::init::xavier_uniform_(in_proj_->weight);
  torch::nn::init::zeros_(in_proj_->bias);
  torch::nn::init::zeros_(out_proj_->bias);
}

torch::Tensor MultiHeadAttentionImpl::forward(const torch::Tensor& x) {
  const int64_t batch = x.size(0), len = x.size(1), dim = x.size(2);
  auto split = [&](const torch::Tensor& t) {
    return t.view({batch, len, heads_, dim / heads_}).transpose(1, 2);
  };
  std::vector<torch::Tensor> qkv = in_proj_(x).chunk(3, -1);
  torch::Tensor ctx =
      at::scaled_dot_product_attention(split(qkv[0]), split(qkv[1]), split(qkv[2]));
  return out_proj_(ctx.transpose(1, 2).reshape({batch, len, dim}));
}

TransformerLayerImpl::TransformerLayerImpl(int64_t dim, int64_t heads, int64_t ff_dim) {
  norm1_ = register_module("norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
  attn_ = register_module("attn", MultiHeadAttention(dim, heads));
  norm2_ = register_module("norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
  ff1_ = register_module("ff1", torch::nn::Linear(dim, ff_dim));
  ff2_ = register_module("ff2", torch::nn::Linear(ff_dim, dim));
}

torch::Tensor TransformerLayerImpl::forward(const torch::Tensor& x) {
  torch::Tensor h = x + attn_(norm1_(x));
  return h + ff2_(torch::relu(ff1_(norm2_(h))));
}

TransformerStackImpl::TransformerStackImpl(int64_t layers, int64_t dim, int64_t heads,
                                           int64_t ff_dim) {
  for (int64_t i = 0; i < layers; ++i) layers_->push_back(TransformerLayer(dim, heads, ff_dim));
  register_module("layers", layers_);
  final_norm_ =
      register_module("final_norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim})));
}

torch::Tensor TransformerStackImpl::forward(const torch::Tensor& x) {
  torch::Tensor h = x + SinusoidalEncoding(x.size(1), x.size(2), x.options());
  for (const auto& layer : *layers_) h = layer->as<TransformerLayer>()->forward(h);
  return final_norm_(h);
}

DualPathBlockImpl::DualPathBlockImpl(const ModelConfig& cfg) {
  intra_ = register_module(
      "intra", TransformerStack(cfg.n_intra_layers, cfg.feat_dim, cfg.n_heads, cfg.ff_dim));
  intra_norm_ = register_module("intra_norm", GlobalLayerNorm(cfg.feat_dim));
  inter_ = register_module(
      "inter", TransformerStack(cfg.n_inter_layers, cfg.feat_dim, cfg.n_heads, cfg.ff_dim));
  inter_norm_ = register_module("inter_norm", GlobalLayerNorm(cfg.feat_dim));
}

ChunkTensor DualPathBlockImpl::IntraPass(const ChunkTensor& c) {
  const auto b = c.data.size(0), s = c.data.size(1), k = c.data.size(2), n = c.data.size(3);
  torch::Tensor h = intra_(c.data.reshape({b * s, k, n})).reshape({b, s, k, n});
  return {c.data + intra_norm_(h), c.frames};
}

ChunkTensor DualPathBlockImpl::InterPass(const ChunkTensor& c) {
  const auto b = c.data.size(0), s = c.data.size(1), k = c.data.size(2), n = c.data.size(3);
  torch::Tensor across = c.data.permute({0, 2, 1, 3}).reshape({b * k, s, n});
  torch::Tensor h = inter_(across).reshape({b, k, s, n}).permute({0, 2, 1, 3});
  return {c.data + inter_norm_(h), c.frames};
}

ChunkTensor DualPathBlockImpl::forward(const ChunkTensor& c) { return InterPass(IntraPass(c)); }

ExtractorImpl::ExtractorImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  const int64_t n = cfg_.feat_dim;
  encoder_ = register_module(
      "encoder",
      torch::nn::Conv1d(torch::nn::Conv1dOptions(1, n, cfg_.enc_kernel).stride(cfg_.enc_stride).bias(false)));
  bottleneck_norm_ = register_module("bottleneck_norm", GlobalLayerNorm(n));
  bottleneck_ = register_module("bottleneck", torch::nn::Linear(torch::nn::LinearOptions(n, n).bias(false)));
  for (int i = 0; i < cfg_.n_dual_blocks; ++i) blocks_->push_back(DualPathBlock(cfg_));
  register_module("blocks", blocks_);
  mask_act_ = register_module("mask_act", torch::nn::PReLU());
  mask_proj_ = register_module("mask_proj", torch::nn::Linear(n, n));
  gate_tanh_ = register_module("gate_tanh", torch::nn::Linear(n, n));
  gate_sigmoid_ = register_module("gate_sigmoid", torch::nn::Linear(n, n));
  mask_out_ = register_module("mask_out", torch::nn::Linear(torch::nn::LinearOptions(n, n).bias(false)));
  decoder_ = register_module(
      "decoder", torch::nn::ConvTranspose1d(
                     torch::nn::ConvTranspose1dOptions(n, 1, cfg_.enc_kernel).stride(cfg_.enc_stride).bias(false)));
}

torch::Tensor ExtractorImpl::Encode(const torch::Tensor& mixture) {
  TLE_CHECK(mixture.dim() == 2, "encode expects [B, L], got ", mixture.sizes());
  cfg_.NumFrames(mixture.size(1));  // length check
  return torch::relu(encoder_(mixture.unsqueeze(1))).transpose(1, 2);
}

torch::Tensor ExtractorImpl::Mask(const torch::Tensor& features) {
  ChunkTensor c = Segment(bottleneck_(bottleneck_norm_(features)), cfg_);
  for (const auto& block : *blocks_) c = block->as<DualPathBlock>()->forward(c);
  return MergeChunks(c, cfg_);
}

torch::Tensor ExtractorImpl::EstimateMask(const torch::Tensor& merged) {
  torch::Tensor h = mask_proj_(mask_act_(merged));
  h = torch::tanh(gate_tanh_(h)) * torch::sigmoid(gate_sigmoid_(h));
  return torch::sigmoid(mask_out_(h));
}

torch::Tensor ExtractorImpl::Decode(const torch::Tensor& features, int64_t length) {
  torch::Tensor y = decoder_(features.transpose(1, 2)).squeeze(1);
  const int64_t produced = y.size(1);
  if (produced < length) return F::pad(y, F::PadFuncOptions({0, length - produced}));
  return y.slice(1, 0, length);
}

torch::Tensor ExtractorImpl::forward(const torch::Tensor& mixture) {
  const bool flat = mixture.dim() == 1;
  torch::Tensor x = flat ? mixture.unsqueeze(0) : mixture;
  torch::Tensor w = Encode(x);
  torch::Tensor mask = EstimateMask(Mask(w));
  torch::Tensor y = Decode(w * mask, x.size(1));
  return flat ? y.squeeze(0) : y;
}

torch::Tensor ExtractorImpl::Autoencode(const torch::Tensor& mixture) {
  const bool flat = mixture.dim() == 1;
  torch::Tensor x = flat ? mixture.unsqueeze(0) : mixture;
  torch::Tensor y = Decode(Encode(x), x.size(1));
  return flat ? y.squeeze(0) : y;
}

Extractor MakeExtractor(const ModelConfig& cfg, uint64_t seed) {
  torch::manual_seed(seed);
  return Extractor(cfg);
}

}  // namespace tle::model
