// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/supervision/embedder.h"

#include <torch/script.h>

#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace F = torch::nn::functional;

namespace tle::supervision {

nlohmann::json BuiltinArch::ToJson() const {
  return {{"conv_channels", conv_channels}, {"conv_kernels", conv_kernels},
          {"conv_strides", conv_strides},   {"hidden", hidden},
          {"heads", heads},                 {"ff_dim", ff_dim},
          {"pos_conv_kernel", pos_conv_kernel}, {"pos_conv_groups", pos_conv_groups},
          {"seed", seed}};
}

BuiltinArch BuiltinArch::FromJson(const nlohmann::json& j) {
  BuiltinArch a;
  JsonReader(j, "builtin")
      .Field("conv_channels", a.conv_channels)
      .Field("conv_kernels", a.conv_kernels)
      .Field("conv_strides", a.conv_strides)
      .Field("hidden", a.hidden)
      .Field("heads", a.heads)
      .Field("ff_dim", a.ff_dim)
      .Field("pos_conv_kernel", a.pos_conv_kernel)
      .Field("pos_conv_groups", a.pos_conv_groups)
      .Field("seed", a.seed)
      .Finish();
  if (a.conv_kernels.size() != a.conv_strides.size() || a.conv_kernels.empty()) {
    Fail("builtin embedder: conv_kernels and conv_strides must be non-empty and equal length");
  }
  if (a.hidden % a.heads != 0) Fail("builtin embedder: hidden not divisible by heads");
  if (a.hidden % a.pos_conv_groups != 0) Fail("builtin embedder: hidden not divisible by pos_conv_groups");
  return a;
}

nlohmann::json EmbeddingModelSpec::ToJson() const {
  nlohmann::json j = {{"model_id", model_id},       {"backend", backend},
                      {"source", source},           {"file", file},
                      {"num_layers", num_layers},   {"layer_index", layer_index},
                      {"expected_rate", expected_rate}, {"feature_dim", feature_dim},
                      {"normalize_waveform", normalize_waveform},
                      {"hidden_state", hidden_state}};
  if (backend == "builtin") j["builtin"] = arch.ToJson();
  return j;
}

torch::Tensor SpeechEmbedder::Embed(const torch::Tensor& wav) const {
  const bool flat = wav.dim() == 1;
  TLE_CHECK(flat || wav.dim() == 2, "embed expects [L] or [B, L], got ", wav.sizes());
  torch::Tensor x = flat ? wav.unsqueeze(0) : wav;
  if (spec_.normalize_waveform) {
    torch::Tensor mean = x.mean(-1, true);
    torch::Tensor var = (x - mean).pow(2).mean(-1, true);
    x = (x - mean) / torch::sqrt(var + 1e-7);
  }
  ++invocations_;
  torch::Tensor out = Forward(x.to(dtype())).to(wav.scalar_type());
  if (out.size(-1) != spec_.feature_dim) {
    Fail("embedder '", spec_.model_id, "' produced feature dim ", out.size(-1), ", registry says ",
         spec_.feature_dim);
  }
  return flat ? out.squeeze(0) : out;
}

torch::Tensor SpeechEmbedder::Embed(const dsp::Waveform& w) const {
  if (w.sample_rate != spec_.expected_rate) {
    Fail("embedder '", spec_.model_id, "' expects ", spec_.expected_rate, " Hz input, got ",
         w.sample_rate, " Hz");
  }
  w.Validate();
  torch::Tensor t = torch::tensor(w.samples, torch::kFloat64);
  torch::NoGradGuard no_grad;
  return Embed(t);
}

namespace {

class HubertLayerImpl : public torch::nn::Module {
 public:
  HubertLayerImpl(int64_t dim, int64_t heads, int64_t ff) : heads_(heads) {
    qkv_ = register_module("qkv", torch::nn::Linear(dim, 3 * dim));
    out_ = register_module("out", torch::nn::Linear(dim, dim));
    norm1_ = register_module("norm1", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim}).eps(1e-5)));
    ff1_ = register_module("ff1", torch::nn::Linear(dim, ff));
    ff2_ = register_module("ff2", torch::nn::Linear(ff, dim));
    norm2_ = register_module("norm2", torch::nn::LayerNorm(torch::nn::LayerNormOptions({dim}).eps(1e-5)));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    const int64_t b = x.size(0), t = x.size(1), d = x.size(2);
    auto split = [&](const torch::Tensor& v) { return v.view({b, t, heads_, d / heads_}).transpose(1, 2); };
    auto qkv = qkv_(x).chunk(3, -1);
    torch::Tensor ctx = at::scaled_dot_product_attention(split(qkv[0]), split(qkv[1]), split(qkv[2]));
    torch::Tensor h = norm1_(x + out_(ctx.transpose(1, 2).reshape({b, t, d})));
    return norm2_(h + ff2_(F::gelu(ff1_(h))));
  }

 private:
  int64_t heads_;
  torch::nn::Linear qkv_{nullptr}, out_{nullptr}, ff1_{nullptr}, ff2_{nullptr};
  torch::nn::LayerNorm norm1_{nullptr}, norm2_{nullptr};
};
TORCH_MODULE(HubertLayer);

class HubertNetImpl : public torch::nn::Module {
 public:
  HubertNetImpl(const BuiltinArch& a, int layers) {
    const int64_t c = a.conv_channels;
    for (std::size_t i = 0; i < a.conv_kernels.size(); ++i) {
      convs_->push_back(torch::nn::Conv1d(
          torch::nn::Conv1dOptions(i == 0 ? 1 : c, c, a.conv_kernels[i]).stride(a.conv_strides[i]).bias(false)));
    }
    register_module("convs", convs_);
    conv_norm_ = register_module("conv_norm", torch::nn::GroupNorm(torch::nn::GroupNormOptions(c, c)));
    proj_norm_ = register_module("proj_norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions({c})));
    proj_ = register_module("proj", torch::nn::Linear(c, a.hidden));
    pos_conv_ = register_module(
        "pos_conv", torch::nn::Conv1d(torch::nn::Conv1dOptions(a.hidden, a.hidden, a.pos_conv_kernel)
                                          .padding(a.pos_conv_kernel / 2)
                                          .groups(a.pos_conv_groups)));
    pos_trim_ = a.pos_conv_kernel % 2 == 0;
    enc_norm_ = register_module("enc_norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions({a.hidden})));
    for (int i = 0; i < layers; ++i) layers_->push_back(HubertLayer(a.hidden, a.heads, a.ff_dim));
    register_module("layers", layers_);
  }

  // Hidden state `layer` (0 = after the positional embedding and norm).
  torch::Tensor forward(const torch::Tensor& wav, int layer) {
    torch::Tensor x = wav.unsqueeze(1);
    for (std::size_t i = 0; i < convs_->size(); ++i) {
      x = convs_[i]->as<torch::nn::Conv1d>()->forward(x);
      if (i == 0) x = conv_norm_(x);
      x = F::gelu(x);
    }
    torch::Tensor h = proj_(proj_norm_(x.transpose(1, 2)));
    torch::Tensor pos = pos_conv_(h.transpose(1, 2));
    if (pos_trim_) pos = pos.slice(2, 0, pos.size(2) - 1);
    h = enc_norm_(h + F::gelu(pos).transpose(1, 2));
    for (int i = 0; i < layer; ++i) h = layers_[i]->as<HubertLayer>()->forward(h);
    return h;
  }

 private:
  torch::nn::ModuleList convs_, layers_;
  torch::nn::GroupNorm conv_norm_{nullptr};
  torch::nn::LayerNorm proj_norm_{nullptr}, enc_norm_{nullptr};
  torch::nn::Linear proj_{nullptr};
  torch::nn::Conv1d pos_conv_{nullptr};
  bool pos_trim_ = false;
};
TORCH_MODULE(HubertNet);

void Freeze(torch::nn::Module& m) {
  m.eval();
  for (auto& p : m.parameters()) p.set_requires_grad(false);
}

class BuiltinEmbedder : public SpeechEmbedder {
 public:
  explicit BuiltinEmbedder(const EmbeddingModelSpec& spec)
      : SpeechEmbedder(spec), net_(nullptr) {
    torch::manual_seed(spec.arch.seed);
    net_ = HubertNet(spec.arch, spec.num_layers);
    Freeze(*net_);
  }

  NamedTensors Parameters() const override {
    NamedTensors out;
    for (const auto& item : net_->named_parameters()) out.emplace_back(item.key(), item.value().detach().clone());
    return out;
  }
  void To(torch::ScalarType dtype) override { net_->to(dtype); }
  torch::ScalarType dtype() const override { return net_->parameters().front().scalar_type(); }

 protected:
  torch::Tensor Forward(const torch::Tensor& wav) const override {
    return net_->forward(wav, spec().layer_index);
  }

 private:
  mutable HubertNet net_;
};

class TorchScriptEmbedder : public SpeechEmbedder {
 public:
  TorchScriptEmbedder(const EmbeddingModelSpec& spec, const std::string& path)
      : SpeechEmbedder(spec) {
    try {
      module_ = torch::jit::load(path);
    } catch (const std::exception& e) {
      Fail("failed to load embedding model '", spec.model_id, "' from ", path, ": ", e.what());
    }
    module_.eval();
    for (auto p : module_.parameters()) p.set_requires_grad(false);
    dtype_ = torch::kFloat32;
  }

  NamedTensors Parameters() const override {
    NamedTensors out;
    for (const auto& item : module_.named_parameters()) out.emplace_back(item.name, item.value.detach().clone());
    return out;
  }
  void To(torch::ScalarType dtype) override {
    module_.to(dtype);
    dtype_ = dtype;
  }
  torch::ScalarType dtype() const override { return dtype_; }

 protected:
  torch::Tensor Forward(const torch::Tensor& wav) const override {
    // The exported module returns every hidden state; pick the configured one.
    auto out = const_cast<torch::jit::Module&>(module_).forward({wav});
    std::vector<torch::Tensor> states;
    if (out.isTuple()) {
      for (const auto& v : out.toTupleRef().elements()) states.push_back(v.toTensor());
    } else if (out.isTensorList()) {
      states = out.toTensorVector();
    } else {
      Fail("embedding model '", spec().model_id, "' must return a tuple of hidden states");
    }
    if (spec().layer_index < 0 || spec().layer_index >= static_cast<int>(states.size())) {
      Fail("layer_index ", spec().layer_index, " out of range for '", spec().model_id, "' with ",
           states.size(), " hidden states");
    }
    return states[spec().layer_index];
  }

 private:
  torch::jit::Module module_;
  torch::ScalarType dtype_;
};

}  // namespace

std::unique_ptr<SpeechEmbedder> MakeBuiltinEmbedder(const EmbeddingModelSpec& spec) {
  if (spec.layer_index < 0 || spec.layer_index > spec.num_layers) {
    Fail("layer_index ", spec.layer_index, " invalid for '", spec.model_id, "' with ", spec.num_layers,
         " layers");
  }
  if (spec.feature_dim != spec.arch.hidden) {
    Fail("builtin embedder '", spec.model_id, "': feature_dim ", spec.feature_dim,
         " differs from hidden size ", spec.arch.hidden);
  }
  return std::make_unique<BuiltinEmbedder>(spec);
}

std::unique_ptr<SpeechEmbedder> LoadTorchScriptEmbedder(const EmbeddingModelSpec& spec,
                                                        const std::string& path) {
  return std::make_unique<TorchScriptEmbedder>(spec, path);
}

}  // namespace tle::supervision
