// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_SUPERVISION_EMBEDDER_H_
#define TLE_SUPERVISION_EMBEDDER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "tle/dsp/waveform.h"
#include "tle/util/tensor_file.h"

namespace tle::supervision {

// Sizes of the built-in HuBERT-style network.
struct BuiltinArch {
  int conv_channels = 512;
  std::vector<int> conv_kernels = {10, 3, 3, 3, 3, 2, 2};
  std::vector<int> conv_strides = {5, 2, 2, 2, 2, 2, 2};
  int hidden = 768;
  int heads = 12;
  int ff_dim = 3072;
  int pos_conv_kernel = 128;
  int pos_conv_groups = 16;
  uint64_t seed = 0;

  nlohmann::json ToJson() const;
  static BuiltinArch FromJson(const nlohmann::json& j);
};

struct EmbeddingModelSpec {
  std::string model_id;
  std::string backend;      // "builtin" or "torchscript"
  std::string source;       // upstream hub identifier, informational
  std::string file;         // torchscript file, relative to the model cache
  int num_layers = 12;
  int layer_index = 12;     // 0 = input to the first transformer layer
  int expected_rate = dsp::kModelRate;
  int feature_dim = 768;
  bool normalize_waveform = false;  // zero-mean, unit-variance per utterance
  std::string hidden_state = "post-norm";
  BuiltinArch arch;

  nlohmann::json ToJson() const;
};

// A frozen speech model h(.) that maps waveforms to hidden-state sequences.
// Parameters never receive gradients; gradients do flow back to the input.
class SpeechEmbedder {
 public:
  explicit SpeechEmbedder(EmbeddingModelSpec spec) : spec_(std::move(spec)) {}
  virtual ~SpeechEmbedder() = default;
  SpeechEmbedder(const SpeechEmbedder&) = delete;
  SpeechEmbedder& operator=(const SpeechEmbedder&) = delete;

  // [L] or [B, L] at 16 kHz -> [F, D] or [B, F, D], in the input's dtype.
  torch::Tensor Embed(const torch::Tensor& wav) const;
  torch::Tensor Embed(const dsp::Waveform& w) const;

  const EmbeddingModelSpec& spec() const { return spec_; }
  int64_t invocations() const { return invocations_.load(); }

  // Detached copies of every parameter, for freeze checks.
  virtual NamedTensors Parameters() const = 0;
  // Moves parameters to another floating dtype (double for gradient checks).
  virtual void To(torch::ScalarType dtype) = 0;
  virtual torch::ScalarType dtype() const = 0;

 protected:
  // [B, L] -> [B, F, D] in dtype().
  virtual torch::Tensor Forward(const torch::Tensor& wav) const = 0;

 private:
  EmbeddingModelSpec spec_;
  mutable std::atomic<int64_t> invocations_{0};
};

// HuBERT-style network (conv feature extractor, feature projection, conv
// positional embedding, post-norm transformer) with seeded random weights.
// Output frames follow the conv stack: 49 frames per second of 16 kHz audio
// for the default strides.
std::unique_ptr<SpeechEmbedder> MakeBuiltinEmbedder(const EmbeddingModelSpec& spec);

// Loads a traced TorchScript module mapping [B, L] to the selected hidden
// state [B, F, D] (see tools/export_embedder.py).
std::unique_ptr<SpeechEmbedder> LoadTorchScriptEmbedder(const EmbeddingModelSpec& spec,
                                                        const std::string& path);

}  // namespace tle::supervision

#endif  // TLE_SUPERVISION_EMBEDDER_H_
