// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/model/config.h"

#include "tle/util/error.h"
#include "tle/util/json_fields.h"

namespace tle::model {

void ModelConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) Fail("model config: ", name, " must be >= 1, got ", v);
  };
  positive(enc_kernel, "enc_kernel");
  positive(enc_stride, "enc_stride");
  positive(feat_dim, "feat_dim");
  positive(chunk_len, "chunk_len");
  positive(chunk_hop, "chunk_hop");
  positive(n_heads, "n_heads");
  positive(n_intra_layers, "n_intra_layers");
  positive(n_inter_layers, "n_inter_layers");
  positive(n_dual_blocks, "n_dual_blocks");
  positive(ff_dim, "ff_dim");
  if (chunk_hop > chunk_len) {
    Fail("model config: chunk_hop (", chunk_hop, ") exceeds chunk_len (", chunk_len, ")");
  }
  if (feat_dim % n_heads != 0) {
    Fail("model config: feat_dim (", feat_dim, ") not divisible by n_heads (", n_heads, ")");
  }
}

nlohmann::json ModelConfig::ToJson() const {
  return {{"enc_kernel", enc_kernel},         {"enc_stride", enc_stride},
          {"feat_dim", feat_dim},             {"chunk_len", chunk_len},
          {"chunk_hop", chunk_hop},           {"n_heads", n_heads},
          {"n_intra_layers", n_intra_layers}, {"n_inter_layers", n_inter_layers},
          {"n_dual_blocks", n_dual_blocks},   {"ff_dim", ff_dim}};
}

ModelConfig ModelConfig::FromJson(const nlohmann::json& j) {
  ModelConfig c;
  JsonReader(j, "model")
      .Field("enc_kernel", c.enc_kernel)
      .Field("enc_stride", c.enc_stride)
      .Field("feat_dim", c.feat_dim)
      .Field("chunk_len", c.chunk_len)
      .Field("chunk_hop", c.chunk_hop)
      .Field("n_heads", c.n_heads)
      .Field("n_intra_layers", c.n_intra_layers)
      .Field("n_inter_layers", c.n_inter_layers)
      .Field("n_dual_blocks", c.n_dual_blocks)
      .Field("ff_dim", c.ff_dim)
      .Finish();
  c.Validate();
  return c;
}

int64_t ModelConfig::NumFrames(int64_t samples) const {
  if (samples < enc_kernel) {
    Fail("input of ", samples, " samples is shorter than the encoder kernel; need at least ",
         enc_kernel, " samples");
  }
  return (samples - enc_kernel) / enc_stride + 1;
}

int64_t ModelConfig::NumChunks(int64_t frames) const {
  if (frames < 1) Fail("cannot segment ", frames, " frames");
  if (frames <= chunk_len) return 1;
  return (frames - chunk_len + chunk_hop - 1) / chunk_hop + 1;
}

}  // namespace tle::model
