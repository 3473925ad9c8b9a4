// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/supervision/losses.h"

#include "tle/util/error.h"

namespace tle::supervision {

torch::Tensor MaeLoss(const torch::Tensor& e_target, const torch::Tensor& e_estimate, double floor) {
  if (e_target.dim() != e_estimate.dim() || (e_target.dim() != 2 && e_target.dim() != 3)) {
    Fail("mae_loss expects matching [F, D] or [B, F, D] embeddings, got ", e_target.sizes(), " and ",
         e_estimate.sizes());
  }
  if (e_target.size(-1) != e_estimate.size(-1)) {
    Fail("mae_loss: feature dim mismatch (", e_target.size(-1), " vs ", e_estimate.size(-1), ")");
  }
  if (e_target.dim() == 3 && e_target.size(0) != e_estimate.size(0)) {
    Fail("mae_loss: batch size mismatch");
  }
  const int64_t frames = std::min(e_target.size(-2), e_estimate.size(-2));
  if (frames < 1) Fail("mae_loss: empty embedding sequence");
  torch::Tensor diff = (e_target.narrow(-2, 0, frames) - e_estimate.narrow(-2, 0, frames)).abs();
  return 10.0 * torch::log10(diff.mean({-2, -1}).clamp_min(floor));
}

LossTerms CombinedLoss(const torch::Tensor& target, const torch::Tensor& estimate,
                       const LossWeights& weights, const SpeechEmbedder* embedder,
                       const dsp::SiSnrConfig& si_cfg) {
  if (weights.beta < 0.0) Fail("combined_loss: beta must be >= 0, got ", weights.beta);
  LossTerms terms;
  terms.si_snr_loss = dsp::SiSnrLoss(target, estimate, si_cfg);
  if (weights.beta == 0.0) {
    terms.total = terms.si_snr_loss;
    return terms;
  }
  if (embedder == nullptr) Fail("combined_loss: beta > 0 requires an embedding model");
  torch::Tensor e_target;
  {
    torch::NoGradGuard no_grad;
    e_target = embedder->Embed(target);
  }
  torch::Tensor e_estimate = embedder->Embed(estimate);
  terms.mae = MaeLoss(e_target, e_estimate);
  terms.total = terms.si_snr_loss + weights.beta * *terms.mae;
  return terms;
}

}  // namespace tle::supervision
