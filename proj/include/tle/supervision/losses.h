// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_SUPERVISION_LOSSES_H_
#define TLE_SUPERVISION_LOSSES_H_

#include <optional>

#include <torch/torch.h>

#include "tle/dsp/si_snr.h"
#include "tle/supervision/embedder.h"

namespace tle::supervision {

inline constexpr double kMaeFloor = 1e-8;

struct LossWeights {
  double beta = 0.0;  // weight of the embedding term, >= 0
};

// 10 log10(max(mean |e_t - e_e|, floor)), the mean running over every frame
// and feature. Sequences are truncated to the shorter frame count first.
// Accepts [F, D] or [B, F, D]; returns [] or [B].
torch::Tensor MaeLoss(const torch::Tensor& e_target, const torch::Tensor& e_estimate,
                      double floor = kMaeFloor);

struct LossTerms {
  torch::Tensor total;       // per row
  torch::Tensor si_snr_loss;  // per row
  std::optional<torch::Tensor> mae;  // per row; empty when beta == 0
};

// si_snr_loss + beta * mae_loss(h(target), h(estimate)). With beta == 0 the
// embedder is never called and `total` is the SI-SNR loss tensor itself.
LossTerms CombinedLoss(const torch::Tensor& target, const torch::Tensor& estimate,
                       const LossWeights& weights, const SpeechEmbedder* embedder,
                       const dsp::SiSnrConfig& si_cfg = {});

}  // namespace tle::supervision

#endif  // TLE_SUPERVISION_LOSSES_H_
