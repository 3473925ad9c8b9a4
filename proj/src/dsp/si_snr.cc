// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/dsp/si_snr.h"

#include <algorithm>
#include <cmath>

#include "tle/util/error.h"

namespace tle::dsp {

double SiSnr(std::span<const double> target, std::span<const double> estimate,
             const SiSnrConfig& cfg) {
  if (target.size() != estimate.size()) {
    Fail("si_snr: length mismatch (target ", target.size(), ", estimate ",
         estimate.size(), ")");
  }
  if (cfg.eps <= 0.0) Fail("si_snr: eps must be positive");
  double dot = 0.0, target_energy = 0.0;
  for (std::size_t n = 0; n < target.size(); ++n) {
    dot += estimate[n] * target[n];
    target_energy += target[n] * target[n];
  }
  if (target_energy == 0.0) Fail("si_snr: target is all zeros, metric undefined");
  const double alpha = dot / std::max(target_energy, cfg.eps);
  double signal = 0.0, error = 0.0;
  for (std::size_t n = 0; n < target.size(); ++n) {
    const double s = alpha * target[n];
    const double e = s - estimate[n];
    signal += s * s;
    error += e * e;
  }
  return 10.0 * std::log10(signal / std::max(error, cfg.eps));
}

double SiSnr(const Waveform& target, const Waveform& estimate, const SiSnrConfig& cfg) {
  if (target.sample_rate != estimate.sample_rate) {
    Fail("si_snr: sample rate mismatch (", target.sample_rate, " vs ",
         estimate.sample_rate, ")");
  }
  return SiSnr(target.view(), estimate.view(), cfg);
}

torch::Tensor SiSnrLoss(const torch::Tensor& target, const torch::Tensor& estimate,
                        const SiSnrConfig& cfg) {
  if (target.sizes() != estimate.sizes()) {
    Fail("si_snr_loss: shape mismatch ", target.sizes(), " vs ", estimate.sizes());
  }
  if (target.dim() != 1 && target.dim() != 2) {
    Fail("si_snr_loss: expected [L] or [B, L], got ", target.sizes());
  }
  const torch::Tensor target_energy = target.pow(2).sum(-1, /*keepdim=*/true);
  if ((target_energy == 0).any().item<bool>()) {
    Fail("si_snr_loss: target is all zeros, metric undefined");
  }
  const torch::Tensor dot = (estimate * target).sum(-1, true);
  const torch::Tensor alpha = dot / target_energy.clamp_min(cfg.eps);
  const torch::Tensor projected = alpha * target;
  const torch::Tensor signal = projected.pow(2).sum(-1);
  const torch::Tensor error = (projected - estimate).pow(2).sum(-1);
  return -10.0 * torch::log10(signal / error.clamp_min(cfg.eps));
}

}  // namespace tle::dsp
