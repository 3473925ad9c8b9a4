// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_DSP_SI_SNR_H_
#define TLE_DSP_SI_SNR_H_

#include <span>

#include <torch/torch.h>

#include "tle/dsp/waveform.h"

namespace tle::dsp {

struct SiSnrConfig {
  // Floor for the projection denominator and the error energy. Acts as a
  // clamp, so values away from the floor are untouched.
  double eps = 1e-8;
};

// Scale-invariant SNR in dB, no mean removal:
//   alpha = <est, tgt> / max(|tgt|^2, eps)
//   si_snr = 10 log10(|alpha tgt|^2 / max(|alpha tgt - est|^2, eps))
double SiSnr(std::span<const double> target, std::span<const double> estimate,
             const SiSnrConfig& cfg = {});
double SiSnr(const Waveform& target, const Waveform& estimate,
             const SiSnrConfig& cfg = {});

// Differentiable negative SI-SNR. Accepts [L] or [B, L] tensors and returns
// a per-row loss ([] or [B]). Rows whose target is all zero are rejected.
torch::Tensor SiSnrLoss(const torch::Tensor& target, const torch::Tensor& estimate,
                        const SiSnrConfig& cfg = {});

}  // namespace tle::dsp

#endif  // TLE_DSP_SI_SNR_H_
