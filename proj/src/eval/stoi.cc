// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/eval/stoi.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <torch/torch.h>

#include "tle/dsp/resample.h"
#include "tle/util/error.h"

namespace tle::eval {

namespace {

constexpr int kFrame = 256;
constexpr int kFft = 512;
constexpr int kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr int kSegment = 30;
constexpr double kBeta = -15.0;
constexpr double kDynRange = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> Hanning(int n) {
  // Interior of an (n + 2)-point Hann window, which excludes the zero ends.
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
  return w;
}

torch::Tensor OctaveBandMatrix() {
  const int bins = kFft / 2 + 1;
  std::vector<double> f(bins);
  for (int i = 0; i < bins; ++i) f[i] = static_cast<double>(kStoiRate) * i / kFft;
  auto nearest = [&](double target) {
    int best = 0;
    for (int i = 1; i < bins; ++i) {
      if (std::pow(f[i] - target, 2) < std::pow(f[best] - target, 2)) best = i;
    }
    return best;
  };
  torch::Tensor obm = torch::zeros({kBands, bins}, torch::kFloat64);
  auto acc = obm.accessor<double, 2>();
  for (int k = 0; k < kBands; ++k) {
    const int lo = nearest(kMinFreq * std::pow(2.0, (2.0 * k - 1.0) / 6.0));
    const int hi = nearest(kMinFreq * std::pow(2.0, (2.0 * k + 1.0) / 6.0));
    for (int i = lo; i < hi; ++i) acc[k][i] = 1.0;
  }
  return obm;
}

// Windowed frames starting at 0, hop, ... while start < len - frame.
torch::Tensor Frames(const std::vector<double>& x, int hop) {
  const auto w = Hanning(kFrame);
  std::vector<double> data;
  const long len = static_cast<long>(x.size());
  long count = 0;
  for (long start = 0; start < len - kFrame; start += hop, ++count) {
    for (int i = 0; i < kFrame; ++i) data.push_back(w[i] * x[start + i]);
  }
  return torch::tensor(data, torch::kFloat64).view({count, kFrame});
}

std::vector<double> OverlapAdd(const torch::Tensor& frames, int hop) {
  const long n = frames.size(0);
  std::vector<double> out(n == 0 ? 0 : (n - 1) * hop + kFrame, 0.0);
  auto acc = frames.accessor<double, 2>();
  for (long f = 0; f < n; ++f) {
    for (int i = 0; i < kFrame; ++i) out[f * hop + i] += acc[f][i];
  }
  return out;
}

torch::Tensor BandEnvelopes(const std::vector<double>& x, const torch::Tensor& obm) {
  torch::Tensor spec = torch::fft::rfft(Frames(x, kFrame / 2), kFft, -1);
  torch::Tensor power = spec.abs().square().transpose(0, 1);  // [bins, frames]
  return torch::sqrt(torch::matmul(obm, power));               // [bands, frames]
}

std::vector<double> To10k(std::span<const double> x, int rate) {
  if (rate == kStoiRate) return {x.begin(), x.end()};
  const int g = std::gcd(kStoiRate, rate);
  const int p = kStoiRate / g, q = rate / g;
  const std::vector<double> h = StoiResampleFilter(p, q);
  return dsp::ResamplePoly(x, p, q, h, dsp::PadMode::kZero);
}

}  // namespace

std::vector<double> StoiResampleFilter(int p, int q) {
  const double rejection_db = 60.0;
  const double cutoff = 1.0 / (2.0 * std::max(p, q));
  const double roll_off = cutoff / 10.0;
  const long half = static_cast<long>(std::ceil((rejection_db - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const std::vector<double> win = dsp::KaiserWindow(static_cast<int>(2 * half + 1), beta);
  std::vector<double> h(2 * half + 1);
  for (long t = -half; t <= half; ++t) {
    const double arg = 2.0 * cutoff * t;
    const double sinc = t == 0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    h[t + half] = win[t + half] * 2.0 * p * cutoff * sinc;
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= sum;
  return h;
}

double Stoi(std::span<const double> target, std::span<const double> estimate, int rate) {
  if (target.size() != estimate.size()) {
    Fail("stoi: target and estimate lengths differ (", target.size(), " vs ", estimate.size(), ")");
  }
  if (rate <= 0) Fail("stoi: sample rate must be positive");
  const std::vector<double> x10 = To10k(target, rate);
  const std::vector<double> y10 = To10k(estimate, rate);
  const int hop = kFrame / 2;

  torch::Tensor xf = Frames(x10, hop);
  torch::Tensor yf = Frames(y10, hop);
  if (xf.size(0) == 0) Fail("stoi: input of ", target.size(), " samples is shorter than one analysis frame");
  torch::Tensor energy = 20.0 * torch::log10(torch::linalg_vector_norm(xf, 2, {1}) + kEps);
  torch::Tensor keep = (energy.max() - kDynRange - energy) < 0;
  const std::vector<double> x = OverlapAdd(xf.index({keep}).contiguous(), hop);
  const std::vector<double> y = OverlapAdd(yf.index({keep}).contiguous(), hop);

  static const torch::Tensor obm = OctaveBandMatrix();
  torch::Tensor xt = BandEnvelopes(x, obm);
  torch::Tensor yt = BandEnvelopes(y, obm);
  if (xt.size(1) < kSegment) {
    Fail("stoi: only ", xt.size(1), " non-silent frames, need at least ", kSegment,
         " (about 0.4 s of active speech)");
  }
  // [bands, segments, N]
  torch::Tensor xs = xt.unfold(1, kSegment, 1);
  torch::Tensor ys = yt.unfold(1, kSegment, 1);
  auto norm = [](const torch::Tensor& t) { return torch::linalg_vector_norm(t, 2, {2}, true); };
  torch::Tensor yn = ys * (norm(xs) / (norm(ys) + kEps));
  const double clip = std::pow(10.0, -kBeta / 20.0);
  torch::Tensor yp = torch::minimum(yn, xs * (1.0 + clip));
  yp = yp - yp.mean({2}, true);
  xs = xs - xs.mean({2}, true);
  yp = yp / (norm(yp) + kEps);
  xs = xs / (norm(xs) + kEps);
  const double segments = static_cast<double>(xs.size(1));
  return (yp * xs).sum().item<double>() / (segments * kBands);
}

double Stoi(const dsp::Waveform& target, const dsp::Waveform& estimate) {
  if (target.sample_rate != estimate.sample_rate) Fail("stoi: sample rates differ");
  return Stoi(target.view(), estimate.view(), target.sample_rate);
}

}  // namespace tle::eval
