// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/dsp/resample.h"

#include <cmath>
#include <numeric>
#include <numbers>

#include "tle/util/error.h"

namespace tle::dsp {

namespace {

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> KaiserWindow(int length, double beta) {
  if (length < 1) Fail("kaiser window length must be >= 1");
  if (length == 1) return {1.0};
  std::vector<double> w(length);
  const double denom = std::cyl_bessel_i(0.0, beta);
  for (int n = 0; n < length; ++n) {
    const double r = 2.0 * n / (length - 1) - 1.0;
    w[n] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
  }
  return w;
}

std::vector<double> FirLowpass(int num_taps, double cutoff, double kaiser_beta) {
  if (cutoff <= 0.0 || cutoff > 1.0) Fail("lowpass cutoff must be in (0, 1]");
  const std::vector<double> win = KaiserWindow(num_taps, kaiser_beta);
  const double center = 0.5 * (num_taps - 1);
  std::vector<double> h(num_taps);
  for (int n = 0; n < num_taps; ++n) {
    h[n] = cutoff * Sinc(cutoff * (n - center)) * win[n];
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v /= sum;
  return h;
}

std::vector<double> ResamplePoly(std::span<const double> x, int up, int down,
                                 std::span<const double> filter, PadMode pad) {
  if (up < 1 || down < 1) Fail("resample: up and down must be >= 1");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return {x.begin(), x.end()};

  std::vector<double> h;
  long half_len = 0;
  if (filter.empty()) {
    const int max_rate = std::max(up, down);
    half_len = 10L * max_rate;
    h = FirLowpass(static_cast<int>(2 * half_len + 1), 1.0 / max_rate, 5.0);
  } else {
    h.assign(filter.begin(), filter.end());
    half_len = (static_cast<long>(h.size()) - 1) / 2;
  }
  for (double& v : h) v *= up;

  double background = 0.0;
  if (pad == PadMode::kMean && !x.empty()) {
    background = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  }

  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * up + down - 1) / down;
  const long pre_pad = down - half_len % down;
  const long pre_remove = (half_len + pre_pad) / down;
  const long taps = static_cast<long>(h.size());

  std::vector<double> y(n_out, 0.0);
  for (long k = 0; k < n_out; ++k) {
    // Position of this output on the upsampled grid, relative to h[0].
    const long t = (k + pre_remove) * down - pre_pad;
    // Need 0 <= t - n*up < taps.
    long n_lo = t - (taps - 1) <= 0 ? 0 : (t - (taps - 1) + up - 1) / up;
    long n_hi = t < 0 ? -1 : t / up;
    n_hi = std::min(n_hi, n_in - 1);
    double acc = 0.0;
    for (long n = n_lo; n <= n_hi; ++n) acc += (x[n] - background) * h[t - n * up];
    y[k] = acc + background;
  }
  return y;
}

Waveform Resample(const Waveform& w, int rate) {
  if (rate <= 0) Fail("resample: target rate must be positive, got ", rate);
  if (w.sample_rate <= 0) Fail("resample: source rate must be positive");
  if (rate == w.sample_rate) return w;
  return Waveform(ResamplePoly(w.samples, rate, w.sample_rate, {}, PadMode::kMean), rate);
}

}  // namespace tle::dsp
