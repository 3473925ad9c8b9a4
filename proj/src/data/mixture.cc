// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/data/mixture.h"

#include <algorithm>
#include <cmath>

#include "tle/dsp/loudness.h"
#include "tle/dsp/resample.h"
#include "tle/util/error.h"
#include "tle/util/rng.h"

namespace tle::data {

const dsp::Waveform& MixtureSample::source(const std::string& language) const {
  for (std::size_t i = 0; i < info.size(); ++i) {
    if (info[i].language == language) return sources[i];
  }
  Fail("mixture has no source for language '", language, "'");
}

MixtureSample PairAndMix(const CorpusEntry& a, const dsp::Waveform& audio_a, const CorpusEntry& b,
                         const dsp::Waveform& audio_b, const DatasetSpec& spec, uint64_t seed) {
  if (a.language == b.language) {
    Fail("pair_and_mix: both sources are language '", a.language, "'; a mixture needs two languages");
  }
  if (a.speaker_id == b.speaker_id) Fail("pair_and_mix: both sources come from speaker ", a.speaker_id);

  Rng rng(seed);
  const std::array<const CorpusEntry*, 2> entries = {&a, &b};
  std::array<dsp::Waveform, 2> raw = {dsp::Resample(audio_a, dsp::kModelRate),
                                      dsp::Resample(audio_b, dsp::kModelRate)};
  MixtureSample m;
  m.seed = seed;
  const std::size_t length = std::max(raw[0].size(), raw[1].size());
  std::array<double, 2> gains{};
  for (int i = 0; i < 2; ++i) {
    SourceInfo info;
    info.language = entries[i]->language;
    info.path = entries[i]->path;
    info.speaker_id = entries[i]->speaker_id;
    info.lufs = rng.Uniform(spec.lufs_min, spec.lufs_max);
    info.num_samples = raw[i].size();
    gains[i] = dsp::LoudnessGain(raw[i], info.lufs);
    m.info.push_back(info);
    raw[i] = dsp::PadOrCrop(raw[i], length);
  }

  auto combine = [&] {
    std::vector<double> mix(length);
    for (std::size_t n = 0; n < length; ++n) mix[n] = gains[0] * raw[0].samples[n] + gains[1] * raw[1].samples[n];
    return mix;
  };
  std::vector<double> mix = combine();
  double peak = dsp::PeakAbs(mix);
  for (int i = 0; i < 2; ++i) peak = std::max(peak, gains[i] * dsp::PeakAbs(raw[i].samples));
  if (peak > spec.peak_limit) {
    const double scale = spec.peak_limit / peak;
    for (double& g : gains) g *= scale;
    mix = combine();
  }

  m.mixture = dsp::Waveform(std::move(mix), dsp::kModelRate);
  for (int i = 0; i < 2; ++i) {
    m.info[i].gain = gains[i];
    m.sources.push_back(dsp::Scaled(raw[i], gains[i]));
    m.info[i].full_rms =
        dsp::Rms(std::span<const double>(m.sources[i].samples).first(m.info[i].num_samples));
  }
  return m;
}

double MinActivityRatio(const MixtureSample& m, std::size_t offset, std::size_t length) {
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.sources.size(); ++i) {
    const double rms = dsp::Rms(std::span<const double>(m.sources[i].samples).subspan(offset, length));
    const double full = m.info[i].full_rms;
    ratio = std::min(ratio, full > 0.0 ? rms / full : 0.0);
  }
  return ratio;
}

namespace {

MixtureSample CropAt(const MixtureSample& m, std::size_t offset, std::size_t length) {
  MixtureSample out;
  out.info = m.info;
  out.seed = m.seed;
  out.crop_offset = m.crop_offset + offset;
  auto cut = [&](const dsp::Waveform& w) {
    return dsp::Waveform(std::vector<double>(w.samples.begin() + offset, w.samples.begin() + offset + length),
                         w.sample_rate);
  };
  out.mixture = cut(m.mixture);
  for (const auto& s : m.sources) out.sources.push_back(cut(s));
  return out;
}

}  // namespace

MixtureSample CropTrainSegment(const MixtureSample& m, double length_s, const DatasetSpec& spec, uint64_t seed) {
  const auto length = static_cast<std::size_t>(std::llround(length_s * m.mixture.sample_rate));
  if (length == 0) Fail("crop_train_segment: crop length must be positive");
  if (m.mixture.size() < length) {
    Fail("crop_train_segment: mixture of ", m.mixture.duration(), " s is shorter than the ", length_s,
         " s crop");
  }
  const std::size_t span = m.mixture.size() - length;
  Rng rng(seed);
  for (int attempt = 0; attempt < spec.crop_retries; ++attempt) {
    const std::size_t offset = rng.Index(span + 1);
    if (MinActivityRatio(m, offset, length) >= spec.activity_ratio) return CropAt(m, offset, length);
  }
  const std::size_t hop = std::max<std::size_t>(1, m.mixture.sample_rate / 10);
  std::size_t best = 0;
  double best_ratio = -1.0;
  for (std::size_t offset = 0; offset <= span; offset += hop) {
    const double r = MinActivityRatio(m, offset, length);
    if (r > best_ratio) {
      best_ratio = r;
      best = offset;
    }
  }
  return CropAt(m, best, length);
}

}  // namespace tle::data
