// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/data/builder.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "tle/data/mixture.h"
#include "tle/dsp/wav_io.h"
#include "tle/util/error.h"
#include "tle/util/rng.h"

namespace tle::data {

namespace {

using Pair = std::pair<const CorpusEntry*, const CorpusEntry*>;

// One pass over both pools without replacement. A partner from the same
// speaker is swapped for the next usable candidate.
std::vector<Pair> PairOnce(std::vector<const CorpusEntry*> a, std::vector<const CorpusEntry*> b, uint64_t seed) {
  Rng rng(seed);
  rng.Shuffle(a);
  rng.Shuffle(b);
  std::vector<Pair> pairs;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size() && j < b.size(); ++i) {
    std::size_t k = j;
    while (k < b.size() && b[k]->speaker_id == a[i]->speaker_id) ++k;
    if (k == b.size()) continue;
    std::swap(b[j], b[k]);
    pairs.emplace_back(a[i], b[j]);
    ++j;
  }
  return pairs;
}

std::vector<Pair> DrawPairs(const SplitAssignment& splits, const DatasetSpec& spec, Split split) {
  std::array<std::vector<const CorpusEntry*>, 2> pools;
  for (const auto& e : splits.of(split)) {
    for (int l = 0; l < 2; ++l) {
      if (e.language == spec.languages[l]) pools[l].push_back(&e);
    }
  }
  const std::string name = SplitName(split);
  for (int l = 0; l < 2; ++l) {
    if (pools[l].empty()) Fail("split ", name, " has no '", spec.languages[l], "' utterances");
  }
  const auto wanted = static_cast<std::size_t>(spec.count(split));
  std::vector<Pair> pairs = PairOnce(pools[0], pools[1], DeriveSeed(spec.seed, "pairs_" + name, 0));
  if (pairs.size() >= wanted) {
    pairs.resize(wanted);
    return pairs;
  }
  if (split != Split::kTrain || pairs.empty()) {
    Fail("pairing pool exhausted for split ", name, ": requested ", wanted, " mixtures, only ", pairs.size(),
         " achievable without reusing sources");
  }
  for (uint64_t round = 1; pairs.size() < wanted; ++round) {
    for (const Pair& p : PairOnce(pools[0], pools[1], DeriveSeed(spec.seed, "pairs_" + name, round))) {
      if (pairs.size() == wanted) break;
      pairs.push_back(p);
    }
  }
  return pairs;
}

std::string MixtureId(Split split, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%06zu", index);
  return SplitName(split) + buf;
}

}  // namespace

BuildResult BuildDataset(const DatasetSpec& spec, const std::vector<CorpusEntry>& corpus,
                         const std::filesystem::path& out_dir) {
  spec.Validate();
  std::vector<CorpusEntry> usable;
  for (const auto& lang : spec.languages) {
    std::vector<CorpusEntry> of_lang;
    for (const auto& e : corpus) {
      if (e.language == lang) of_lang.push_back(e);
    }
    if (of_lang.empty()) Fail("corpus has no utterances for language '", lang, "'");
    for (auto& e : FilterCorpus(of_lang, spec.min_duration_s)) usable.push_back(std::move(e));
  }
  const SplitAssignment splits = AssignSplits(usable, spec);

  BuildResult result;

  for (Split split : kAllSplits) {
    const std::vector<Pair> pairs = DrawPairs(splits, spec, split);
    auto& manifest = result.manifests[static_cast<int>(split)];
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const uint64_t seed = DeriveSeed(spec.seed, SplitName(split), k);
      const CorpusEntry& a = *pairs[k].first;
      const CorpusEntry& b = *pairs[k].second;
      MixtureSample m = PairAndMix(a, dsp::ReadWav(a.path), b, dsp::ReadWav(b.path), spec, seed);
      if (split == Split::kTrain) m = CropTrainSegment(m, spec.train_crop_s, spec, DeriveSeed(seed, "crop"));

      ManifestEntry row;
      row.mixture_id = MixtureId(split, k);
      row.split = split;
      row.seed = seed;
      row.crop_offset_s = static_cast<double>(m.crop_offset) / dsp::kModelRate;
      row.crop_length_s = m.mixture.duration();
      const std::filesystem::path rel = std::filesystem::path("audio") / SplitName(split) / row.mixture_id;
      std::filesystem::create_directories(out_dir / rel);
      row.mixture_wav = (rel / "mix.wav").string();
      dsp::WriteWav(out_dir / row.mixture_wav, m.mixture);
      for (std::size_t i = 0; i < m.info.size(); ++i) {
        const SourceInfo& info = m.info[i];
        ManifestSource src{info.language, info.path, info.speaker_id, info.gain, info.lufs,
                           (rel / ("src_" + info.language + ".wav")).string()};
        dsp::WriteWav(out_dir / src.wav, m.sources[i]);
        row.sources.push_back(std::move(src));
      }
      manifest.push_back(std::move(row));
    }
    WriteManifestCsv(out_dir / (SplitName(split) + ".csv"), manifest);
  }

  result.stats = DatasetStats(spec, result.manifests);
  std::ofstream os(out_dir / "stats.json", std::ios::trunc);
  if (!os) Fail("cannot write ", out_dir / "stats.json");
  os << result.stats.dump(2) << '\n';
  return result;
}

nlohmann::json DatasetStats(const DatasetSpec& spec, const std::array<std::vector<ManifestEntry>, 3>& manifests) {
  nlohmann::json splits = nlohmann::json::object();
  for (Split split : kAllSplits) {
    const auto& rows = manifests[static_cast<int>(split)];
    double seconds = 0.0;
    std::map<std::string, std::set<std::string>> speakers;
    for (const auto& row : rows) {
      seconds += row.crop_length_s;
      for (const auto& s : row.sources) speakers[s.language].insert(s.speaker_id);
    }
    nlohmann::json unique = nlohmann::json::object();
    for (const auto& lang : spec.languages) unique[lang] = speakers[lang].size();
    splits[SplitName(split)] = {{"samples", rows.size()}, {"hours", seconds / 3600.0}, {"speakers", unique}};
  }
  return {{"languages", spec.languages}, {"seed", spec.seed}, {"splits", splits}};
}

}  // namespace tle::data
