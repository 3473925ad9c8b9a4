// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_EVAL_PESQ_H_
#define TLE_EVAL_PESQ_H_

#include <optional>
#include <string>
#include <vector>

#include "tle/dsp/waveform.h"

namespace tle::eval {

// Wide-band P.862.2 scores from an external program. The program reads a
// tab-separated list of "id, reference path, degraded path" lines on stdin,
// where each path holds raw little-endian float64 samples at 16 kHz, and
// prints "id<TAB>score" per line ("nan" when a pair cannot be scored).
// `--check` must exit 0 when the backend is usable.
class PesqProvider {
 public:
  // Empty command selects tools/pesq_provider.py under the source tree.
  explicit PesqProvider(std::string command = "");

  static std::string DefaultCommand();

  bool Available() const;
  const std::string& command() const { return command_; }

  // One score per pair; empty optionals mark pairs the provider rejected.
  // Throws when the provider itself cannot be run.
  std::vector<std::optional<double>> Score(const std::vector<dsp::Waveform>& references,
                                           const std::vector<dsp::Waveform>& degraded) const;

 private:
  std::string command_;
  mutable std::optional<bool> available_;
};

}  // namespace tle::eval

#endif  // TLE_EVAL_PESQ_H_
