// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/eval/pesq.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "tle/util/error.h"

namespace tle::eval {

namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    for (int attempt = 0; attempt < 16; ++attempt) {
      path_ = fs::temp_directory_path() / ("tle-pesq-" + std::to_string(rd()));
      if (fs::create_directory(path_)) return;
    }
    Fail("cannot create a temporary directory for PESQ scoring");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void WriteRaw(const fs::path& path, const dsp::Waveform& w) {
  std::ofstream os(path, std::ios::binary);
  os.write(reinterpret_cast<const char*>(w.samples.data()),
           static_cast<std::streamsize>(w.samples.size() * sizeof(double)));
  if (!os) Fail("cannot write ", path);
}

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

PesqProvider::PesqProvider(std::string command)
    : command_(command.empty() ? DefaultCommand() : std::move(command)) {}

std::string PesqProvider::DefaultCommand() {
  if (const char* env = std::getenv("TLE_PESQ_COMMAND"); env && *env) return env;
  return "python3 " + ShellQuote((fs::path(TLE_SOURCE_DIR) / "tools" / "pesq_provider.py").string());
}

bool PesqProvider::Available() const {
  if (!available_) available_ = std::system((command_ + " --check > /dev/null 2>&1").c_str()) == 0;
  return *available_;
}

std::vector<std::optional<double>> PesqProvider::Score(const std::vector<dsp::Waveform>& references,
                                                       const std::vector<dsp::Waveform>& degraded) const {
  TLE_CHECK(references.size() == degraded.size(), "pesq: ", references.size(), " references but ",
            degraded.size(), " degraded signals");
  std::vector<std::optional<double>> scores(references.size());
  if (references.empty()) return scores;
  TempDir tmp;
  const fs::path list = tmp.path() / "pairs.tsv";
  {
    std::ofstream os(list);
    for (std::size_t i = 0; i < references.size(); ++i) {
      if (references[i].sample_rate != dsp::kModelRate || degraded[i].sample_rate != dsp::kModelRate) {
        Fail("pesq: wide-band scoring needs 16 kHz signals");
      }
      const fs::path ref = tmp.path() / ("ref" + std::to_string(i) + ".f64");
      const fs::path deg = tmp.path() / ("deg" + std::to_string(i) + ".f64");
      WriteRaw(ref, references[i]);
      WriteRaw(deg, degraded[i]);
      os << i << '\t' << ref.string() << '\t' << deg.string() << '\n';
    }
  }
  const fs::path out = tmp.path() / "scores.tsv";
  const fs::path err = tmp.path() / "stderr.txt";
  const std::string cmd = command_ + " < " + ShellQuote(list.string()) + " > " + ShellQuote(out.string()) + " 2> " +
                          ShellQuote(err.string());
  if (std::system(cmd.c_str()) != 0) {
    std::ifstream es(err);
    std::stringstream msg;
    msg << es.rdbuf();
    Fail("pesq provider '", command_, "' failed: ", msg.str());
  }
  std::ifstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::size_t id = 0;
    std::string value;
    if (!(ls >> id >> value) || id >= scores.size()) Fail("pesq provider printed an unexpected line: ", line);
    const double v = std::strtod(value.c_str(), nullptr);
    if (std::isfinite(v)) scores[id] = v;
  }
  return scores;
}

}  // namespace tle::eval
