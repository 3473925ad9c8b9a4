// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/dsp/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "tle/util/error.h"

namespace tle::dsp {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

void PutU32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void PutU16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

int16_t ToPcm16(double v) {
  const double scaled = std::round(v * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

double QuantizePcm16(double v) { return ToPcm16(v) / 32768.0; }

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open wav file ", path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    Fail(path, " is not a RIFF/WAVE file");
  }
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t len = ReadU32(chunk + 4);
    const std::size_t avail = std::min<std::size_t>(len, bytes.size() - pos - 8);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && avail >= 16) {
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26) format = ReadU16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = avail;
    }
    pos += 8 + len + (len & 1);
  }
  if (format == 0 || data == nullptr) Fail(path, ": missing fmt or data chunk");
  if (channels != 1) Fail(path, ": expected mono audio, found ", channels, " channels");

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  const std::size_t width = bits / 8;
  if (width == 0) Fail(path, ": invalid bit depth ", bits);
  const std::size_t n = data_len / width;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const uint8_t* p = data + i * width;
    if (format == kFormatPcm && bits == 16) {
      w.samples[i] = static_cast<int16_t>(ReadU16(p)) / 32768.0;
    } else if (format == kFormatPcm && bits == 24) {
      int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      w.samples[i] = v / 8388608.0;
    } else if (format == kFormatPcm && bits == 32) {
      w.samples[i] = static_cast<int32_t>(ReadU32(p)) / 2147483648.0;
    } else if (format == kFormatFloat && bits == 32) {
      float f;
      uint32_t u = ReadU32(p);
      std::memcpy(&f, &u, sizeof(f));
      w.samples[i] = f;
    } else {
      Fail(path, ": unsupported wav encoding (format ", format, ", ", bits, " bits)");
    }
  }
  return w;
}

void WriteWav(const std::filesystem::path& path, const Waveform& w) {
  if (w.sample_rate <= 0) Fail("write_wav: invalid sample rate");
  const uint32_t data_len = static_cast<uint32_t>(w.size() * 2);
  std::vector<uint8_t> b;
  b.reserve(44 + data_len);
  for (char c : std::string("RIFF")) b.push_back(c);
  PutU32(b, 36 + data_len);
  for (char c : std::string("WAVEfmt ")) b.push_back(c);
  PutU32(b, 16);
  PutU16(b, kFormatPcm);
  PutU16(b, 1);
  PutU32(b, static_cast<uint32_t>(w.sample_rate));
  PutU32(b, static_cast<uint32_t>(w.sample_rate) * 2);
  PutU16(b, 2);
  PutU16(b, 16);
  for (char c : std::string("data")) b.push_back(c);
  PutU32(b, data_len);
  for (double v : w.samples) PutU16(b, static_cast<uint16_t>(ToPcm16(v)));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail("cannot open ", path, " for writing");
  os.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!os) Fail("write failed for ", path);
}

}  // namespace tle::dsp
