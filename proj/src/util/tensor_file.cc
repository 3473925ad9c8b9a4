// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tle/util/tensor_file.h"

#include <bit>
#include <cstring>
#include <fstream>

#include "tle/util/error.h"

namespace tle {

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor files are little-endian only");

std::string DtypeName(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "f32";
    case torch::kFloat64: return "f64";
    case torch::kInt64: return "i64";
    default: Fail("unsupported tensor dtype: ", c10::toString(t));
  }
}

torch::ScalarType DtypeFromName(const std::string& name) {
  if (name == "f32") return torch::kFloat32;
  if (name == "f64") return torch::kFloat64;
  if (name == "i64") return torch::kInt64;
  Fail("unknown dtype tag in tensor file: ", name);
}

}  // namespace

const torch::Tensor& TensorFile::Get(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  Fail("tensor '", name, "' not found in file");
}

bool TensorFile::Has(const std::string& name) const {
  for (const auto& entry : tensors) {
    if (entry.first == name) return true;
  }
  return false;
}

void WriteTensorFile(const std::filesystem::path& path,
                     const nlohmann::json& meta, const NamedTensors& tensors) {
  nlohmann::json index = nlohmann::json::array();
  std::vector<torch::Tensor> payload;
  uint64_t offset = 0;
  for (const auto& [name, tensor] : tensors) {
    torch::Tensor t = tensor.detach().to(torch::kCPU).contiguous();
    uint64_t nbytes = t.numel() * t.element_size();
    index.push_back({{"name", name},
                     {"dtype", DtypeName(t.scalar_type())},
                     {"shape", t.sizes().vec()},
                     {"offset", offset},
                     {"nbytes", nbytes}});
    offset += nbytes;
    payload.push_back(std::move(t));
  }
  nlohmann::json header = {{"meta", meta}, {"tensors", index}};
  std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) Fail("cannot open ", tmp, " for writing");
    uint32_t version = TensorFile::kVersion;
    uint64_t header_len = text.size();
    os.write(TensorFile::kMagic, sizeof(TensorFile::kMagic));
    os.write(reinterpret_cast<const char*>(&version), sizeof(version));
    os.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& t : payload) {
      os.write(static_cast<const char*>(t.data_ptr()),
               static_cast<std::streamsize>(t.numel() * t.element_size()));
    }
    if (!os) Fail("write failed for ", tmp);
  }
  std::filesystem::rename(tmp, path);
}

TensorFile ReadTensorFile(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open tensor file ", path);
  char magic[8];
  uint32_t version = 0;
  uint64_t header_len = 0;
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, TensorFile::kMagic, sizeof(magic)) != 0) {
    Fail(path, " is not a tensor file (bad magic)");
  }
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != TensorFile::kVersion) {
    Fail(path, ": unsupported tensor file version ", version);
  }
  is.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string text(header_len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!is) Fail(path, ": truncated header");
  nlohmann::json header = nlohmann::json::parse(text);

  const std::streamoff base = is.tellg();
  TensorFile file;
  file.meta = header.at("meta");
  for (const auto& entry : header.at("tensors")) {
    auto shape = entry.at("shape").get<std::vector<int64_t>>();
    auto dtype = DtypeFromName(entry.at("dtype").get<std::string>());
    torch::Tensor t = torch::empty(shape, torch::TensorOptions().dtype(dtype));
    uint64_t nbytes = entry.at("nbytes").get<uint64_t>();
    if (nbytes != static_cast<uint64_t>(t.numel() * t.element_size())) {
      Fail(path, ": size mismatch for tensor ", entry.at("name"));
    }
    is.seekg(base + static_cast<std::streamoff>(entry.at("offset").get<uint64_t>()));
    is.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(nbytes));
    if (!is) Fail(path, ": truncated payload for tensor ", entry.at("name"));
    file.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  return file;
}

}  // namespace tle
