// Copyright 2026 The TLE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TLE_UTIL_TENSOR_FILE_H_
#define TLE_UTIL_TENSOR_FILE_H_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace tle {

using NamedTensors = std::vector<std::pair<std::string, torch::Tensor>>;

// Versioned binary container: an 8-byte magic, a format version, a JSON
// header (free-form "meta" plus a tensor index) and a raw little-endian
// payload. Checkpoints and embedder weights both use it.
struct TensorFile {
  static constexpr char kMagic[8] = {'T', 'L', 'E', 'T', 'N', 'S', 'R', '\0'};
  static constexpr uint32_t kVersion = 1;

  nlohmann::json meta;
  NamedTensors tensors;

  const torch::Tensor& Get(const std::string& name) const;
  bool Has(const std::string& name) const;
};

// Written to a sibling temporary first and renamed into place, so a crash
// mid-write never clobbers an existing file.
void WriteTensorFile(const std::filesystem::path& path,
                     const nlohmann::json& meta, const NamedTensors& tensors);

TensorFile ReadTensorFile(const std::filesystem::path& path);

}  // namespace tle

#endif  // TLE_UTIL_TENSOR_FILE_H_
