#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dimasr/nn/tensor.hpp"

namespace dimasr::nn {

/// Reader for the safetensors container: an 8-byte little-endian header
/// length, a JSON header, then raw little-endian tensor bytes. Tensors are
/// read on demand and converted to Scalar; F64, F32, F16 and BF16 are
/// supported. Rank-1 tensors come back as a single row.
class SafetensorsReader {
 public:
  struct Entry {
    std::string dtype;
    std::vector<std::int64_t> shape;
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
  };

  explicit SafetensorsReader(const std::filesystem::path& path);

  bool contains(const std::string& name) const { return entries_.contains(name); }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  Matrix read(const std::string& name);

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t data_start_ = 0;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::string> metadata_;
};

/// Writes tensors as F64 with an optional string metadata block. Tensor
/// order in the file follows the map order.
void write_safetensors(const std::filesystem::path& path, const std::map<std::string, const Matrix*>& tensors,
                       const std::map<std::string, std::string>& metadata = {});

}  // namespace dimasr::nn
