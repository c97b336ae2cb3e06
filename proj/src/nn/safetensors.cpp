#include "dimasr/nn/safetensors.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>
#include <json.hpp>

#include "dimasr/common/error.hpp"

namespace dimasr::nn {

static_assert(std::endian::native == std::endian::little, "safetensors I/O assumes a little-endian host");

namespace {

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "F64") return 8;
  if (dtype == "F32") return 4;
  if (dtype == "F16" || dtype == "BF16") return 2;
  throw DataError(fmt::format("unsupported safetensors dtype '{}'", dtype));
}

double half_to_double(std::uint16_t h) {
  const std::uint32_t sign = (h >> 15) & 1u;
  const std::uint32_t exponent = (h >> 10) & 0x1fu;
  const std::uint32_t mantissa = h & 0x3ffu;
  double value;
  if (exponent == 0) {
    value = std::ldexp(static_cast<double>(mantissa), -24);
  } else if (exponent == 31) {
    value = mantissa == 0 ? INFINITY : NAN;
  } else {
    value = std::ldexp(static_cast<double>(mantissa | 0x400u), static_cast<int>(exponent) - 25);
  }
  return sign ? -value : value;
}

}  // namespace

SafetensorsReader::SafetensorsReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::uint64_t header_size = 0;
  in_.read(reinterpret_cast<char*>(&header_size), sizeof(header_size));
  const auto file_size = std::filesystem::file_size(path);
  if (!in_ || header_size > file_size - 8) {
    throw DataError(fmt::format("'{}' is not a safetensors file", path.string()));
  }
  std::string header(header_size, '\0');
  in_.read(header.data(), static_cast<std::streamsize>(header_size));
  data_start_ = 8 + header_size;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(header);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("'{}': bad safetensors header: {}", path.string(), e.what()));
  }
  for (const auto& [name, info] : doc.items()) {
    if (name == "__metadata__") {
      for (const auto& [k, v] : info.items()) metadata_[k] = v.get<std::string>();
      continue;
    }
    Entry entry;
    entry.dtype = info.at("dtype").get<std::string>();
    entry.shape = info.at("shape").get<std::vector<std::int64_t>>();
    const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
    if (offsets.size() != 2 || offsets[1] < offsets[0] || data_start_ + offsets[1] > file_size) {
      throw DataError(fmt::format("'{}': tensor '{}' has bad offsets", path.string(), name));
    }
    entry.begin = offsets[0];
    entry.end = offsets[1];
    entries_.emplace(name, std::move(entry));
  }
}

Matrix SafetensorsReader::read(const std::string& name) {
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw DataError(fmt::format("'{}': missing tensor '{}'", path_.string(), name));
  }
  const Entry& entry = it->second;
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  if (entry.shape.size() == 1) {
    cols = entry.shape[0];
  } else if (entry.shape.size() == 2) {
    rows = entry.shape[0];
    cols = entry.shape[1];
  } else if (!entry.shape.empty()) {
    throw DataError(fmt::format("'{}': tensor '{}' has rank {}", path_.string(), name, entry.shape.size()));
  }
  const std::size_t width = dtype_size(entry.dtype);
  const auto count = static_cast<std::size_t>(rows * cols);
  if (entry.end - entry.begin != count * width) {
    throw DataError(fmt::format("'{}': tensor '{}' byte size does not match its shape", path_.string(), name));
  }
  std::vector<char> bytes(entry.end - entry.begin);
  in_.seekg(static_cast<std::streamoff>(data_start_ + entry.begin));
  in_.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in_) throw DataError(fmt::format("'{}': short read for tensor '{}'", path_.string(), name));

  Matrix out(rows, cols);
  Scalar* dst = out.data();
  const char* src = bytes.data();
  for (std::size_t i = 0; i < count; ++i) {
    if (entry.dtype == "F64") {
      double v;
      std::memcpy(&v, src + i * 8, 8);
      dst[i] = v;
    } else if (entry.dtype == "F32") {
      float v;
      std::memcpy(&v, src + i * 4, 4);
      dst[i] = v;
    } else if (entry.dtype == "F16") {
      std::uint16_t h;
      std::memcpy(&h, src + i * 2, 2);
      dst[i] = half_to_double(h);
    } else {
      std::uint16_t h;
      std::memcpy(&h, src + i * 2, 2);
      const std::uint32_t bits = static_cast<std::uint32_t>(h) << 16;
      dst[i] = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_safetensors(const std::filesystem::path& path, const std::map<std::string, const Matrix*>& tensors,
                       const std::map<std::string, std::string>& metadata) {
  nlohmann::ordered_json header;
  if (!metadata.empty()) header["__metadata__"] = metadata;
  std::uint64_t offset = 0;
  for (const auto& [name, tensor] : tensors) {
    const auto bytes = static_cast<std::uint64_t>(tensor->size()) * sizeof(double);
    header[name] = {{"dtype", "F64"},
                    {"shape", {tensor->rows(), tensor->cols()}},
                    {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string text = header.dump();
  while ((text.size() + 8) % 8 != 0) text.push_back(' ');

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  const std::uint64_t header_size = text.size();
  out.write(reinterpret_cast<const char*>(&header_size), sizeof(header_size));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& [name, tensor] : tensors) {
    static_assert(std::is_same_v<Scalar, double>);
    out.write(reinterpret_cast<const char*>(tensor->data()),
              static_cast<std::streamsize>(tensor->size() * sizeof(double)));
  }
  if (!out) throw RuntimeFailure(fmt::format("short write to '{}'", path.string()));
}

}  // namespace dimasr::nn
