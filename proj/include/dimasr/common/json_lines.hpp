#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace dimasr {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes bytes atomically enough for our purposes (truncate + write).
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Calls `visit(object, line_number)` for every non-blank line. A line that
/// is not valid JSON raises DataError naming `source` and the line number.
void for_each_json_line(std::string_view content, std::string_view source,
                        const std::function<void(const Json&, std::size_t)>& visit);

/// Serializes one record per line, keys in insertion order.
std::string to_json_line(const OrderedJson& record);

}  // namespace dimasr
