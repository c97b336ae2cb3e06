#include "dimasr/common/json_lines.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dimasr/common/error.hpp"

namespace dimasr {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError(fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw RuntimeFailure(fmt::format("short write to '{}'", path.string()));
  }
}

void for_each_json_line(std::string_view content, std::string_view source,
                        const std::function<void(const Json&, std::size_t)>& visit) {
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    ++line_number;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == content.size()) break;
      continue;
    }
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(fmt::format("{}:{}: malformed line: {}", source, line_number, e.what()));
    }
    visit(record, line_number);
    if (end == content.size()) break;
  }
}

std::string to_json_line(const OrderedJson& record) {
  return record.dump(-1, ' ', false, Json::error_handler_t::strict) + "\n";
}

}  // namespace dimasr
