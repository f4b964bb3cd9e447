#include "text_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "insider_lab/errors.hpp"

namespace insider::detail {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view field) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ValidationError(std::string(field) + ": cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::vector<std::pair<double, double>> read_two_column_csv(const std::filesystem::path& path,
                                                           std::string_view first,
                                                           std::string_view second) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  const std::string expected = std::string(first) + "," + std::string(second);
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected) {
    throw ValidationError(path.string() + ": header must be '" + expected + "'");
  }
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ValidationError(where + ": expected two comma-separated columns");
    }
    const std::string_view view(line);
    rows.emplace_back(parse_double(view.substr(0, comma), where + " " + std::string(first)),
                      parse_double(view.substr(comma + 1), where + " " + std::string(second)));
  }
  return rows;
}

}  // namespace insider::detail
