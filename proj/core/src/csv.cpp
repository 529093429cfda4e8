#include "hazsvm/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace hazsvm::csv {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

} // namespace

Reader::Reader(std::istream& in, std::string source_name, char delimiter)
    : in_(in), source_(std::move(source_name)), delimiter_(delimiter) {}

std::optional<Row> Reader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line_ == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) {
      continue;
    }
    return Row{line_, split(line, delimiter_)};
  }
  return std::nullopt;
}

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    const auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                       : pos - start);
    cells.emplace_back(trim(cell));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

} // namespace hazsvm::csv
