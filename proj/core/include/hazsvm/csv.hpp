#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hazsvm::csv {

/// A single parsed record, with its 1-based line number in the source.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

/// Minimal RFC-4180-less reader: comma separated, no quoting, CRLF tolerant,
/// blank lines skipped. Cells are trimmed of surrounding ASCII whitespace.
class Reader {
public:
  Reader(std::istream& in, std::string source_name, char delimiter = ',');

  /// Next non-blank record, or nullopt at end of stream.
  std::optional<Row> next();

  const std::string& source_name() const noexcept { return source_; }

private:
  std::istream& in_;
  std::string source_;
  char delimiter_;
  std::size_t line_ = 0;
};

std::vector<std::string> split(std::string_view line, char delimiter);

/// Locale-independent decimal parse (period separator). Rejects trailing
/// garbage and non-finite values.
std::optional<double> parse_double(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

} // namespace hazsvm::csv
