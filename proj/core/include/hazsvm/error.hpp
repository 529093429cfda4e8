#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hazsvm {

/// Failure categories. Each maps to a stable lowercase tag used as the
/// machine-greppable prefix of CLI diagnostics ("error: <tag>: ...").
enum class ErrorKind {
  io,
  parse,
  label,
  empty_input,
  shape,
  range,
  argument,
  degenerate_labels,
  stratification,
  insufficient_minority,
  convergence,
  tuning,
  version,
  format,
  feature_mismatch,
};

std::string_view error_tag(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace hazsvm
