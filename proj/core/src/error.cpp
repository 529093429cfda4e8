#include "hazsvm/error.hpp"

namespace hazsvm {

std::string_view error_tag(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::io: return "io";
  case ErrorKind::parse: return "parse";
  case ErrorKind::label: return "label";
  case ErrorKind::empty_input: return "empty";
  case ErrorKind::shape: return "shape";
  case ErrorKind::range: return "range";
  case ErrorKind::argument: return "argument";
  case ErrorKind::degenerate_labels: return "degenerate";
  case ErrorKind::stratification: return "stratification";
  case ErrorKind::insufficient_minority: return "minority";
  case ErrorKind::convergence: return "converge";
  case ErrorKind::tuning: return "tuning";
  case ErrorKind::version: return "version";
  case ErrorKind::format: return "format";
  case ErrorKind::feature_mismatch: return "features";
  }
  return "unknown";
}

} // namespace hazsvm
