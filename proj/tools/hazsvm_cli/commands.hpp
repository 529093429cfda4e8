#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace hazsvm::cli {

/// Entry point shared by the hazsvm binary and the tests. `args` excludes
/// the program name. Returns the process exit status; every failure
/// writes one "error: <tag>: <message>" line to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace hazsvm::cli
