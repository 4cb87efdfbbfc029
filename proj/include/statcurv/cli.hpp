#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// that tests can drive it in-process.
//
// Exit codes: 0 all checks within tolerance, 1 a mathematical check failed,
// 2 input or spec error (including usage errors).

#include "statcurv/spec_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace statcurv {

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Resolves "gallery:<name>" or a file path.
ManifoldSpec resolve_spec(const std::string& ref);

}  // namespace statcurv
