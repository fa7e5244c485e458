#pragma once

#include <iosfwd>
#include <string_view>

#include "reccoord/scenario.hpp"

namespace reccoord::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInfeasible = 3,
  kIterationCap = 4,
};

// "members=4,ev=0.5,..." applied on top of the defaults. Throws
// std::invalid_argument on unknown keys or bad numbers.
SyntheticConfig parse_generate_options(std::string_view text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace reccoord::cli
