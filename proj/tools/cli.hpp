#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "popdyn/verification.hpp"

namespace popdyn::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNumericalFailure = 2,
  kVerificationFailure = 3,
};

/// Test seam: replaces the operator assembly used by `verify`.
struct Hooks {
  OperatorFactory assemble = assemble_operators;
};

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, const Hooks& hooks = {});

}  // namespace popdyn::cli
