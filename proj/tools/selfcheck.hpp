#pragma once

#include <iosfwd>

namespace eils::tools {

/// Gradient, advantage, EMA, confidence and modulation checks against
/// brute-force oracles. Prints one line per check; true when all pass.
bool run_self_checks(std::ostream& out);

}  // namespace eils::tools
