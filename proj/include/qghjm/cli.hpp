#pragma once

#include <iosfwd>

namespace qghjm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUnsatisfied = 3;

/// qghjm simulate|region|verify|ode|price --config FILE --out DIR
///       [--seed N] [--threads N] [--c3-scale S]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qghjm
