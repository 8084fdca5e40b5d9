#pragma once
// Hermetic self-check battery.  Every check is deterministic given the seed
// (Monte Carlo included, thanks to the block-ordered reduction), and nothing
// environment-dependent is printed, so two runs with the same seed produce
// byte-identical reports regardless of thread count.

#include <cstdint>
#include <ostream>

namespace orrw {

// Runs the battery, streaming one line per check.  Returns the number of
// failed checks (0 = all good).
int run_selftest(std::ostream& out, std::uint64_t seed = 42, int threads = 0);

}  // namespace orrw
