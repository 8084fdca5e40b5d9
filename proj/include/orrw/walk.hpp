#pragma once
// The once-reinforced walk on {0, 1, 2, ...}.
//
// State after n steps: position x and running maximum r.  One step:
//   x == 0            -> forced up
//   0 < x < r         -> up or down with probability 1/2 each
//   x == r (frontier) -> up with probability 1/(1+c), down otherwise
// Pushing past the frontier is the only way r grows, and then by exactly 1.

#include <cstdint>
#include <vector>

#include "orrw/params.hpp"

namespace orrw {

struct WalkState {
    std::int64_t n = 0;  // steps taken
    std::int64_t x = 0;  // position
    std::int64_t r = 0;  // running maximum (range)

    // Reachability: 0 <= x <= r <= n and x has the parity of n.
    bool valid() const {
        return 0 <= x && x <= r && r <= n && ((x ^ n) & 1) == 0;
    }
};

inline constexpr std::int64_t default_step_cap = 1'000'000'000;

// P(next step is +1 | state).  Throws std::invalid_argument on an unreachable
// state.  The x == 0 branch wins when x == r == 0: from the origin with no
// history the walk is forced up, reinforcement never applies there.
double transition_prob_up(const WalkState& s, const ReinforcementParams& p);

// Advance one step consuming a single uniform u in [0,1).
WalkState step(const WalkState& s, const ReinforcementParams& p, double u);

// (time, new range) pairs, recorded each time the range grows.
struct RangeIncrement {
    std::int64_t time;
    std::int64_t range;
};

struct RangeTrajectory {
    std::int64_t steps = 0;
    std::int64_t final_position = 0;
    std::int64_t final_range = 0;
    std::vector<RangeIncrement> increments;  // filled only on request
};

// Run exactly `steps` steps from the origin.
RangeTrajectory simulate_range(const ReinforcementParams& p, std::int64_t steps,
                               SeedSpec seed, bool record_increments = false);

enum class FirstPassageMode { direct, decomposition };

// Sample S_k, the first time the range reaches k.
//
// direct:        simulate the walk until r == k.
// decomposition: S_k = 1 + sum of the k-1 frontier-to-frontier legs; each leg
//                is 1 + a geometric number of failed excursions, every failed
//                excursion costing 1 + (a fair reflected-walk return time).
// Both modes draw from the same (seed, stream) source but are otherwise
// independent code paths, which is the point: they cross-validate each other.
//
// Throws StepCapExceeded if the budget runs out.
std::int64_t sample_first_passage(const ReinforcementParams& p, std::int64_t k,
                                  SeedSpec seed,
                                  FirstPassageMode mode = FirstPassageMode::direct,
                                  std::int64_t max_steps = default_step_cap);

}  // namespace orrw
