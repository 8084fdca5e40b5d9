#include "orrw/walk.hpp"

#include <cmath>
#include <string>

#include "orrw/rng.hpp"

namespace orrw {

double transition_prob_up(const WalkState& s, const ReinforcementParams& p) {
    if (!s.valid())
        throw std::invalid_argument("transition_prob_up: unreachable state (n=" +
                                    std::to_string(s.n) + ", x=" + std::to_string(s.x) +
                                    ", r=" + std::to_string(s.r) + ")");
    if (s.x == 0) return 1.0;          // forced up; dominates x == r == 0
    if (s.x < s.r) return 0.5;
    return p.p_up_at_max();            // on the frontier
}

WalkState step(const WalkState& s, const ReinforcementParams& p, double u) {
    if (!(u >= 0.0 && u < 1.0))
        throw std::invalid_argument("step: u must lie in [0,1)");
    const double pu = transition_prob_up(s, p);
    WalkState t = s;
    ++t.n;
    if (u < pu) {
        ++t.x;
        if (t.x > t.r) t.r = t.x;
    } else {
        --t.x;
    }
    return t;
}

RangeTrajectory simulate_range(const ReinforcementParams& p, std::int64_t steps,
                               SeedSpec seed, bool record_increments) {
    if (steps < 0)
        throw std::invalid_argument("simulate_range: steps must be >= 0");
    Pcg64 rng(seed);
    const double pu_max = p.p_up_at_max();
    std::int64_t x = 0, r = 0;
    RangeTrajectory out;
    for (std::int64_t n = 0; n < steps; ++n) {
        if (x == 0) {
            x = 1;
        } else if (x < r) {
            x += rng.bernoulli(0.5) ? 1 : -1;
        } else {
            x += rng.bernoulli(pu_max) ? 1 : -1;
        }
        if (x > r) {
            r = x;
            if (record_increments) out.increments.push_back({n + 1, r});
        }
    }
    out.steps = steps;
    out.final_position = x;
    out.final_range = r;
    return out;
}

namespace {

// Return time to level `target` of the fair walk reflected at 0, started at
// target-1 (the cost of one failed excursion off the frontier).
std::int64_t sample_reflected_hit(Pcg64& rng, std::int64_t target,
                                  std::int64_t budget, std::int64_t spent,
                                  std::int64_t k) {
    std::int64_t x = target - 1, n = 0;
    while (x != target) {
        if (spent + n >= budget)
            throw StepCapExceeded(budget, target - 1, k,
                                  "sample_first_passage: step cap exceeded");
        x += (x == 0 || rng.bernoulli(0.5)) ? 1 : -1;
        ++n;
    }
    return n;
}

}  // namespace

std::int64_t sample_first_passage(const ReinforcementParams& p, std::int64_t k,
                                  SeedSpec seed, FirstPassageMode mode,
                                  std::int64_t max_steps) {
    if (k < 1) throw std::invalid_argument("sample_first_passage: k must be >= 1");
    if (max_steps < 1)
        throw std::invalid_argument("sample_first_passage: max_steps must be >= 1");
    Pcg64 rng(seed);

    if (mode == FirstPassageMode::direct) {
        const double pu_max = p.p_up_at_max();
        std::int64_t x = 0, r = 0, n = 0;
        while (r < k) {
            if (n >= max_steps)
                throw StepCapExceeded(n, r, k,
                                      "sample_first_passage: step cap exceeded");
            if (x == 0)
                x = 1;
            else if (x < r)
                x += rng.bernoulli(0.5) ? 1 : -1;
            else
                x += rng.bernoulli(pu_max) ? 1 : -1;
            if (x > r) r = x;
            ++n;
        }
        return n;
    }

    // Decomposition mode.  Leg i (from range i to i+1) costs
    //   1 + sum over Y_i failed excursions of (1 + return time),
    // with Y_i geometric: P(Y_i = j) = (c/(1+c))^j / (1+c).
    const double q = p.c() / (1.0 + p.c());  // failure probability per attempt
    const double log_q = std::log(q);
    std::int64_t total = 1;  // the forced first step reaches range 1
    for (std::int64_t i = 1; i < k; ++i) {
        // Geometric by inversion; log1p(-u) is exact enough for u near 0.
        const double u = rng.uniform01();
        const auto failures = static_cast<std::int64_t>(std::log1p(-u) / log_q);
        std::int64_t leg = 1;
        for (std::int64_t j = 0; j < failures; ++j)
            leg += 1 + sample_reflected_hit(rng, i, max_steps, total + leg, k);
        total += leg;
        if (total > max_steps)
            throw StepCapExceeded(total, i, k,
                                  "sample_first_passage: step cap exceeded");
    }
    return total;
}

}  // namespace orrw
