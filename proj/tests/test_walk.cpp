#include <doctest.h>

#include <cmath>

#include "orrw/rng.hpp"
#include "orrw/walk.hpp"

using namespace orrw;

TEST_CASE("kernel probabilities follow the three-branch rule") {
    ReinforcementParams c3(3.0);
    // x == 0 wins even when x == r == 0: the walk is forced up from the origin.
    CHECK(transition_prob_up({0, 0, 0}, c3) == 1.0);
    CHECK(transition_prob_up({2, 0, 1}, c3) == 1.0);
    CHECK(transition_prob_up({4, 2, 3}, c3) == 0.5);
    CHECK(transition_prob_up({5, 5, 5}, c3) == doctest::Approx(0.25).epsilon(1e-15));
    ReinforcementParams c05(0.5);
    CHECK(transition_prob_up({3, 3, 3}, c05) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("unreachable states are rejected") {
    ReinforcementParams c1(1.0);
    CHECK_THROWS_AS(transition_prob_up({2, 1, 1}, c1), std::invalid_argument);  // parity
    CHECK_THROWS_AS(transition_prob_up({2, 2, 1}, c1), std::invalid_argument);  // x > r
    CHECK_THROWS_AS(transition_prob_up({1, 1, 2}, c1), std::invalid_argument);  // r > n
    CHECK_THROWS_AS(transition_prob_up({3, -1, 1}, c1), std::invalid_argument);
    CHECK_THROWS_AS(ReinforcementParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ReinforcementParams(-2.0), std::invalid_argument);
}

TEST_CASE("step consumes one uniform and preserves reachability") {
    ReinforcementParams c2(2.0);
    WalkState s{4, 2, 3};
    WalkState up = step(s, c2, 0.25);
    CHECK(up.n == 5);
    CHECK(up.x == 3);
    CHECK(up.r == 3);
    WalkState down = step(s, c2, 0.75);
    CHECK(down.x == 1);
    CHECK(down.r == 3);
    // Frontier push: range grows with the position.
    WalkState f{3, 3, 3};
    WalkState pushed = step(f, c2, 0.1);  // p_up = 1/3
    CHECK(pushed.x == 4);
    CHECK(pushed.r == 4);
    CHECK(step(f, c2, 0.9).r == 3);
    CHECK_THROWS_AS(step(s, c2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(step(s, c2, -0.1), std::invalid_argument);

    // A long streamed run never leaves the reachable set.
    Pcg64 rng(9, 9);
    WalkState w{};
    for (int i = 0; i < 5000; ++i) {
        w = step(w, c2, rng.uniform01());
        REQUIRE(w.valid());
    }
    CHECK(w.n == 5000);
}

TEST_CASE("simulate_range is reproducible and consistent with its increments") {
    ReinforcementParams c1(1.0);
    const auto a = simulate_range(c1, 4096, {123, 5}, true);
    const auto b = simulate_range(c1, 4096, {123, 5}, true);
    CHECK(a.final_range == b.final_range);
    CHECK(a.final_position == b.final_position);
    REQUIRE(a.increments.size() == b.increments.size());

    // Increments enumerate ranges 1, 2, ..., final_range at increasing times.
    REQUIRE(!a.increments.empty());
    CHECK(a.increments.front().range == 1);
    CHECK(a.increments.front().time == 1);  // first step is forced up
    for (std::size_t i = 0; i < a.increments.size(); ++i) {
        CHECK(a.increments[i].range == static_cast<std::int64_t>(i) + 1);
        if (i > 0) CHECK(a.increments[i].time > a.increments[i - 1].time);
        CHECK(a.increments[i].time >= a.increments[i].range);  // r <= n always
    }
    CHECK(a.increments.back().range == a.final_range);
    CHECK(a.final_range <= 4096);
    CHECK(a.final_position <= a.final_range);

    // A different stream gives a different trajectory (overwhelmingly).
    const auto c = simulate_range(c1, 4096, {123, 6}, true);
    CHECK(c.increments.back().time != a.increments.back().time);

    CHECK(simulate_range(c1, 0, {1, 1}).final_range == 0);
    CHECK_THROWS_AS(simulate_range(c1, -1, {1, 1}), std::invalid_argument);
}

TEST_CASE("first passage: support, parity and the step cap") {
    ReinforcementParams c1(1.0);
    for (auto mode : {FirstPassageMode::direct, FirstPassageMode::decomposition}) {
        CHECK(sample_first_passage(c1, 1, {5, 0}, mode) == 1);  // S_1 is deterministic
        for (std::uint64_t stream = 0; stream < 200; ++stream) {
            const auto s = sample_first_passage(c1, 4, {17, stream}, mode);
            CHECK(s >= 4);
            CHECK(((s - 4) & 1) == 0);  // S_k has the parity of k
        }
    }
    CHECK_THROWS_AS(sample_first_passage(c1, 0, {1, 0}), std::invalid_argument);

    try {
        sample_first_passage(c1, 1000000, {1, 0}, FirstPassageMode::direct, 500);
        FAIL("expected StepCapExceeded");
    } catch (const StepCapExceeded& e) {
        CHECK(e.steps_taken == 500);
        CHECK(e.range_target == 1000000);
        CHECK(e.range_reached < 1000000);
    }
    CHECK_THROWS_AS(
        sample_first_passage(c1, 1000000, {1, 0}, FirstPassageMode::decomposition, 500),
        StepCapExceeded);
}

TEST_CASE("both first-passage samplers share the right mean scale") {
    // E[S_2] = 1 + E[T_1] = 1 + (1 + 2c) = 4 at c = 1; a loose 6-sigma band
    // around a 20000-sample average is a cheap smoke test for gross bias.
    ReinforcementParams c1(1.0);
    for (auto mode : {FirstPassageMode::direct, FirstPassageMode::decomposition}) {
        double sum = 0.0, sumsq = 0.0;
        const int reps = 20000;
        for (int i = 0; i < reps; ++i) {
            const auto s = static_cast<double>(sample_first_passage(
                c1, 2, {77, static_cast<std::uint64_t>(i)}, mode));
            sum += s;
            sumsq += s * s;
        }
        const double mean = sum / reps;
        const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
        CHECK(std::abs(mean - 4.0) < 6.0 * se);
    }
}

TEST_CASE("pcg64 streams are stable and decorrelated") {
    Pcg64 a(42, 0), b(42, 0), c(42, 1);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        CHECK(va != c.next());  // equality would be a 2^-64 fluke
    }
    Pcg64 u(7, 3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform01();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
}
