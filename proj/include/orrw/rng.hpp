#pragma once
// PCG64 (XSL-RR 128/64).  Hand-rolled because we need the (seed, stream)
// "setseq" contract for per-replicate streams and bit-stable output across
// platforms; <random> engines guarantee neither.

#include <cstdint>

#include "orrw/params.hpp"

namespace orrw {

class Pcg64 {
public:
    explicit Pcg64(SeedSpec s) : Pcg64(s.seed, s.stream) {}

    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        // setseq init: inc odd and derived from the stream id.
        inc_ = ((static_cast<u128>(stream) << 1) | 1u);
        state_ = 0;
        next_raw();
        state_ += (static_cast<u128>(seed) << 64) | seed;
        next_raw();
    }

    std::uint64_t next() { return next_raw(); }

    // Uniform double in [0, 1): top 53 bits of one output word.
    double uniform01() {
        return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
    }

    // True with probability p (p in [0,1]).
    bool bernoulli(double p) { return uniform01() < p; }

    static constexpr const char* name() { return "pcg64-xsl-rr"; }

private:
    using u128 = unsigned __int128;
    static constexpr u128 mult() {
        return (static_cast<u128>(0x2360ED051FC65DA4ull) << 64) | 0x4385DF649FCCF645ull;
    }

    std::uint64_t next_raw() {
        state_ = state_ * mult() + inc_;
        const std::uint64_t xored =
            static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
        const unsigned rot = static_cast<unsigned>(state_ >> 122);
        return (xored >> rot) | (xored << ((-rot) & 63u));
    }

    u128 state_ = 0;
    u128 inc_ = 0;
};

}  // namespace orrw
