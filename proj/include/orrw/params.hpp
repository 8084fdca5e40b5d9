#pragma once
// Core parameter types shared by every module.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orrw {

// Reinforcement strength c > 0.  The walk steps up with probability
// 1/(1+c) whenever it sits on the running maximum (and is forced up at 0).
//
// If constructed from a fraction the exact numerator/denominator are kept so
// the exact-distribution module can run in rational arithmetic.
class ReinforcementParams {
public:
    explicit ReinforcementParams(double c) : c_(c) {
        if (!(c > 0.0))
            throw std::invalid_argument("ReinforcementParams: c must be > 0");
    }

    static ReinforcementParams from_rational(long num, long den) {
        if (num <= 0 || den <= 0)
            throw std::invalid_argument(
                "ReinforcementParams: rational c needs num > 0 and den > 0");
        ReinforcementParams p(static_cast<double>(num) / static_cast<double>(den));
        p.num_ = num;
        p.den_ = den;
        return p;
    }

    // Parses "2", "0.5" or "3/4".  Fractions and bare integers keep exact
    // form (usable by the rational engine); decimals stay double-only.
    static ReinforcementParams parse(const std::string& text) {
        std::size_t used = 0;
        const auto slash = text.find('/');
        try {
            if (slash != std::string::npos) {
                const long num = std::stol(text.substr(0, slash), &used);
                if (used != slash) throw std::invalid_argument(text);
                const long den = std::stol(text.substr(slash + 1), &used);
                if (used != text.size() - slash - 1) throw std::invalid_argument(text);
                return from_rational(num, den);
            }
            if (text.find_first_not_of("0123456789") == std::string::npos &&
                !text.empty() && text.size() <= 9) {
                return from_rational(std::stol(text), 1);
            }
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return ReinforcementParams(v);
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("ReinforcementParams: cannot parse \"" +
                                        text + "\"");
        }
    }

    double c() const { return c_; }
    bool is_rational() const { return den_ != 0; }
    long num() const { return num_; }
    long den() const { return den_; }

    // P(step up | on the running maximum) = 1/(1+c), in double.
    double p_up_at_max() const { return 1.0 / (1.0 + c_); }

private:
    double c_;
    long num_ = 0;
    long den_ = 0;  // 0 means "double only"
};

// A reproducible random source: (seed, stream) selects one PCG64 sequence.
// Monte Carlo replicate i uses stream `stream + i`, so results never depend
// on how replicates are scheduled across workers.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Thrown when a sampling routine hits its step budget before finishing.
class StepCapExceeded : public std::runtime_error {
public:
    StepCapExceeded(std::int64_t steps, std::int64_t range, std::int64_t target,
                    const std::string& what)
        : std::runtime_error(what), steps_taken(steps),
          range_reached(range), range_target(target) {}
    std::int64_t steps_taken;
    std::int64_t range_reached;
    std::int64_t range_target;
};

// Thrown when a certified numeric routine cannot meet its error contract.
class CertificateFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace orrw
