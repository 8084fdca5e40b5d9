#pragma once
// Monte Carlo estimators with deterministic parallelism.
//
// Replicate i always draws from PCG64 stream (seed.stream + i), and replicates
// are aggregated in fixed blocks of 1024 whose partial sums are combined in
// block order.  Workers only race for *which* block to compute next, never for
// how results are combined, so every thread count produces bit-identical
// output.

#include <cstdint>
#include <span>
#include <vector>

#include "orrw/exact.hpp"
#include "orrw/params.hpp"
#include "orrw/stats.hpp"
#include "orrw/walk.hpp"

namespace orrw::mc {

inline constexpr std::int64_t block_size = 1024;

// Number of worker threads: the ORRW_THREADS environment variable wins over
// the explicit request; 0 means "ask the hardware".
int resolve_threads(int requested);

struct EstimatorResult {
    double mean = 0.0;       // estimate of E[(R_n / sqrt n)^ell]
    double std_error = 0.0;  // sample sd / sqrt(reps)
    std::int64_t reps = 0;
    SeedSpec seed;
    std::int64_t n = 0;
    int ell = 0;
    double c = 0.0;
};

EstimatorResult estimate_moment(const ReinforcementParams& p, std::int64_t n,
                                int ell, std::int64_t reps, SeedSpec seed,
                                int threads = 0);

enum class StudySource { exact_dp, monte_carlo };

struct ConvergenceRow {
    std::int64_t n = 0;
    int ell = 0;
    double c = 0.0;
    double estimate = 0.0;   // E[(R_n / sqrt n)^ell], estimated or exact
    double std_error = 0.0;  // MC standard error, or the certified DP bound
    double limit = 0.0;      // the n -> infinity constant
    double ratio = 0.0;      // estimate / limit
    StudySource source = StudySource::monte_carlo;
};

// One row per n in n_grid (ascending).  The exact source runs a single shared
// distribution evolution; the MC source gives each n its own disjoint stream
// window so rows stay independent.
std::vector<ConvergenceRow> convergence_study(const ReinforcementParams& p,
                                              std::span<const std::int64_t> n_grid,
                                              int ell, StudySource source,
                                              std::int64_t reps, SeedSpec seed,
                                              int threads = 0,
                                              const exact::DpOptions& opt = {});

struct FirstPassageComparison {
    std::int64_t k = 0;
    std::int64_t reps = 0;
    double pmf_truncation_mass = 0.0;
    stats::ChiSquareResult direct_fit;         // direct sampler vs exact pmf
    stats::ChiSquareResult decomposition_fit;  // decomposition sampler vs exact pmf
    stats::ChiSquareResult mode_vs_mode;       // the two samplers against each other
};

// Samples S_k with both samplers and tests each against the exact pmf
// (binned so every expected count is >= 5, truncation pooled into the tail
// bin).  Requires the pmf truncation mass within pmf_n_max to be <= 1e-3.
FirstPassageComparison compare_first_passage(const ReinforcementParams& p,
                                             std::int64_t k, std::int64_t reps,
                                             SeedSpec seed,
                                             std::int64_t pmf_n_max = 8192,
                                             int threads = 0);

}  // namespace orrw::mc
