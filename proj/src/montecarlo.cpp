#include "orrw/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "orrw/asymptotics.hpp"

namespace orrw::mc {

int resolve_threads(int requested) {
    if (const char* env = std::getenv("ORRW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw std::invalid_argument(
                std::string("ORRW_THREADS must be an integer in [1,4096], got \"") +
                env + "\"");
        return static_cast<int>(v);
    }
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct Neumaier {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

// Run blocks 0..n_blocks-1 on `threads` workers.  Blocks are claimed through
// an atomic ticket; fn(block) must write only into its own slot.
template <class Fn>
void run_blocks(std::int64_t n_blocks, int threads, Fn fn) {
    if (threads <= 1 || n_blocks <= 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::int64_t> ticket{0};
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = ticket.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    const int use = static_cast<int>(
        std::min<std::int64_t>(threads, n_blocks));
    pool.reserve(use);
    for (int t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

double pow_int(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

}  // namespace

EstimatorResult estimate_moment(const ReinforcementParams& p, std::int64_t n,
                                int ell, std::int64_t reps, SeedSpec seed,
                                int threads) {
    if (n < 1) throw std::invalid_argument("estimate_moment: n must be >= 1");
    if (ell < 0) throw std::invalid_argument("estimate_moment: ell must be >= 0");
    if (reps < 2) throw std::invalid_argument("estimate_moment: reps must be >= 2");

    const std::int64_t n_blocks = (reps + block_size - 1) / block_size;
    std::vector<double> block_s1(static_cast<std::size_t>(n_blocks));
    std::vector<double> block_s2(static_cast<std::size_t>(n_blocks));
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    run_blocks(n_blocks, resolve_threads(threads), [&](std::int64_t b) {
        Neumaier s1, s2;
        const std::int64_t lo = b * block_size;
        const std::int64_t hi = std::min(reps, lo + block_size);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
            const auto traj = simulate_range(
                p, n, SeedSpec{seed.seed, seed.stream + static_cast<std::uint64_t>(rep)});
            const double v =
                pow_int(static_cast<double>(traj.final_range) * inv_sqrt_n, ell);
            s1.add(v);
            s2.add(v * v);
        }
        block_s1[static_cast<std::size_t>(b)] = s1.total();
        block_s2[static_cast<std::size_t>(b)] = s2.total();
    });

    Neumaier s1, s2;
    for (std::int64_t b = 0; b < n_blocks; ++b) {  // fixed order: thread-count invariant
        s1.add(block_s1[static_cast<std::size_t>(b)]);
        s2.add(block_s2[static_cast<std::size_t>(b)]);
    }
    const double mean = s1.total() / static_cast<double>(reps);
    const double ss = std::max(0.0, s2.total() - static_cast<double>(reps) * mean * mean);
    const double var = ss / static_cast<double>(reps - 1);

    EstimatorResult out;
    out.mean = mean;
    out.std_error = std::sqrt(var / static_cast<double>(reps));
    out.reps = reps;
    out.seed = seed;
    out.n = n;
    out.ell = ell;
    out.c = p.c();
    return out;
}

std::vector<ConvergenceRow> convergence_study(const ReinforcementParams& p,
                                              std::span<const std::int64_t> n_grid,
                                              int ell, StudySource source,
                                              std::int64_t reps, SeedSpec seed,
                                              int threads,
                                              const exact::DpOptions& opt) {
    if (ell < 1) throw std::invalid_argument("convergence_study: ell must be >= 1");
    const double limit = asymptotics::moment_limit(p.c(), ell);
    std::vector<ConvergenceRow> rows;
    rows.reserve(n_grid.size());

    if (source == StudySource::exact_dp) {
        exact::MomentTable table = exact::range_moments(p, n_grid, ell, opt);
        for (const auto& mrow : table.rows) {
            if (mrow.ell != ell) continue;
            const double scale = pow_int(std::sqrt(static_cast<double>(mrow.n)), ell);
            ConvergenceRow row;
            row.n = mrow.n;
            row.ell = ell;
            row.c = p.c();
            row.estimate = mrow.value / scale;
            row.std_error = mrow.error_bound / scale;
            row.limit = limit;
            row.ratio = row.estimate / limit;
            row.source = StudySource::exact_dp;
            rows.push_back(row);
        }
        return rows;
    }

    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        // Disjoint stream window per grid point keeps the rows independent.
        SeedSpec row_seed{seed.seed,
                          seed.stream + static_cast<std::uint64_t>(i) *
                                            static_cast<std::uint64_t>(reps)};
        EstimatorResult est = estimate_moment(p, n_grid[i], ell, reps, row_seed, threads);
        ConvergenceRow row;
        row.n = n_grid[i];
        row.ell = ell;
        row.c = p.c();
        row.estimate = est.mean;
        row.std_error = est.std_error;
        row.limit = limit;
        row.ratio = est.mean / limit;
        row.source = StudySource::monte_carlo;
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Pool the exact pmf into bins with expected count >= min_expected, walking
// the support left to right; everything past n_max (truncation included)
// lands in the final bin.  Returns bin edges as half-open index ranges:
// bin i covers pmf indices [edges[i], edges[i+1]); the last bin additionally
// absorbs the truncation mass and any sample beyond n_max.
std::vector<std::size_t> make_bins(const std::vector<double>& pmf,
                                   double truncation, std::int64_t reps,
                                   double min_expected) {
    const double need = min_expected / static_cast<double>(reps);
    std::vector<std::size_t> edges{0};
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        if (acc >= need) {
            edges.push_back(i + 1);
            acc = 0.0;
        }
    }
    if (edges.size() < 3)
        throw std::invalid_argument(
            "compare_first_passage: too few populated bins; raise reps or n_max");
    // Make sure the tail bin (what's left past the last edge, plus the
    // truncation mass) also carries enough expectation; merge backward if not.
    double tail = truncation + acc;
    while (edges.size() > 3 && tail < need) {
        const std::size_t lo = edges[edges.size() - 2];
        const std::size_t hi = edges.back();
        for (std::size_t i = lo; i < hi; ++i) tail += pmf[i];
        edges.pop_back();
    }
    return edges;
}

std::vector<double> bin_probs(const std::vector<double>& pmf,
                              const std::vector<std::size_t>& edges,
                              double truncation) {
    std::vector<double> probs(edges.size(), 0.0);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        for (std::size_t i = edges[b]; i < edges[b + 1]; ++i) probs[b] += pmf[i];
    double last = truncation;
    for (std::size_t i = edges.back(); i < pmf.size(); ++i) last += pmf[i];
    probs.back() = last;
    // Absorb the rounding slack into the largest bin (never the tail, which
    // may be legitimately tiny) so the probs sum to 1 exactly.
    double sum = 0.0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        sum += probs[i];
        if (probs[i] > probs[largest]) largest = i;
    }
    probs[largest] += 1.0 - sum;
    return probs;
}

std::size_t bin_of(std::int64_t value, const std::vector<std::size_t>& edges) {
    const auto v = static_cast<std::size_t>(value);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        if (v < edges[b + 1]) return b;
    return edges.size() - 1;
}

}  // namespace

FirstPassageComparison compare_first_passage(const ReinforcementParams& p,
                                             std::int64_t k, std::int64_t reps,
                                             SeedSpec seed, std::int64_t pmf_n_max,
                                             int threads) {
    if (k < 2) throw std::invalid_argument("compare_first_passage: k must be >= 2");
    if (reps < 100)
        throw std::invalid_argument("compare_first_passage: reps must be >= 100");

    exact::FirstPassagePmf pmf = exact::first_passage_pmf(p, k, pmf_n_max);
    if (!(pmf.truncation_mass <= 1e-3))
        throw std::invalid_argument(
            "compare_first_passage: pmf truncation mass " +
            std::to_string(pmf.truncation_mass) +
            " exceeds 1e-3; raise pmf_n_max");

    const auto edges = make_bins(pmf.prob, pmf.truncation_mass, reps, 5.0);
    const auto probs = bin_probs(pmf.prob, edges, pmf.truncation_mass);
    const std::size_t n_bins = probs.size();

    // Per-block bin counts, combined in block order (deterministic in the
    // thread count).  Direct and decomposition samplers use disjoint stream
    // windows so the two samples are independent.
    const std::int64_t n_blocks = (reps + block_size - 1) / block_size;
    std::vector<std::vector<std::int64_t>> counts(
        2, std::vector<std::int64_t>(n_bins, 0));
    for (int mode = 0; mode < 2; ++mode) {
        std::vector<std::vector<std::int64_t>> block_counts(
            static_cast<std::size_t>(n_blocks));
        const std::uint64_t stream0 =
            seed.stream + (mode == 0 ? 0 : static_cast<std::uint64_t>(reps));
        const auto fp_mode =
            mode == 0 ? FirstPassageMode::direct : FirstPassageMode::decomposition;
        run_blocks(n_blocks, resolve_threads(threads), [&](std::int64_t b) {
            std::vector<std::int64_t> local(n_bins, 0);
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(reps, lo + block_size);
            for (std::int64_t rep = lo; rep < hi; ++rep) {
                const std::int64_t s = sample_first_passage(
                    p, k, SeedSpec{seed.seed, stream0 + static_cast<std::uint64_t>(rep)},
                    fp_mode);
                ++local[bin_of(s, edges)];
            }
            block_counts[static_cast<std::size_t>(b)] = std::move(local);
        });
        for (const auto& bc : block_counts)
            for (std::size_t i = 0; i < n_bins; ++i) counts[mode][i] += bc[i];
    }

    FirstPassageComparison out;
    out.k = k;
    out.reps = reps;
    out.pmf_truncation_mass = pmf.truncation_mass;
    out.direct_fit = stats::chi_square_gof(counts[0], probs);
    out.decomposition_fit = stats::chi_square_gof(counts[1], probs);
    out.mode_vs_mode = stats::chi_square_two_sample(counts[0], counts[1]);
    return out;
}

}  // namespace orrw::mc
