#pragma once
// Exact evolution of the joint law of (position, range).
//
// The state after n steps is a pair (x, r) with 0 <= x <= r <= n and x of the
// parity of n.  The law is stored row-by-row in r; row r only ever receives
// mass from row r-1 (through its frontier cell x = r-1), which makes two
// cheap certified prunings possible in floating mode:
//   * bottom rows whose total mass fell below eps_prune are dropped outright
//     (once dropped they can never be refilled, so each row is paid for once);
//   * a brand-new top row is only spawned when the arriving mass is at least
//     eps_spawn; otherwise that mass is pruned.
// Everything pruned is added to pruned_mass, so
//   |E[f(R_n)] - computed| <= pruned_mass * max |f|
// holds with no asymptotic hand-waving.  In rational mode nothing is ever
// pruned and the law is exact.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "orrw/params.hpp"

namespace orrw::exact {

struct DpOptions {
    double eps_prune = 1e-14;
    // 0 means "auto": eps_prune / 65536.  The spawn threshold is deliberately
    // finer than eps_prune because it is charged once per step, not once per
    // row.
    double eps_spawn = 0.0;

    double spawn_threshold() const {
        return eps_spawn > 0.0 ? eps_spawn : eps_prune / 65536.0;
    }
};

template <class Scalar>
struct MassEntry {
    std::int64_t x = 0;
    std::int64_t r = 0;
    Scalar mass{};
};

template <class Scalar>
class StateDistributionT {
public:
    // Point mass at the origin before any step.
    static StateDistributionT initial() { return delta(0, 0, 0); }

    // Point mass at (x, r) after n steps; rejects unreachable states.
    static StateDistributionT delta(std::int64_t x, std::int64_t r, std::int64_t n);

    std::int64_t time() const { return n_; }
    std::int64_t min_range() const { return r_lo_; }
    std::int64_t max_range() const {
        return r_lo_ + static_cast<std::int64_t>(rows_.size()) - 1;
    }

    Scalar mass(std::int64_t x, std::int64_t r) const;
    Scalar range_mass(std::int64_t r) const;  // P(R_n = r), up to pruning
    Scalar total_mass() const;
    Scalar pruned_mass() const { return pruned_; }

    std::vector<MassEntry<Scalar>> entries() const;

    // One step of the kernel.  The double overload prunes as described above;
    // the rational overload (c must be exact) never prunes.
    void evolve(const ReinforcementParams& p, const DpOptions& opt);
    void evolve(const ReinforcementParams& p);

private:
    // rows_[i] is row r = r_lo_ + i; cell j of a row holds x = (n_ & 1) + 2j.
    std::int64_t n_ = 0;
    std::int64_t r_lo_ = 0;
    std::vector<std::vector<Scalar>> rows_;
    std::vector<Scalar> row_totals_;
    std::vector<Scalar> scratch_;
    Scalar pruned_{};

    template <class Kernel>
    void evolve_impl(const Kernel& k, double eps_prune, double eps_spawn);
};

using StateDistribution = StateDistributionT<double>;
using RationalDistribution = StateDistributionT<mpq_class>;

// --- moment readouts --------------------------------------------------------

// E[R_n^ell] over the stored mass.
double range_moment(const StateDistribution& d, int ell);
mpq_class range_moment(const RationalDistribution& d, int ell);

// E[R_n (R_n+1) ... (R_n+ell)]  (ell+1 rising factors).
double rising_moment(const StateDistribution& d, int ell);
mpq_class rising_moment(const RationalDistribution& d, int ell);

// Certified bounds: pruned_mass times the largest value the observable can
// take at this n (range <= n).
double range_moment_error_bound(const StateDistribution& d, int ell);
double rising_moment_error_bound(const StateDistribution& d, int ell);

// --- drivers ----------------------------------------------------------------

struct MomentRow {
    std::int64_t n = 0;
    int ell = 0;
    double value = 0.0;
    double error_bound = 0.0;
};

struct MomentTable {
    std::vector<MomentRow> rows;
};

// E[R_n^ell] for every n in n_grid (ascending) and ell = 1..ell_max, from one
// shared evolution.
MomentTable range_moments(const ReinforcementParams& p,
                          std::span<const std::int64_t> n_grid, int ell_max,
                          const DpOptions& opt = {});

// Same for every n = 1..n_max.
MomentTable range_moments_all(const ReinforcementParams& p, std::int64_t n_max,
                              int ell_max, const DpOptions& opt = {});

// a_n = E[R_n (R_n+1) ... (R_n+ell)] for n = 1..n_max (index i is n = i+1);
// optionally the certified bound per entry.
std::vector<double> rising_factorial_sequence(const ReinforcementParams& p,
                                              std::int64_t n_max, int ell,
                                              const DpOptions& opt = {},
                                              std::vector<double>* error_bounds = nullptr);

double rising_factorial_moment(const ReinforcementParams& p, std::int64_t n,
                               int ell, const DpOptions& opt = {},
                               double* error_bound = nullptr);

// Rational mode: c must carry an exact fraction and n is capped at 512 (the
// digit growth is exponential in n; past that the run would be pointless).
inline constexpr std::int64_t rational_n_cap = 512;

mpq_class range_moment_exact(const ReinforcementParams& p, std::int64_t n, int ell);
mpq_class rising_factorial_moment_exact(const ReinforcementParams& p,
                                        std::int64_t n, int ell);

// --- first passage ------------------------------------------------------------

// P(S_k = n) for n = 0..n_max, plus the mass of {S_k > n_max}.  Computed by
// the same row DP restricted to r < k with absorption when the frontier of
// row k-1 pushes up.  No pruning in either mode: the state space is finite.
struct FirstPassagePmf {
    std::int64_t k = 0;
    std::vector<double> prob;  // prob[n], size n_max+1
    double truncation_mass = 0.0;
};

struct FirstPassagePmfExact {
    std::int64_t k = 0;
    std::vector<mpq_class> prob;
    mpq_class truncation_mass;
};

FirstPassagePmf first_passage_pmf(const ReinforcementParams& p, std::int64_t k,
                                  std::int64_t n_max);
FirstPassagePmfExact first_passage_pmf_exact(const ReinforcementParams& p,
                                             std::int64_t k, std::int64_t n_max);

}  // namespace orrw::exact
