#include "orrw/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orrw::exact {

namespace {

struct DoubleKernel {
    using Scalar = double;
    static constexpr bool is_exact = false;
    double pu, pd;
    explicit DoubleKernel(const ReinforcementParams& p)
        : pu(p.p_up_at_max()), pd(1.0 - p.p_up_at_max()) {}
    static double half_of(double m) { return 0.5 * m; }
};

struct RationalKernel {
    using Scalar = mpq_class;
    static constexpr bool is_exact = true;
    mpq_class pu, pd;
    explicit RationalKernel(const ReinforcementParams& p) {
        if (!p.is_rational())
            throw std::invalid_argument(
                "exact: rational mode needs c constructed from a fraction");
        pu = mpq_class(p.den(), p.den() + p.num());
        pd = mpq_class(p.num(), p.den() + p.num());
        pu.canonicalize();
        pd.canonicalize();
    }
    static mpq_class half_of(const mpq_class& m) { return m / 2; }
};

template <class Scalar>
Scalar row_sum(const std::vector<Scalar>& row) {
    if constexpr (std::is_same_v<Scalar, double>) {
        double s = 0.0, comp = 0.0;
        for (double v : row) {
            const double t = s + v;
            comp += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
            s = t;
        }
        return s + comp;
    } else {
        Scalar s{};
        for (const Scalar& v : row) s += v;
        return s;
    }
}

}  // namespace

template <class Scalar>
StateDistributionT<Scalar> StateDistributionT<Scalar>::delta(std::int64_t x,
                                                             std::int64_t r,
                                                             std::int64_t n) {
    const bool parity_ok = ((x ^ n) & 1) == 0;
    const bool range_ok = 0 <= x && x <= r && r <= n && (n == 0 || r >= 1);
    if (!parity_ok || !range_ok)
        throw std::invalid_argument("StateDistribution::delta: unreachable state (n=" +
                                    std::to_string(n) + ", x=" + std::to_string(x) +
                                    ", r=" + std::to_string(r) + ")");
    StateDistributionT d;
    d.n_ = n;
    d.r_lo_ = r;
    const std::int64_t parity = n & 1;
    d.rows_.emplace_back((r - parity) / 2 + 1, Scalar{});
    d.rows_[0][(x - parity) / 2] = Scalar(1);
    d.row_totals_.push_back(Scalar(1));
    return d;
}

template <class Scalar>
Scalar StateDistributionT<Scalar>::mass(std::int64_t x, std::int64_t r) const {
    if (r < r_lo_ || r > max_range()) return Scalar{};
    const std::int64_t parity = n_ & 1;
    if (x < parity || x > r || ((x ^ n_) & 1) != 0) return Scalar{};
    const auto& row = rows_[r - r_lo_];
    const std::size_t j = static_cast<std::size_t>((x - parity) / 2);
    return j < row.size() ? row[j] : Scalar{};
}

template <class Scalar>
Scalar StateDistributionT<Scalar>::range_mass(std::int64_t r) const {
    if (r < r_lo_ || r > max_range()) return Scalar{};
    return row_totals_[r - r_lo_];
}

template <class Scalar>
Scalar StateDistributionT<Scalar>::total_mass() const {
    return row_sum(row_totals_);
}

template <class Scalar>
std::vector<MassEntry<Scalar>> StateDistributionT<Scalar>::entries() const {
    std::vector<MassEntry<Scalar>> out;
    const std::int64_t parity = n_ & 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const std::int64_t r = r_lo_ + static_cast<std::int64_t>(i);
        for (std::size_t j = 0; j < rows_[i].size(); ++j) {
            if (rows_[i][j] == Scalar{}) continue;
            out.push_back({parity + 2 * static_cast<std::int64_t>(j), r, rows_[i][j]});
        }
    }
    return out;
}

template <class Scalar>
template <class Kernel>
void StateDistributionT<Scalar>::evolve_impl(const Kernel& kern, double eps_prune,
                                             double eps_spawn) {
    const std::int64_t pc = n_ & 1;   // current parity
    const std::int64_t pn = pc ^ 1;   // next parity
    const std::int64_t r_hi = max_range();

    Scalar carry{};  // mass climbing into the next row (range grows by one)
    for (std::int64_t r = r_lo_; r <= r_hi; ++r) {
        auto& row = rows_[r - r_lo_];
        // Row 0 at odd parity holds no states at all (and -1/2 truncates the
        // wrong way), hence the explicit branch.
        const std::int64_t new_j_max = r >= pn ? (r - pn) / 2 : -1;
        scratch_.assign(static_cast<std::size_t>(new_j_max + 1), Scalar{});
        Scalar next_carry{};

        const std::int64_t j_max = static_cast<std::int64_t>(row.size()) - 1;
        const bool has_frontier = r >= pc && ((r - pc) & 1) == 0;
        std::int64_t j_begin = 0;
        if (pc == 0 && j_max >= 0) {
            // x = 0: forced up.  From (0,0) that also grows the range.
            const Scalar& m = row[0];
            if (r == 0)
                next_carry += m;
            else
                scratch_[0] += m;
            j_begin = 1;
        }
        const std::int64_t j_interior_end = j_max - (has_frontier && r > 0 ? 1 : 0);
        for (std::int64_t j = j_begin; j <= j_interior_end; ++j) {
            const Scalar h = Kernel::half_of(row[j]);
            scratch_[j + pc] += h;      // x -> x+1
            scratch_[j + pc - 1] += h;  // x -> x-1
        }
        if (has_frontier && r > 0 && j_max >= j_begin) {
            const Scalar& m = row[j_max];
            next_carry += kern.pu * m;
            scratch_[j_max + pc - 1] += kern.pd * m;
        }
        if (carry != Scalar{}) scratch_[new_j_max] += carry;
        carry = next_carry;

        row.swap(scratch_);
        row_totals_[r - r_lo_] = row_sum(row);
    }

    if (carry != Scalar{}) {
        bool spawn = true;
        if constexpr (!Kernel::is_exact) spawn = !(carry < eps_spawn);
        if (spawn) {
            const std::int64_t r_new = r_hi + 1;
            rows_.emplace_back(static_cast<std::size_t>((r_new - pn) / 2 + 1), Scalar{});
            rows_.back().back() = carry;
            row_totals_.push_back(carry);
        } else {
            pruned_ += carry;
        }
    }

    ++n_;

    // Drop drained bottom rows.  Row r only ever receives mass from row r-1,
    // so once the bottom row is gone nothing can refill its successor and the
    // drop is paid for exactly once per row.  Exact mode only sheds rows that
    // are identically zero.
    const auto droppable = [&](const Scalar& total) {
        if constexpr (Kernel::is_exact)
            return total == Scalar{};
        else
            return total < eps_prune;
    };
    while (rows_.size() > 1 && droppable(row_totals_.front())) {
        pruned_ += row_totals_.front();
        rows_.erase(rows_.begin());
        row_totals_.erase(row_totals_.begin());
        ++r_lo_;
    }
}

template <class Scalar>
void StateDistributionT<Scalar>::evolve(const ReinforcementParams& p,
                                        const DpOptions& opt) {
    static_assert(std::is_same_v<Scalar, double> || std::is_same_v<Scalar, mpq_class>);
    if constexpr (std::is_same_v<Scalar, double>) {
        if (!(opt.eps_prune >= 0.0))
            throw std::invalid_argument("evolve: eps_prune must be >= 0");
        evolve_impl(DoubleKernel(p), opt.eps_prune, opt.spawn_threshold());
    } else {
        evolve_impl(RationalKernel(p), 0.0, 0.0);
    }
}

template <class Scalar>
void StateDistributionT<Scalar>::evolve(const ReinforcementParams& p) {
    evolve(p, DpOptions{});
}

template class StateDistributionT<double>;
template class StateDistributionT<mpq_class>;

// --- moment readouts ---------------------------------------------------------

namespace {

double pow_int(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

template <class Scalar, class Weight>
Scalar weighted_row_sum(const StateDistributionT<Scalar>& d, Weight weight) {
    if constexpr (std::is_same_v<Scalar, double>) {
        double s = 0.0, comp = 0.0;
        for (std::int64_t r = d.min_range(); r <= d.max_range(); ++r) {
            const double v = weight(r) * d.range_mass(r);
            const double t = s + v;
            comp += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
            s = t;
        }
        return s + comp;
    } else {
        Scalar s{};
        for (std::int64_t r = d.min_range(); r <= d.max_range(); ++r)
            s += weight(r) * d.range_mass(r);
        return s;
    }
}

}  // namespace

double range_moment(const StateDistribution& d, int ell) {
    if (ell < 0) throw std::invalid_argument("range_moment: ell must be >= 0");
    return weighted_row_sum(d, [ell](std::int64_t r) {
        return pow_int(static_cast<double>(r), ell);
    });
}

mpq_class range_moment(const RationalDistribution& d, int ell) {
    if (ell < 0) throw std::invalid_argument("range_moment: ell must be >= 0");
    return weighted_row_sum(d, [ell](std::int64_t r) {
        mpz_class v;
        mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(r),
                      static_cast<unsigned long>(ell));
        return mpq_class(v);
    });
}

double rising_moment(const StateDistribution& d, int ell) {
    if (ell < 0) throw std::invalid_argument("rising_moment: ell must be >= 0");
    return weighted_row_sum(d, [ell](std::int64_t r) {
        double v = 1.0;
        for (int j = 0; j <= ell; ++j) v *= static_cast<double>(r + j);
        return v;
    });
}

mpq_class rising_moment(const RationalDistribution& d, int ell) {
    if (ell < 0) throw std::invalid_argument("rising_moment: ell must be >= 0");
    return weighted_row_sum(d, [ell](std::int64_t r) {
        mpz_class v = 1;
        for (int j = 0; j <= ell; ++j) v *= r + j;
        return mpq_class(v);
    });
}

double range_moment_error_bound(const StateDistribution& d, int ell) {
    return d.pruned_mass() * pow_int(static_cast<double>(d.time()), ell);
}

double rising_moment_error_bound(const StateDistribution& d, int ell) {
    double worst = 1.0;
    for (int j = 0; j <= ell; ++j) worst *= static_cast<double>(d.time() + j);
    return d.pruned_mass() * worst;
}

// --- drivers -------------------------------------------------------------------

MomentTable range_moments(const ReinforcementParams& p,
                          std::span<const std::int64_t> n_grid, int ell_max,
                          const DpOptions& opt) {
    if (ell_max < 1) throw std::invalid_argument("range_moments: ell_max must be >= 1");
    for (std::size_t i = 0; i < n_grid.size(); ++i)
        if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw std::invalid_argument(
                "range_moments: n_grid must be positive and strictly increasing");
    MomentTable table;
    if (n_grid.empty()) return table;

    auto d = StateDistribution::initial();
    std::size_t next = 0;
    for (std::int64_t n = 1; n <= n_grid.back(); ++n) {
        d.evolve(p, opt);
        if (n == n_grid[next]) {
            for (int ell = 1; ell <= ell_max; ++ell)
                table.rows.push_back(
                    {n, ell, range_moment(d, ell), range_moment_error_bound(d, ell)});
            ++next;
        }
    }
    return table;
}

MomentTable range_moments_all(const ReinforcementParams& p, std::int64_t n_max,
                              int ell_max, const DpOptions& opt) {
    if (n_max < 1) throw std::invalid_argument("range_moments_all: n_max must be >= 1");
    std::vector<std::int64_t> grid(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n) grid[n - 1] = n;
    return range_moments(p, grid, ell_max, opt);
}

std::vector<double> rising_factorial_sequence(const ReinforcementParams& p,
                                              std::int64_t n_max, int ell,
                                              const DpOptions& opt,
                                              std::vector<double>* error_bounds) {
    if (n_max < 1)
        throw std::invalid_argument("rising_factorial_sequence: n_max must be >= 1");
    std::vector<double> seq;
    seq.reserve(static_cast<std::size_t>(n_max));
    if (error_bounds) {
        error_bounds->clear();
        error_bounds->reserve(static_cast<std::size_t>(n_max));
    }
    auto d = StateDistribution::initial();
    for (std::int64_t n = 1; n <= n_max; ++n) {
        d.evolve(p, opt);
        seq.push_back(rising_moment(d, ell));
        if (error_bounds) error_bounds->push_back(rising_moment_error_bound(d, ell));
    }
    return seq;
}

double rising_factorial_moment(const ReinforcementParams& p, std::int64_t n, int ell,
                               const DpOptions& opt, double* error_bound) {
    if (n < 1) throw std::invalid_argument("rising_factorial_moment: n must be >= 1");
    auto d = StateDistribution::initial();
    for (std::int64_t m = 0; m < n; ++m) d.evolve(p, opt);
    if (error_bound) *error_bound = rising_moment_error_bound(d, ell);
    return rising_moment(d, ell);
}

namespace {

RationalDistribution evolve_rational_to(const ReinforcementParams& p, std::int64_t n) {
    if (!p.is_rational())
        throw std::invalid_argument("exact: rational mode needs a fractional c");
    if (n < 1 || n > rational_n_cap)
        throw std::invalid_argument("exact: rational mode supports 1 <= n <= " +
                                    std::to_string(rational_n_cap));
    auto d = RationalDistribution::initial();
    for (std::int64_t m = 0; m < n; ++m) d.evolve(p);
    return d;
}

}  // namespace

mpq_class range_moment_exact(const ReinforcementParams& p, std::int64_t n, int ell) {
    return range_moment(evolve_rational_to(p, n), ell);
}

mpq_class rising_factorial_moment_exact(const ReinforcementParams& p, std::int64_t n,
                                        int ell) {
    return rising_moment(evolve_rational_to(p, n), ell);
}

// --- first passage ---------------------------------------------------------------

namespace {

// Shared DP: rows r = 1..k-1, absorb when the frontier of row k-1 pushes up.
template <class Kernel>
void run_first_passage(const Kernel& kern, std::int64_t k, std::int64_t n_max,
                       std::vector<typename Kernel::Scalar>& pmf,
                       typename Kernel::Scalar& truncation) {
    using Scalar = typename Kernel::Scalar;
    pmf.assign(static_cast<std::size_t>(n_max) + 1, Scalar{});

    if (n_max >= 1 && k == 1) {  // the very first step reaches range 1
        pmf[1] = Scalar(1);
        truncation = Scalar{};
        return;
    }
    if (n_max < 1) {
        truncation = Scalar(1);
        return;
    }

    // State after step 1: (x=1, r=1) with probability 1.
    std::vector<std::vector<Scalar>> rows(static_cast<std::size_t>(k - 1));
    std::vector<Scalar> scratch;
    rows[0] = {Scalar(1)};  // row r=1 at odd parity: cell x=1
    for (std::int64_t r = 2; r < k; ++r)
        rows[r - 1].assign(static_cast<std::size_t>((r - 1) / 2 + 1), Scalar{});

    for (std::int64_t n = 1; n < n_max; ++n) {
        const std::int64_t pc = n & 1, pn = pc ^ 1;
        Scalar carry{};
        for (std::int64_t r = 1; r < k; ++r) {
            auto& row = rows[r - 1];
            const std::int64_t new_j_max = (r - pn) / 2;
            scratch.assign(static_cast<std::size_t>(new_j_max + 1), Scalar{});
            Scalar next_carry{};
            const std::int64_t j_max = static_cast<std::int64_t>(row.size()) - 1;
            const bool has_frontier = r >= pc && ((r - pc) & 1) == 0;
            std::int64_t j_begin = 0;
            if (pc == 0 && j_max >= 0) {
                scratch[0] += row[0];  // x = 0 forced up (r >= 1 always here)
                j_begin = 1;
            }
            const std::int64_t j_interior_end = j_max - (has_frontier ? 1 : 0);
            for (std::int64_t j = j_begin; j <= j_interior_end; ++j) {
                const Scalar h = Kernel::half_of(row[j]);
                scratch[j + pc] += h;
                scratch[j + pc - 1] += h;
            }
            if (has_frontier && j_max >= j_begin) {
                const Scalar& m = row[j_max];
                next_carry += kern.pu * m;
                scratch[j_max + pc - 1] += kern.pd * m;
            }
            if (carry != Scalar{}) scratch[new_j_max] += carry;
            carry = next_carry;
            row.swap(scratch);
        }
        pmf[static_cast<std::size_t>(n + 1)] = carry;  // absorbed: S_k = n+1
    }

    Scalar live{};
    for (const auto& row : rows)
        for (const Scalar& v : row) live += v;
    truncation = live;
}

}  // namespace

FirstPassagePmf first_passage_pmf(const ReinforcementParams& p, std::int64_t k,
                                  std::int64_t n_max) {
    if (k < 1) throw std::invalid_argument("first_passage_pmf: k must be >= 1");
    if (n_max < 0) throw std::invalid_argument("first_passage_pmf: n_max must be >= 0");
    FirstPassagePmf out;
    out.k = k;
    DoubleKernel kern(p);
    run_first_passage(kern, k, n_max, out.prob, out.truncation_mass);
    return out;
}

FirstPassagePmfExact first_passage_pmf_exact(const ReinforcementParams& p,
                                             std::int64_t k, std::int64_t n_max) {
    if (k < 1) throw std::invalid_argument("first_passage_pmf: k must be >= 1");
    if (n_max < 0) throw std::invalid_argument("first_passage_pmf: n_max must be >= 0");
    FirstPassagePmfExact out;
    out.k = k;
    RationalKernel kern(p);
    run_first_passage(kern, k, n_max, out.prob, out.truncation_mass);
    return out;
}

}  // namespace orrw::exact
