#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

void enum_reflected(std::int64_t x, std::int64_t a, std::int64_t b, int n,
                    int max_steps, const mpq_class& prob, RationalPmf& out) {
    if (x == b) {
        out.prob[static_cast<std::size_t>(n)] += prob;
        return;
    }
    if (n == max_steps) {
        out.residual += prob;
        return;
    }
    if (x == -a) {  // reflector: forced step up, probability 1
        enum_reflected(x + 1, a, b, n + 1, max_steps, prob, out);
        return;
    }
    const mpq_class half = prob / 2;
    enum_reflected(x + 1, a, b, n + 1, max_steps, half, out);
    enum_reflected(x - 1, a, b, n + 1, max_steps, half, out);
}

struct OrrwKernel {
    mpq_class pu, pd;
    explicit OrrwKernel(const orrw::ReinforcementParams& p) {
        if (!p.is_rational())
            throw std::invalid_argument("oracle: c must be rational");
        pu = mpq_class(p.den(), p.den() + p.num());
        pd = mpq_class(p.num(), p.den() + p.num());
        pu.canonicalize();
        pd.canonicalize();
    }
};

void enum_first_passage(std::int64_t x, std::int64_t r, std::int64_t k,
                        const OrrwKernel& kern, int n, int max_steps,
                        const mpq_class& prob, RationalPmf& out) {
    if (r == k) {
        out.prob[static_cast<std::size_t>(n)] += prob;
        return;
    }
    if (n == max_steps) {
        out.residual += prob;
        return;
    }
    if (x == 0) {
        enum_first_passage(x + 1, std::max(r, x + 1), k, kern, n + 1, max_steps,
                           prob, out);
        return;
    }
    if (x < r) {
        const mpq_class half = prob / 2;
        enum_first_passage(x + 1, r, k, kern, n + 1, max_steps, half, out);
        enum_first_passage(x - 1, r, k, kern, n + 1, max_steps, half, out);
        return;
    }
    enum_first_passage(x + 1, r + 1, k, kern, n + 1, max_steps, prob * kern.pu, out);
    enum_first_passage(x - 1, r, k, kern, n + 1, max_steps, prob * kern.pd, out);
}

void enum_range_law(std::int64_t x, std::int64_t r, const OrrwKernel& kern,
                    int steps_left, const mpq_class& prob,
                    std::vector<mpq_class>& law) {
    if (steps_left == 0) {
        law[static_cast<std::size_t>(r)] += prob;
        return;
    }
    if (x == 0) {
        enum_range_law(x + 1, std::max(r, x + 1), kern, steps_left - 1, prob, law);
        return;
    }
    if (x < r) {
        const mpq_class half = prob / 2;
        enum_range_law(x + 1, r, kern, steps_left - 1, half, law);
        enum_range_law(x - 1, r, kern, steps_left - 1, half, law);
        return;
    }
    enum_range_law(x + 1, r + 1, kern, steps_left - 1, prob * kern.pu, law);
    enum_range_law(x - 1, r, kern, steps_left - 1, prob * kern.pd, law);
}

}  // namespace

RationalPmf reflected_hitting_pmf(std::int64_t a, std::int64_t x0, std::int64_t b,
                                  int max_steps) {
    if (a < 0 || x0 < -a || x0 > b || max_steps < 0 || max_steps > 30)
        throw std::invalid_argument("reflected_hitting_pmf: bad arguments");
    RationalPmf out;
    out.prob.assign(static_cast<std::size_t>(max_steps) + 1, mpq_class(0));
    enum_reflected(x0, a, b, 0, max_steps, mpq_class(1), out);
    return out;
}

RationalPmf first_passage_pmf(const orrw::ReinforcementParams& p, std::int64_t x0,
                              std::int64_t r0, std::int64_t k, int max_steps) {
    if (x0 < 0 || x0 > r0 || k <= r0 || max_steps < 0 || max_steps > 30)
        throw std::invalid_argument("first_passage_pmf: bad arguments");
    OrrwKernel kern(p);
    RationalPmf out;
    out.prob.assign(static_cast<std::size_t>(max_steps) + 1, mpq_class(0));
    enum_first_passage(x0, r0, k, kern, 0, max_steps, mpq_class(1), out);
    return out;
}

std::vector<mpq_class> range_law(const orrw::ReinforcementParams& p, int n) {
    if (n < 0 || n > 24) throw std::invalid_argument("range_law: keep n <= 24");
    OrrwKernel kern(p);
    std::vector<mpq_class> law(static_cast<std::size_t>(n) + 1, mpq_class(0));
    enum_range_law(0, 0, kern, n, mpq_class(1), law);
    return law;
}

mpq_class pgf_partial(const RationalPmf& pmf, const mpq_class& s) {
    mpq_class acc = 0, spow = 1;
    for (const mpq_class& p : pmf.prob) {
        acc += p * spow;
        spow *= s;
    }
    return acc;
}

mpq_class hitting_gf_exact(std::int64_t a, std::int64_t x0, std::int64_t b,
                           const mpq_class& s) {
    if (a < 0 || b <= -a || x0 < -a || x0 > b)
        throw std::invalid_argument("hitting_gf_exact: bad arguments");
    if (x0 == b) return 1;
    // Unknowns U_{-a} .. U_{b-1}; index i corresponds to x = i - a.
    const std::size_t m = static_cast<std::size_t>(a + b);
    std::vector<std::vector<mpq_class>> aug(m, std::vector<mpq_class>(m + 1, 0));
    const mpq_class half_s = s / 2;
    for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t x = static_cast<std::int64_t>(i) - a;
        aug[i][i] = 1;
        if (x == -a) {
            // U_{-a} = s U_{-a+1}; if -a+1 == b the right side is the constant s.
            if (i + 1 < m)
                aug[i][i + 1] = -s;
            else
                aug[i][m] = s;
        } else {
            if (i >= 1) aug[i][i - 1] = -half_s;
            if (i + 1 < m)
                aug[i][i + 1] = -half_s;
            else
                aug[i][m] = half_s;  // neighbor is the absorbing level: U_b = 1
        }
    }
    // Gaussian elimination with nonzero pivoting, exact arithmetic.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        while (piv < m && aug[piv][col] == 0) ++piv;
        if (piv == m) throw std::runtime_error("hitting_gf_exact: singular system");
        std::swap(aug[piv], aug[col]);
        const mpq_class inv = aug[col][col];
        for (std::size_t j = col; j <= m; ++j) aug[col][j] /= inv;
        for (std::size_t row = 0; row < m; ++row) {
            if (row == col || aug[row][col] == 0) continue;
            const mpq_class f = aug[row][col];
            for (std::size_t j = col; j <= m; ++j) aug[row][j] -= f * aug[col][j];
        }
    }
    return aug[static_cast<std::size_t>(x0 + a)][m];
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double lo, double hi,
                   double flo, double fmid, double fhi, double whole, double tol,
                   int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double fl = f(lmid), fr = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
    if (depth > 40) return left + right;
    if (std::abs(left + right - whole) < 15.0 * tol) return left + right;
    return simpson_rec(f, lo, mid, flo, fl, fmid, left, tol / 2, depth + 1) +
           simpson_rec(f, mid, hi, fmid, fr, fhi, right, tol / 2, depth + 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double lo, double hi,
               double tol) {
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    return simpson_rec(f, lo, hi, flo, fmid, fhi, whole, tol, 0);
}

}  // namespace oracle
