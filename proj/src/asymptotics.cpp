#include "orrw/asymptotics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <string>

#include "orrw/genfun.hpp"

namespace orrw::asymptotics {

namespace {

struct Integrand {
    double c;
    int ell;
};

// 2^c x^(ell-1) (e^x / (e^2x + 1))^c.  The base is evaluated as
// e^-x / (1 + e^-2x) so nothing overflows for large x.
double j_integrand(double x, void* raw) {
    const auto* p = static_cast<const Integrand*>(raw);
    const double base = std::exp(-x) / (1.0 + std::exp(-2.0 * x));
    double v = std::pow(2.0 * base, p->c);
    for (int j = 0; j < p->ell - 1; ++j) v *= x;
    return v;
}

// int_X^inf x^(ell-1) e^(-cx) dx = Gamma(ell) e^(-cX) sum_{m<ell} (cX)^m/m! / c^ell
// (upper incomplete gamma with integer shape, written out exactly).
double tail_envelope(double c, int ell, double X) {
    double sum = 0.0, term = 1.0;
    for (int m = 0; m < ell; ++m) {
        if (m > 0) term *= c * X / m;
        sum += term;
    }
    double fact = 1.0;
    for (int m = 2; m < ell; ++m) fact *= m;
    return fact * std::exp(-c * X) * sum / std::pow(c, ell);
}

struct QagWorkspace {
    gsl_integration_workspace* w;
    explicit QagWorkspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {}
    ~QagWorkspace() { gsl_integration_workspace_free(w); }
};

}  // namespace

QuadResult j_ell_quad(double c, int ell, double abs_tol) {
    if (!(c > 0.0)) throw std::invalid_argument("j_ell: c must be > 0");
    if (ell < 1) throw std::invalid_argument("j_ell: ell must be >= 1");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("j_ell: abs_tol must be > 0");

    // Grow the cutoff until the analytic tail envelope drops below tol/2.
    double X = 8.0, tail = 0.0;
    for (int tries = 0;; ++tries) {
        tail = std::pow(2.0, c) * tail_envelope(c, ell, X);
        if (tail <= 0.5 * abs_tol) break;
        if (tries > 60)
            throw CertificateFailure("j_ell: could not certify the tail at tol " +
                                     std::to_string(abs_tol));
        X *= 1.5;
    }

    Integrand param{c, ell};
    gsl_function f;
    f.function = &j_integrand;
    f.params = &param;

    QagWorkspace ws(512);
    double value = 0.0, qerr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_integration_qag(&f, 0.0, X, 0.5 * abs_tol, 0.0, 512,
                                           GSL_INTEG_GAUSS61, ws.w, &value, &qerr);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS)
        throw CertificateFailure(std::string("j_ell: quadrature failed: ") +
                                 gsl_strerror(status));
    return QuadResult{value, qerr + tail};
}

double j_ell(double c, int ell, double abs_tol) {
    return j_ell_quad(c, ell, abs_tol).value;
}

QuadResult k_ell_quad(double c, int ell, double abs_tol) {
    if (ell < 0) throw std::invalid_argument("k_ell: ell must be >= 0");
    const double scale = (ell + 1.0) / std::pow(2.0, 0.5 * (ell + 1.0));
    QuadResult j = j_ell_quad(c, ell + 1, abs_tol / scale);
    return QuadResult{scale * j.value, scale * j.error};
}

double k_ell(double c, int ell, double abs_tol) {
    return k_ell_quad(c, ell, abs_tol).value;
}

double half_integer_gamma(int twice_argument) {
    if (twice_argument < 1)
        throw std::invalid_argument("half_integer_gamma: argument must be >= 1/2");
    if (twice_argument % 2 == 0) {
        double v = 1.0;  // Gamma(1)
        for (int k = 2; k < twice_argument; k += 2) v *= 0.5 * k;
        return v;
    }
    double v = std::sqrt(M_PI);  // Gamma(1/2)
    for (int k = 1; k < twice_argument; k += 2) v *= 0.5 * k;
    return v;
}

double moment_limit(double c, int ell, double abs_tol) {
    if (ell < 1) throw std::invalid_argument("moment_limit: ell must be >= 1");
    const double denom =
        std::pow(2.0, 0.5 * (ell - 2.0)) * half_integer_gamma(ell);
    return j_ell(c, ell, abs_tol * denom) / denom;
}

double catalan(double abs_tol) {
    if (!(abs_tol >= 1e-15))
        throw std::invalid_argument("catalan: abs_tol must be >= 1e-15");
    // Partial sums of sum (-1)^n/(2n+1)^2 alternate around the limit, and the
    // terms are totally monotone (Laplace transform of a positive measure), so
    // each round of pairwise averaging preserves the alternation.  After any
    // number of rounds, v[0] and v[1] bracket the constant.
    constexpr int kTerms = 48;
    double v[kTerms];
    double partial = 0.0, sign = 1.0;
    for (int n = 0; n < kTerms; ++n) {
        partial += sign / ((2.0 * n + 1.0) * (2.0 * n + 1.0));
        v[n] = partial;
        sign = -sign;
    }
    int len = kTerms;
    while (len >= 2) {
        if (std::abs(v[1] - v[0]) <= abs_tol)
            return 0.5 * (v[0] + v[1]);
        for (int i = 0; i + 1 < len; ++i) v[i] = 0.5 * (v[i] + v[i + 1]);
        --len;
    }
    throw CertificateFailure("catalan: bracket did not close at tol " +
                             std::to_string(abs_tol));
}

LimitConstants limit_constants(double c, int ell, double abs_tol) {
    LimitConstants out;
    out.c = c;
    out.ell = ell;
    QuadResult k = k_ell_quad(c, ell, abs_tol);
    out.K = k.value;
    out.quad_error = k.error;
    if (ell >= 1) {
        QuadResult j = j_ell_quad(c, ell, abs_tol);
        out.J = j.value;
        const double denom =
            std::pow(2.0, 0.5 * (ell - 2.0)) * half_integer_gamma(ell);
        out.M = j.value / denom;
        out.quad_error = std::max(out.quad_error, j.error);
    } else {
        out.J = std::numeric_limits<double>::quiet_NaN();
        out.M = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

TauberianReport tauberian_check(std::span<const double> a, double A, double alpha) {
    if (!(A > 0.0)) throw std::invalid_argument("tauberian_check: A must be > 0");
    if (!(alpha > 0.0))
        throw std::invalid_argument("tauberian_check: alpha must be > 0");
    TauberianReport rep;
    rep.rho.reserve(a.size());
    const double gamma_a1 = std::tgamma(alpha + 1.0);
    double partial = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0)
            throw std::invalid_argument(
                "tauberian_check: sequence entries must be >= 0 (a[" +
                std::to_string(i) + "])");
        // Neumaier step; partial sums of 3e4 entries deserve compensation.
        const double t = partial + a[i];
        comp += (std::abs(partial) >= std::abs(a[i])) ? (partial - t) + a[i]
                                                      : (a[i] - t) + partial;
        partial = t;
        const double N = static_cast<double>(i + 1);
        rep.rho.push_back((partial + comp) / (A * std::pow(N, alpha) / gamma_a1));
    }
    if (alpha > 1.0) {
        rep.rho_prime.reserve(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double N = static_cast<double>(i + 1);
            rep.rho_prime.push_back(
                a[i] / (A * alpha / gamma_a1 * std::pow(N, alpha - 1.0)));
        }
    }
    return rep;
}

std::vector<BlowupRow> blowup_check(int ell, const ReinforcementParams& p,
                                    std::span<const double> s_grid,
                                    double base_rel_tol) {
    const double K = k_ell(p.c(), ell, 1e-13);
    std::vector<BlowupRow> rows;
    rows.reserve(s_grid.size());
    for (double s : s_grid) {
        genfun::EvalPoint pt(s);
        // Tighten with 1-s: the prefactor (1-s)^{(ell+3)/2} must not be asked
        // to resolve a ratio finer than the series truncation allows.
        const double rel_tol = std::max(1e-13, base_rel_tol * (1.0 - s));
        genfun::SeriesValue h = genfun::h_ell(ell, pt, p, rel_tol);
        BlowupRow row;
        row.s = s;
        row.h_value = h.value;
        row.h_tail_bound = h.tail_bound;
        row.k_const = K;
        row.ratio = h.value * std::pow(1.0 - s, 0.5 * (ell + 3.0)) / K;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace orrw::asymptotics
