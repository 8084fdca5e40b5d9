#include "orrw/genfun.hpp"

#include <cmath>
#include <string>

namespace orrw::genfun {

namespace {

// sqrt(1 - s^2) without cancellation near s = 1.
inline double root_w(double s) { return std::sqrt((1.0 - s) * (1.0 + s)); }

// Neumaier-compensated accumulator for long series.
struct Accum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        comp += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

}  // namespace

double root_r(EvalPoint s) {
    const double sv = s.value();
    return (1.0 + root_w(sv)) / sv;
}

double log_root_r(EvalPoint s) {
    const double sv = s.value();
    // r - 1 = (1 - s + w)/s, small when s -> 1.
    return std::log1p((1.0 - sv + root_w(sv)) / sv);
}

double phi(double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("phi: y must be >= 0");
    if (y < 350.0) {
        const double em = std::expm1(y);
        return em / (em + 2.0);
    }
    return 1.0 - 2.0 / (std::exp(y) + 1.0);  // exp may overflow to inf: phi -> 1
}

double g(std::int64_t x, EvalPoint s) {
    if (x < 1) throw std::invalid_argument("g: x must be >= 1");
    // Scale numerator and denominator by rho^x, rho = 1/r in (0,1), so every
    // power has nonpositive exponent and nothing overflows for large x.
    const double rho = 1.0 / root_r(s);
    const double xd = static_cast<double>(x);
    return (rho + std::pow(rho, 2.0 * xd - 1.0)) / (1.0 + std::pow(rho, 2.0 * xd));
}

double g_phi_form(std::int64_t x, EvalPoint s) {
    if (x < 1) throw std::invalid_argument("g_phi_form: x must be >= 1");
    const double sv = s.value();
    const double w = root_w(sv);
    const double y = 2.0 * static_cast<double>(x) * log_root_r(s);
    // 1 - phi(y) w = (1 - w) + w (1 - phi(y)) = s^2/(1+w) + 2w/(e^y + 1):
    // both pieces positive, so the difference never cancels.
    const double one_minus = sv * sv / (1.0 + w) + 2.0 * w / (std::exp(y) + 1.0);
    return one_minus / sv;
}

double G(std::int64_t x, EvalPoint s, const ReinforcementParams& p) {
    if (x < 1) throw std::invalid_argument("G: x must be >= 1");
    const double sv = s.value();
    return sv / (1.0 + p.c() * (1.0 - sv * g(x, s)));
}

double G_phi_form(std::int64_t x, EvalPoint s, const ReinforcementParams& p) {
    if (x < 1) throw std::invalid_argument("G_phi_form: x must be >= 1");
    const double sv = s.value();
    const double y = 2.0 * static_cast<double>(x) * log_root_r(s);
    return sv / (1.0 + p.c() * phi(y) * root_w(sv));
}

double hitting_gf(std::int64_t a, std::int64_t x, std::int64_t b, EvalPoint s) {
    if (a < 0) throw std::invalid_argument("hitting_gf: a must be >= 0");
    if (b <= -a) throw std::invalid_argument("hitting_gf: need b > -a");
    if (x < -a || x > b)
        throw std::invalid_argument("hitting_gf: x outside [-a, b] (x=" +
                                    std::to_string(x) + ")");
    // (r^x + r^-(2a+x)) / (r^b + r^-(2a+b)), scaled by rho^b; exponents
    // b-x, 2a+x+b and 2(a+b) are all >= 0, and x == b gives exactly 1.
    const double rho = 1.0 / root_r(s);
    const double num = std::pow(rho, static_cast<double>(b - x)) +
                       std::pow(rho, static_cast<double>(2 * a + x + b));
    const double den = 1.0 + std::pow(rho, 2.0 * static_cast<double>(a + b));
    return num / den;
}

double s_k_gf(std::int64_t k, EvalPoint s, const ReinforcementParams& p) {
    if (k < 1) throw std::invalid_argument("s_k_gf: k must be >= 1");
    double prod = s.value();
    for (std::int64_t i = 1; i < k; ++i) prod *= G(i, s, p);
    return prod;
}

namespace {

// T(a, q, ell) = sum_{j>=0} (a+j)(a+j+1)...(a+j+ell-1) q^j, in closed form
// via Vandermonde:  ell! * sum_{i=0}^{ell} C(a+ell-1, ell-i) q^i/(1-q)^{i+1}.
double rising_tail_sum(double a, double q, int ell) {
    const double omq = 1.0 - q;
    double factorial = 1.0;
    for (int j = 2; j <= ell; ++j) factorial *= j;
    double total = 0.0;
    double qpow = 1.0, omqpow = omq;
    for (int i = 0; i <= ell; ++i) {
        // C(a+ell-1, ell-i) as a falling product; a may be large, ell is tiny.
        double binom = 1.0;
        for (int j = 0; j < ell - i; ++j)
            binom *= (a + ell - 1.0 - j) / (ell - i - j);
        total += binom * qpow / omqpow;
        qpow *= q;
        omqpow *= omq;
    }
    return factorial * total;
}

}  // namespace

SeriesValue h_ell(int ell, EvalPoint s, const ReinforcementParams& p,
                  double rel_tol, std::int64_t max_terms) {
    if (ell < 0) throw std::invalid_argument("h_ell: ell must be >= 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("h_ell: rel_tol must be > 0");
    const double sv = s.value();

    Accum acc;
    double prod = 1.0;  // prod_{i<k} G_i(s)
    std::int64_t k = 1;
    double tail_raw = 0.0;
    for (;; ++k) {
        if (k > max_terms)
            throw CertificateFailure("h_ell: tail certificate not reached after " +
                                     std::to_string(max_terms) + " terms");
        double rf = 1.0;
        for (int j = 0; j < ell; ++j) rf *= static_cast<double>(k + j);
        acc.add(rf * sv * prod);

        // Tail majorant over k' > k: G_i(s) decreases in i, so the remaining
        // terms are dominated by a geometric with ratio q = G_{k+1}(s).
        const double prod_next = prod * G_phi_form(k, s, p);
        const double q = G_phi_form(k + 1, s, p);
        tail_raw = sv * prod_next *
                   rising_tail_sum(static_cast<double>(k + 1), q, ell);
        if (tail_raw <= rel_tol * acc.total()) break;
        prod = prod_next;
    }

    const double scale = (ell + 1.0) / (1.0 - sv);
    return SeriesValue{scale * acc.total(), scale * tail_raw, k};
}

}  // namespace orrw::genfun
