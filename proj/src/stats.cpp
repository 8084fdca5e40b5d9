#include "orrw/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace orrw::stats {

namespace {

// Lower regularized P(a,x) by power series; valid (and fast) for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a, sum = term, ap = a;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("regularized_gamma: series did not converge");
}

// Upper regularized Q(a,x) by the modified Lentz continued fraction; x >= a+1.
double gamma_q_cf(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("regularized_gamma: continued fraction did not converge");
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_q: a must be > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("regularized_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_sf: dof must be >= 1");
    if (!(statistic >= 0.0))
        throw std::invalid_argument("chi_square_sf: statistic must be >= 0");
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> counts,
                               std::span<const double> expected_prob) {
    if (counts.size() != expected_prob.size() || counts.size() < 2)
        throw std::invalid_argument("chi_square_gof: need >= 2 matching bins");
    std::int64_t total = 0;
    double prob_total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw std::invalid_argument("chi_square_gof: negative count");
        total += counts[i];
        prob_total += expected_prob[i];
    }
    if (std::abs(prob_total - 1.0) > 1e-9)
        throw std::invalid_argument("chi_square_gof: bin probabilities sum to " +
                                    std::to_string(prob_total) + ", not 1");
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = expected_prob[i] * static_cast<double>(total);
        if (!(expected > 0.0))
            throw std::invalid_argument("chi_square_gof: bin with zero expectation");
        const double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    const int dof = static_cast<int>(counts.size()) - 1;
    return {stat, dof, chi_square_sf(stat, dof)};
}

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> counts_a,
                                      std::span<const std::int64_t> counts_b) {
    if (counts_a.size() != counts_b.size() || counts_a.size() < 2)
        throw std::invalid_argument("chi_square_two_sample: need >= 2 matching bins");
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        if (counts_a[i] < 0 || counts_b[i] < 0)
            throw std::invalid_argument("chi_square_two_sample: negative count");
        na += static_cast<double>(counts_a[i]);
        nb += static_cast<double>(counts_b[i]);
    }
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("chi_square_two_sample: empty sample");
    const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
    double stat = 0.0;
    int dof = static_cast<int>(counts_a.size()) - 1;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        const double ai = static_cast<double>(counts_a[i]);
        const double bi = static_cast<double>(counts_b[i]);
        if (ai + bi == 0.0) {  // empty bin carries no information
            --dof;
            continue;
        }
        const double diff = ka * ai - kb * bi;
        stat += diff * diff / (ai + bi);
    }
    if (dof < 1) throw std::invalid_argument("chi_square_two_sample: no informative bins");
    return {stat, dof, chi_square_sf(stat, dof)};
}

}  // namespace orrw::stats
