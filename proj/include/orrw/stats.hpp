#pragma once
// Small statistics toolkit used by the Monte Carlo cross-checks.

#include <cstdint>
#include <span>

namespace orrw::stats {

// Upper regularized incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a), a > 0,
// x >= 0.  Series for x < a+1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double statistic, int dof);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};

// Pearson goodness of fit of observed bin counts against bin probabilities.
// The probabilities must sum to 1 within 1e-9 and every expected count must
// be positive.  dof = bins - 1.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> counts,
                               std::span<const double> expected_prob);

// Two-sample chi-square homogeneity test on a shared binning.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> counts_a,
                                      std::span<const std::int64_t> counts_b);

}  // namespace orrw::stats
