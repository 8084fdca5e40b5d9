#pragma once
// Limit constants for the range of the walk, plus the Tauberian-side
// diagnostics tying the exact finite-n data to those constants.
//
// The scaled range R_n / sqrt(n) has ell-th moment converging to
//   M_ell = J_ell(c) / (2^{(ell-2)/2} Gamma(ell/2)),
// with J_ell(c) = 2^c int_0^inf x^{ell-1} (e^x / (e^{2x}+1))^c dx, and the
// generating function H_ell(s) blows up like K_ell (1-s)^{-(ell+3)/2} with
//   K_ell = (ell+1) J_{ell+1}(c) / 2^{(ell+1)/2}.

#include <cstdint>
#include <span>
#include <vector>

#include "orrw/params.hpp"

namespace orrw::asymptotics {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // certified: quadrature estimate + analytic tail bound
};

// J_ell(c), ell >= 1.  Adaptive quadrature on [0, X] plus a closed-form bound
// on the discarded tail (the integrand is below x^{ell-1} e^{-cx} there, whose
// integral is an incomplete gamma with integer ell, summable exactly).
QuadResult j_ell_quad(double c, int ell, double abs_tol = 1e-12);
double j_ell(double c, int ell, double abs_tol = 1e-12);

// K_ell(c), ell >= 0.
QuadResult k_ell_quad(double c, int ell, double abs_tol = 1e-12);
double k_ell(double c, int ell, double abs_tol = 1e-12);

// M_ell(c) = lim E[(R_n/sqrt n)^ell], ell >= 1.
double moment_limit(double c, int ell, double abs_tol = 1e-12);

// Gamma(k/2) for k >= 1, by the recursion from Gamma(1/2) = sqrt(pi) and
// Gamma(1) = 1 (no calls into lgamma, so it can serve as its own oracle).
double half_integer_gamma(int twice_argument);

// Catalan's constant, computed (not hard-coded) from the alternating series
// sum (-1)^n / (2n+1)^2 by repeated averaging.  The terms are totally
// monotone, so consecutive entries of every averaged column bracket the
// limit; the bracket width certifies abs_tol.
double catalan(double abs_tol = 1e-12);

struct LimitConstants {
    double c = 0.0;
    int ell = 0;
    double J = 0.0;           // J_ell(c)
    double K = 0.0;           // K_ell(c)
    double M = 0.0;           // M_ell(c); NaN for ell == 0 (undefined there)
    double quad_error = 0.0;  // max certified error over the quadratures used
};

LimitConstants limit_constants(double c, int ell, double abs_tol = 1e-12);

// Tauberian ratio diagnostics for a nonnegative sequence a_1, a_2, ... whose
// partial sums should behave like A n^alpha / Gamma(alpha+1):
//   rho_N  = (sum_{k<=N} a_k) / (A N^alpha / Gamma(alpha+1))
//   rho'_N = a_N / (A alpha/Gamma(alpha+1) N^{alpha-1})   (only if alpha > 1)
// a[i] is a_{i+1}.  Negative entries are rejected.
struct TauberianReport {
    std::vector<double> rho;        // rho_N, N = 1..a.size()
    std::vector<double> rho_prime;  // empty when alpha <= 1
};

TauberianReport tauberian_check(std::span<const double> a, double A, double alpha);

// Ratio H_ell(s) (1-s)^{(ell+3)/2} / K_ell over a grid of s values; the ratio
// should drift toward 1 as s -> 1.  The series tolerance tightens with 1-s so
// truncation never masks the trend.
struct BlowupRow {
    double s = 0.0;
    double h_value = 0.0;
    double h_tail_bound = 0.0;
    double k_const = 0.0;
    double ratio = 0.0;
};

std::vector<BlowupRow> blowup_check(int ell, const ReinforcementParams& p,
                                    std::span<const double> s_grid,
                                    double base_rel_tol = 1e-10);

}  // namespace orrw::asymptotics
