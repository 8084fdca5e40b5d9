#pragma once
// Closed-form generating functions for the walk's excursion and
// first-passage structure, evaluated for real s in (0,1).
//
// Everything is driven by the root r_s = (1 + sqrt(1-s^2)) / s of
// r = (s/2)(r^2 + 1), the larger root, which is > 1 on (0,1).  Each quantity
// also has an equivalent "phi form" in the variable d_s = log r_s; the two
// are computed along genuinely different code paths so they can be used to
// cross-check each other to near machine precision.

#include <cstdint>

#include "orrw/params.hpp"

namespace orrw::genfun {

// Evaluation point s strictly inside (0,1); both endpoints are rejected
// (every formula below degenerates there).
class EvalPoint {
public:
    explicit EvalPoint(double s) : s_(s) {
        if (!(s > 0.0) || !(s < 1.0))
            throw std::invalid_argument("EvalPoint: s must lie strictly in (0,1)");
    }
    double value() const { return s_; }

private:
    double s_;
};

// r_s > 1.  sqrt(1-s^2) is computed as sqrt((1-s)(1+s)) so no precision is
// lost as s -> 1.
double root_r(EvalPoint s);

// d_s = log r_s = arccosh(1/s), computed via log1p to stay accurate near s=1.
double log_root_r(EvalPoint s);

// phi(y) = (e^y - 1)/(e^y + 1) = tanh(y/2) for y >= 0, evaluated without
// cancellation for small y and without overflow for large y.
double phi(double y);

// E[s^tau], tau the return time to level x of the fair walk reflected at 0,
// started at x-1.  Ratio form (r^(x-1) + r^(1-x)) / (r^x + r^(-x)).
double g(std::int64_t x, EvalPoint s);

// Same quantity via the phi form  s^{-1} (1 - phi(2 x d_s) sqrt(1-s^2)).
double g_phi_form(std::int64_t x, EvalPoint s);

// E[s^T], T the time for the range to grow from x to x+1 (one frontier leg):
// G_x(s) = s / (1 + c - c s g_x(s)).
double G(std::int64_t x, EvalPoint s, const ReinforcementParams& p);

// Same via  s / (1 + c phi(2 x d_s) sqrt(1-s^2)).
double G_phi_form(std::int64_t x, EvalPoint s, const ReinforcementParams& p);

// E_x[s^T] for the fair walk on {-a, ..., b}, reflected at -a, absorbed at b:
//   (r^x + r^{-(2a+x)}) / (r^b + r^{-(2a+b)}).
// Requires -a <= x <= b; equals 1 at x == b.
double hitting_gf(std::int64_t a, std::int64_t x, std::int64_t b, EvalPoint s);

// E[s^{S_k}] = s * prod_{i=1}^{k-1} G_i(s), the first time the range hits k.
double s_k_gf(std::int64_t k, EvalPoint s, const ReinforcementParams& p);

// A series value together with a certified bound on the discarded tail.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    std::int64_t terms_used = 0;
};

// H_ell(s) = sum_n s^n E[R_n (R_n+1) ... (R_n+ell)]
//          = (ell+1)/(1-s) * sum_{k>=1} k(k+1)...(k+ell-1) s prod_{i<k} G_i(s).
// Terms are summed until a closed-form geometric majorant certifies the
// remaining tail below rel_tol * (value so far); the majorant uses that
// G_i(s) decreases in i, so past any k0 the term ratio is at most G_{k0}(s).
SeriesValue h_ell(int ell, EvalPoint s, const ReinforcementParams& p,
                  double rel_tol = 1e-12,
                  std::int64_t max_terms = 50'000'000);

}  // namespace orrw::genfun
