#include "orrw/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "orrw/asymptotics.hpp"
#include "orrw/exact.hpp"
#include "orrw/genfun.hpp"
#include "orrw/montecarlo.hpp"
#include "orrw/version.hpp"
#include "orrw/walk.hpp"

namespace orrw {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Runner {
    std::ostream& out;
    int failures = 0;
    int index = 0;

    void check(const std::string& name, bool ok, const std::string& detail) {
        ++index;
        out << (ok ? "ok " : "FAIL ") << index << " " << name;
        if (!detail.empty()) out << " (" << detail << ")";
        out << "\n";
        if (!ok) ++failures;
    }
};

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed, int threads) {
    out << "orrw selftest version=" << version << " seed=" << seed << "\n";
    Runner r{out};

    // Kernel probabilities straight from the definition.
    {
        ReinforcementParams c3(3.0);
        const double p0 = transition_prob_up({0, 0, 0}, c3);
        const double pi = transition_prob_up({4, 2, 3}, c3);
        const double pf = transition_prob_up({5, 5, 5}, c3);
        r.check("kernel-up-probabilities",
                p0 == 1.0 && pi == 0.5 && pf == 0.25,
                num(p0) + "," + num(pi) + "," + num(pf));
    }

    // Same seed, same trajectory.
    {
        ReinforcementParams c1(1.0);
        const auto a = simulate_range(c1, 1000, {seed, 0}, true);
        const auto b = simulate_range(c1, 1000, {seed, 0}, true);
        r.check("walk-deterministic",
                a.final_range == b.final_range &&
                    a.increments.size() == b.increments.size(),
                "range=" + std::to_string(a.final_range));
    }

    // Generating functions against hand-solved rational values at s = 3/5.
    {
        genfun::EvalPoint s(0.6);
        ReinforcementParams c1(1.0);
        const double g2 = genfun::g(2, s);          // 15/41
        const double G1 = genfun::G(1, s, c1);      // 15/41
        const double sk2 = genfun::s_k_gf(2, s, c1);  // 9/41
        const double hit = genfun::hitting_gf(1, 0, 1, s);  // 15/41
        const bool ok = std::abs(g2 - 15.0 / 41.0) < 1e-15 &&
                        std::abs(G1 - 15.0 / 41.0) < 1e-15 &&
                        std::abs(sk2 - 9.0 / 41.0) < 1e-15 &&
                        std::abs(hit - 15.0 / 41.0) < 1e-15;
        r.check("genfun-rational-anchors", ok,
                num(g2) + "," + num(G1) + "," + num(sk2) + "," + num(hit));
    }

    // The two analytic forms of g and G agree to near machine precision.
    {
        ReinforcementParams c(0.5);
        double worst = 0.0;
        for (std::int64_t x : {1, 7, 61, 499}) {
            for (double sv : {0.2, 0.7, 0.999}) {
                genfun::EvalPoint s(sv);
                const double d1 = std::abs(genfun::g(x, s) - genfun::g_phi_form(x, s)) /
                                  genfun::g(x, s);
                const double d2 =
                    std::abs(genfun::G(x, s, c) - genfun::G_phi_form(x, s, c)) /
                    genfun::G(x, s, c);
                worst = std::max({worst, d1, d2});
            }
        }
        r.check("genfun-dual-forms", worst < 1e-12, "worst_rel=" + num(worst));
    }

    // Exact engine: rational moments at small n, mass conservation at n=256.
    {
        auto c1 = ReinforcementParams::from_rational(1, 1);
        const mpq_class er3 = exact::range_moment_exact(c1, 3, 1);
        const bool ok_r3 = er3 == mpq_class(7, 4);

        ReinforcementParams c1d(1.0);
        auto d = exact::StateDistribution::initial();
        for (int n = 0; n < 256; ++n) d.evolve(c1d, {});
        const double drift = std::abs(d.total_mass() + d.pruned_mass() - 1.0);
        r.check("exact-rational-and-mass",
                ok_r3 && drift < 1e-12,
                "E[R_3]=" + er3.get_str() + " drift=" + num(drift));
    }

    // First-passage law of S_2 at c=1 is exactly geometric.
    {
        auto c1 = ReinforcementParams::from_rational(1, 1);
        const auto pmf = exact::first_passage_pmf_exact(c1, 2, 14);
        bool ok = true;
        for (int j = 0; j <= 5; ++j) {
            mpq_class expect(1, 1 << (j + 1));
            if (pmf.prob[static_cast<std::size_t>(2 + 2 * j)] != expect) ok = false;
        }
        r.check("exact-first-passage-geometric", ok, "k=2,c=1");
    }

    // Limit constants hit their closed forms.
    {
        const double j1 = asymptotics::j_ell(1.0, 1);
        const double j2 = asymptotics::j_ell(1.0, 2);
        const double cat = asymptotics::catalan(1e-13);
        const double k1_c2 = asymptotics::k_ell(2.0, 1);
        const bool ok = std::abs(j1 - M_PI / 2.0) < 1e-10 &&
                        std::abs(j2 - 2.0 * cat) < 1e-10 &&
                        std::abs(k1_c2 - M_LN2) < 1e-10;
        r.check("limit-constant-anchors", ok,
                "J1=" + num(j1) + " J2=" + num(j2) + " K1(2)=" + num(k1_c2));
    }

    // Monte Carlo matches the exact law of R_256 within 4 standard errors,
    // and the second moment respects Jensen against the first.
    {
        ReinforcementParams c1(1.0);
        const auto m1 = mc::estimate_moment(c1, 256, 1, 20000, {seed, 0}, threads);
        const auto m2 = mc::estimate_moment(c1, 256, 2, 20000, {seed, 0}, threads);
        auto d = exact::StateDistribution::initial();
        for (int n = 0; n < 256; ++n) d.evolve(c1, {});
        const double dp1 = exact::range_moment(d, 1) / 16.0;  // sqrt(256) = 16
        const bool ok_mc = std::abs(m1.mean - dp1) < 4.0 * m1.std_error;
        const bool ok_jensen = m2.mean >= m1.mean * m1.mean - 4.0 * m2.std_error;
        r.check("mc-vs-exact-and-jensen", ok_mc && ok_jensen,
                "mc=" + num(m1.mean) + " dp=" + num(dp1) +
                    " se=" + num(m1.std_error));
    }

    // Both first-passage samplers follow the exact pmf.
    {
        ReinforcementParams ch(0.5);
        const auto cmp = mc::compare_first_passage(ch, 4, 20000, {seed, 1}, 4096, threads);
        const bool ok = cmp.direct_fit.p_value > 1e-3 &&
                        cmp.decomposition_fit.p_value > 1e-3 &&
                        cmp.mode_vs_mode.p_value > 1e-3;
        r.check("first-passage-samplers", ok,
                "p_direct=" + num(cmp.direct_fit.p_value) +
                    " p_decomp=" + num(cmp.decomposition_fit.p_value) +
                    " p_two=" + num(cmp.mode_vs_mode.p_value));
    }

    // Truncated pmf transform brackets the closed-form generating function.
    {
        ReinforcementParams c1(1.0);
        const auto pmf = exact::first_passage_pmf(c1, 3, 64);
        genfun::EvalPoint s(0.5);
        double partial = 0.0, spow = 1.0;
        for (std::size_t n = 0; n < pmf.prob.size(); ++n) {
            partial += pmf.prob[n] * spow;
            spow *= 0.5;
        }
        const double gf = genfun::s_k_gf(3, s, c1);
        const double slack = pmf.truncation_mass * std::pow(0.5, 65) + 1e-12;
        const bool ok = gf >= partial - 1e-12 && gf <= partial + slack;
        r.check("pmf-vs-generating-function", ok,
                "partial=" + num(partial) + " gf=" + num(gf));
    }

    out << "selftest: " << (r.index - r.failures) << "/" << r.index << " ok\n";
    return r.failures;
}

}  // namespace orrw
