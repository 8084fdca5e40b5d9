// Command-line front end: simulate | exact | gf | limits | converge | blowup |
// selftest.  Tabular output goes to stdout (or --out) as CSV with "# key=value"
// metadata comments, or as JSON {"meta": ..., "rows": ...} with --format json.
//
// Exit codes: 0 ok, 1 numeric/certificate failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "orrw/asymptotics.hpp"
#include "orrw/exact.hpp"
#include "orrw/genfun.hpp"
#include "orrw/montecarlo.hpp"
#include "orrw/rng.hpp"
#include "orrw/selftest.hpp"
#include "orrw/version.hpp"
#include "orrw/walk.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    json meta = json::object();
    std::vector<std::string> columns;
    std::vector<json> rows;  // objects keyed by column name

    void add_row(json row) { rows.push_back(std::move(row)); }
};

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return fmt17(v.get<double>());
    return v.dump();
}

void write_table(const Table& t, const std::string& format, std::ostream& out) {
    if (format == "json") {
        json doc;
        doc["meta"] = t.meta;
        doc["rows"] = json::array();
        for (const auto& r : t.rows) doc["rows"].push_back(r);
        out << doc.dump(2) << "\n";
        return;
    }
    for (auto it = t.meta.begin(); it != t.meta.end(); ++it)
        out << "# " << it.key() << "=" << csv_cell(it.value()) << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << t.columns[i] << (i + 1 < t.columns.size() ? "," : "\n");
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const auto it = r.find(t.columns[i]);
            out << (it != r.end() ? csv_cell(*it) : "")
                << (i + 1 < t.columns.size() ? "," : "\n");
        }
    }
}

struct CommonOpts {
    std::string format = "csv";
    std::string out_path;
    std::string c_text = "1";
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int threads = 0;
};

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", o.out_path, "Write output to this file instead of stdout");
}

void add_model_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--c", o.c_text,
                    "Reinforcement strength c > 0; \"3/4\" or a bare integer "
                    "keeps exact rational form")
        ->capture_default_str();
}

void add_seed_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "PCG64 seed")->capture_default_str();
    cmd->add_option("--stream", o.stream, "PCG64 base stream")->capture_default_str();
}

json base_meta(const std::string& command, const CommonOpts& o) {
    json meta;
    meta["version"] = orrw::version;
    meta["command"] = command;
    meta["rng"] = orrw::Pcg64::name();
    meta["c"] = o.c_text;
    return meta;
}

int emit(const Table& t, const CommonOpts& o) {
    if (o.out_path.empty()) {
        write_table(t, o.format, std::cout);
        return 0;
    }
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) {
        std::cerr << "orrw: cannot open " << o.out_path << " for writing\n";
        return 1;
    }
    write_table(t, o.format, f);
    return 0;
}

std::string source_name(orrw::mc::StudySource s) {
    return s == orrw::mc::StudySource::exact_dp ? "exact" : "mc";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"once-reinforced walk: exact laws, generating functions, "
                 "limit constants, Monte Carlo"};
    app.set_version_flag("--version", orrw::version);
    app.require_subcommand(1);

    // --- simulate -------------------------------------------------------------
    CommonOpts sim_o;
    std::int64_t sim_n = 1024, sim_reps = 1;
    bool sim_record = false;
    auto* sim = app.add_subcommand("simulate", "Simulate range trajectories");
    add_model_opts(sim, sim_o);
    add_seed_opts(sim, sim_o);
    add_output_opts(sim, sim_o);
    sim->add_option("--n", sim_n, "Number of steps")->check(CLI::PositiveNumber)
        ->capture_default_str();
    sim->add_option("--reps", sim_reps, "Independent replicates")
        ->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_flag("--record-range", sim_record,
                  "Emit (rep,time,range) range-increment events instead of finals");

    // --- exact ------------------------------------------------------------------
    CommonOpts ex_o;
    std::int64_t ex_nmax = 256;
    int ex_ellmax = 2;
    double ex_eps = 1e-14;
    bool ex_rising = false, ex_rational = false;
    std::vector<std::int64_t> ex_grid;
    auto* ex = app.add_subcommand("exact", "Exact range moments by distribution evolution");
    add_model_opts(ex, ex_o);
    add_output_opts(ex, ex_o);
    ex->add_option("--n-max", ex_nmax, "Evolve up to this horizon")
        ->check(CLI::PositiveNumber)->capture_default_str();
    ex->add_option("--n-grid", ex_grid,
                   "Report only these n (comma separated, ascending); default all")
        ->delimiter(',');
    ex->add_option("--ell-max", ex_ellmax, "Moments ell = 1..ell_max")
        ->check(CLI::Range(1, 8))->capture_default_str();
    ex->add_option("--eps-prune", ex_eps, "Per-row pruning threshold (double mode)")
        ->capture_default_str();
    ex->add_flag("--rising", ex_rising,
                 "Report rising moments E[R(R+1)...(R+ell)] instead of E[R^ell]");
    ex->add_flag("--rational", ex_rational,
                 "Exact rational engine (needs fractional --c, n <= 512)");

    // --- gf ---------------------------------------------------------------------
    CommonOpts gf_o;
    double gf_s = 0.5, gf_rel_tol = 1e-12;
    std::int64_t gf_x = 1, gf_a = 0, gf_b = 1, gf_k = 2;
    int gf_ell = 1;
    bool gf_allow_large_ell = false;
    auto* gf = app.add_subcommand("gf", "Evaluate a generating function at s");
    add_model_opts(gf, gf_o);
    add_output_opts(gf, gf_o);
    gf->add_option("--s", gf_s, "Evaluation point, 0 < s < 1")->required();
    gf->require_subcommand(1);
    auto* gf_root = gf->add_subcommand("root", "r_s, the root of r = (s/2)(r^2+1)");
    auto* gf_g = gf->add_subcommand("g", "E[s^tau]: reflected-walk return to x");
    gf_g->add_option("--x", gf_x, "Level x >= 1")->required();
    auto* gf_G = gf->add_subcommand("G", "E[s^T]: one frontier leg from range x");
    gf_G->add_option("--x", gf_x, "Level x >= 1")->required();
    auto* gf_hit = gf->add_subcommand("hitting",
                                      "E_x[s^T] for the fair walk, reflected at -a, "
                                      "absorbed at b");
    gf_hit->add_option("--a", gf_a, "Reflection at -a (a >= 0)")->required();
    gf_hit->add_option("--x", gf_x, "Start point in [-a, b]")->required();
    gf_hit->add_option("--b", gf_b, "Absorbing level")->required();
    auto* gf_sk = gf->add_subcommand("sk", "E[s^{S_k}], first time the range hits k");
    gf_sk->add_option("--k", gf_k, "Target range k >= 1")->required();
    auto* gf_h = gf->add_subcommand("h", "H_ell(s), the rising-moment transform");
    gf_h->add_option("--ell", gf_ell, "Order ell >= 0")->required();
    gf_h->add_option("--rel-tol", gf_rel_tol, "Series tail tolerance")
        ->capture_default_str();
    gf_h->add_flag("--allow-large-ell", gf_allow_large_ell,
                   "Lift the default cap ell <= 6");
    for (auto* sub : {gf_root, gf_g, gf_G, gf_hit, gf_sk, gf_h})
        sub->fallthrough();  // let --c / --format after the quantity reach gf

    // --- limits -------------------------------------------------------------------
    CommonOpts lim_o;
    int lim_ellmin = 1, lim_ellmax = 4;
    double lim_tol = 1e-12;
    auto* lim = app.add_subcommand("limits", "Limit constants J, K, M");
    add_model_opts(lim, lim_o);
    add_output_opts(lim, lim_o);
    lim->add_option("--ell-min", lim_ellmin, "First order (0 allowed: K only)")
        ->check(CLI::Range(0, 12))->capture_default_str();
    lim->add_option("--ell-max", lim_ellmax, "Last order")
        ->check(CLI::Range(0, 12))->capture_default_str();
    lim->add_option("--tol", lim_tol, "Quadrature tolerance")->capture_default_str();

    // --- converge --------------------------------------------------------------------
    CommonOpts cv_o;
    std::vector<std::int64_t> cv_grid{1000, 4000, 16000, 64000};
    int cv_ell = 1;
    std::string cv_source = "exact";
    std::int64_t cv_reps = 100000;
    double cv_eps = 1e-14;
    auto* cv = app.add_subcommand("converge",
                                  "Scaled moments against their limit over an n grid");
    add_model_opts(cv, cv_o);
    add_seed_opts(cv, cv_o);
    add_output_opts(cv, cv_o);
    cv->add_option("--n-grid", cv_grid, "Horizons (comma separated, ascending)")
        ->delimiter(',')->capture_default_str();
    cv->add_option("--ell", cv_ell, "Moment order")->check(CLI::Range(1, 8))
        ->capture_default_str();
    cv->add_option("--source", cv_source, "exact | mc")
        ->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
    cv->add_option("--reps", cv_reps, "Replicates per grid point (mc source)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cv->add_option("--eps-prune", cv_eps, "Pruning threshold (exact source)")
        ->capture_default_str();
    cv->add_option("--threads", cv_o.threads,
                   "Worker threads (0 = auto; ORRW_THREADS overrides)");

    // --- blowup -----------------------------------------------------------------------
    CommonOpts bl_o;
    std::vector<double> bl_grid{0.9, 0.99, 0.999};
    int bl_ell = 0;
    double bl_rel_tol = 1e-10;
    auto* bl = app.add_subcommand("blowup",
                                  "H_ell(s)(1-s)^{(ell+3)/2} / K_ell near s = 1");
    add_model_opts(bl, bl_o);
    add_output_opts(bl, bl_o);
    bl->add_option("--s-grid", bl_grid, "Evaluation points (ascending)")
        ->delimiter(',')->capture_default_str();
    bl->add_option("--ell", bl_ell, "Order ell >= 0")->check(CLI::Range(0, 6))
        ->capture_default_str();
    bl->add_option("--rel-tol", bl_rel_tol, "Base series tolerance")
        ->capture_default_str();

    // --- selftest ---------------------------------------------------------------------
    CommonOpts st_o{};
    st_o.seed = 42;
    auto* st = app.add_subcommand("selftest", "Deterministic self-check battery");
    st->add_option("--seed", st_o.seed, "Battery seed")->capture_default_str();
    st->add_option("--threads", st_o.threads,
                   "Worker threads (0 = auto; ORRW_THREADS overrides)");
    st->add_option("--out", st_o.out_path, "Write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            auto p = orrw::ReinforcementParams::parse(sim_o.c_text);
            Table t;
            t.meta = base_meta("simulate", sim_o);
            t.meta["seed"] = sim_o.seed;
            t.meta["stream"] = sim_o.stream;
            t.meta["n"] = sim_n;
            t.meta["reps"] = sim_reps;
            if (sim_record) {
                t.columns = {"rep", "time", "range"};
                for (std::int64_t rep = 0; rep < sim_reps; ++rep) {
                    const auto traj = orrw::simulate_range(
                        p, sim_n,
                        {sim_o.seed, sim_o.stream + static_cast<std::uint64_t>(rep)},
                        true);
                    for (const auto& inc : traj.increments)
                        t.add_row({{"rep", rep}, {"time", inc.time}, {"range", inc.range}});
                }
            } else {
                t.columns = {"rep", "n", "c", "range"};
                for (std::int64_t rep = 0; rep < sim_reps; ++rep) {
                    const auto traj = orrw::simulate_range(
                        p, sim_n,
                        {sim_o.seed, sim_o.stream + static_cast<std::uint64_t>(rep)});
                    t.add_row({{"rep", rep},
                               {"n", sim_n},
                               {"c", p.c()},
                               {"range", traj.final_range}});
                }
            }
            return emit(t, sim_o);
        }

        if (ex->parsed()) {
            auto p = orrw::ReinforcementParams::parse(ex_o.c_text);
            Table t;
            t.meta = base_meta("exact", ex_o);
            t.meta["n_max"] = ex_nmax;
            t.meta["observable"] = ex_rising ? "rising" : "power";
            t.meta["engine"] = ex_rational ? "rational" : "double";
            if (!ex_rational) t.meta["eps_prune"] = ex_eps;
            t.columns = {"n", "ell", "value", "error_bound"};

            std::vector<std::int64_t> grid = ex_grid;
            if (grid.empty())
                for (std::int64_t n = 1; n <= ex_nmax; ++n) grid.push_back(n);
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
                    throw std::invalid_argument(
                        "exact: --n-grid must be positive and strictly ascending");
            const std::int64_t horizon = grid.back();

            if (ex_rational) {
                if (horizon > orrw::exact::rational_n_cap)
                    throw std::invalid_argument(
                        "exact: rational engine supports n <= 512");
                auto d = orrw::exact::RationalDistribution::initial();
                std::size_t next = 0;
                for (std::int64_t n = 1; n <= horizon; ++n) {
                    d.evolve(p);
                    if (n != grid[next]) continue;
                    ++next;
                    for (int ell = 1; ell <= ex_ellmax; ++ell) {
                        const mpq_class v = ex_rising
                                                ? orrw::exact::rising_moment(d, ell)
                                                : orrw::exact::range_moment(d, ell);
                        t.add_row({{"n", n}, {"ell", ell}, {"value", v.get_d()},
                                   {"error_bound", 0.0}});
                    }
                }
            } else {
                auto d = orrw::exact::StateDistribution::initial();
                orrw::exact::DpOptions opt;
                opt.eps_prune = ex_eps;
                std::size_t next = 0;
                for (std::int64_t n = 1; n <= horizon; ++n) {
                    d.evolve(p, opt);
                    if (n != grid[next]) continue;
                    ++next;
                    for (int ell = 1; ell <= ex_ellmax; ++ell) {
                        const double v = ex_rising ? orrw::exact::rising_moment(d, ell)
                                                   : orrw::exact::range_moment(d, ell);
                        const double bound =
                            ex_rising ? orrw::exact::rising_moment_error_bound(d, ell)
                                      : orrw::exact::range_moment_error_bound(d, ell);
                        t.add_row({{"n", n}, {"ell", ell}, {"value", v},
                                   {"error_bound", bound}});
                    }
                }
            }
            return emit(t, ex_o);
        }

        if (gf->parsed()) {
            auto p = orrw::ReinforcementParams::parse(gf_o.c_text);
            orrw::genfun::EvalPoint s(gf_s);
            Table t;
            t.meta = base_meta("gf", gf_o);
            t.columns = {"quantity", "c", "s", "x", "a", "b", "k", "ell",
                         "value", "tail_bound", "terms_used"};
            json row{{"c", p.c()}, {"s", gf_s}};
            if (gf_root->parsed()) {
                row["quantity"] = "root_r";
                row["value"] = orrw::genfun::root_r(s);
            } else if (gf_g->parsed()) {
                row["quantity"] = "g";
                row["x"] = gf_x;
                row["value"] = orrw::genfun::g(gf_x, s);
            } else if (gf_G->parsed()) {
                row["quantity"] = "G";
                row["x"] = gf_x;
                row["value"] = orrw::genfun::G(gf_x, s, p);
            } else if (gf_hit->parsed()) {
                row["quantity"] = "hitting";
                row["a"] = gf_a;
                row["x"] = gf_x;
                row["b"] = gf_b;
                row["value"] = orrw::genfun::hitting_gf(gf_a, gf_x, gf_b, s);
            } else if (gf_sk->parsed()) {
                row["quantity"] = "s_k";
                row["k"] = gf_k;
                row["value"] = orrw::genfun::s_k_gf(gf_k, s, p);
            } else if (gf_h->parsed()) {
                if (!gf_allow_large_ell && gf_ell > 6)
                    throw std::invalid_argument(
                        "gf h: ell > 6 needs --allow-large-ell");
                const auto sv = orrw::genfun::h_ell(gf_ell, s, p, gf_rel_tol);
                row["quantity"] = "h_ell";
                row["ell"] = gf_ell;
                row["value"] = sv.value;
                row["tail_bound"] = sv.tail_bound;
                row["terms_used"] = sv.terms_used;
            }
            t.add_row(std::move(row));
            return emit(t, gf_o);
        }

        if (lim->parsed()) {
            auto p = orrw::ReinforcementParams::parse(lim_o.c_text);
            if (lim_ellmin > lim_ellmax)
                throw std::invalid_argument("limits: need ell-min <= ell-max");
            Table t;
            t.meta = base_meta("limits", lim_o);
            t.meta["tol"] = lim_tol;
            t.columns = {"ell", "c", "J", "K", "M", "quad_error"};
            for (int ell = lim_ellmin; ell <= lim_ellmax; ++ell) {
                const auto lc = orrw::asymptotics::limit_constants(p.c(), ell, lim_tol);
                t.add_row({{"ell", ell}, {"c", lc.c}, {"J", lc.J}, {"K", lc.K},
                           {"M", lc.M}, {"quad_error", lc.quad_error}});
            }
            return emit(t, lim_o);
        }

        if (cv->parsed()) {
            auto p = orrw::ReinforcementParams::parse(cv_o.c_text);
            const auto source = cv_source == "exact"
                                    ? orrw::mc::StudySource::exact_dp
                                    : orrw::mc::StudySource::monte_carlo;
            orrw::exact::DpOptions opt;
            opt.eps_prune = cv_eps;
            const auto rows = orrw::mc::convergence_study(
                p, cv_grid, cv_ell, source, cv_reps,
                {cv_o.seed, cv_o.stream}, cv_o.threads, opt);
            Table t;
            t.meta = base_meta("converge", cv_o);
            t.meta["seed"] = cv_o.seed;
            t.meta["stream"] = cv_o.stream;
            t.meta["source"] = cv_source;
            if (source == orrw::mc::StudySource::monte_carlo)
                t.meta["reps"] = cv_reps;
            else
                t.meta["eps_prune"] = cv_eps;
            t.columns = {"n", "ell", "c", "estimate", "stderr", "limit", "ratio",
                         "source"};
            for (const auto& r : rows)
                t.add_row({{"n", r.n}, {"ell", r.ell}, {"c", r.c},
                           {"estimate", r.estimate}, {"stderr", r.std_error},
                           {"limit", r.limit}, {"ratio", r.ratio},
                           {"source", source_name(r.source)}});
            return emit(t, cv_o);
        }

        if (bl->parsed()) {
            auto p = orrw::ReinforcementParams::parse(bl_o.c_text);
            const auto rows =
                orrw::asymptotics::blowup_check(bl_ell, p, bl_grid, bl_rel_tol);
            Table t;
            t.meta = base_meta("blowup", bl_o);
            t.meta["ell"] = bl_ell;
            t.columns = {"ell", "c", "s", "h", "tail_bound", "k_const", "ratio"};
            for (const auto& r : rows)
                t.add_row({{"ell", bl_ell}, {"c", p.c()}, {"s", r.s},
                           {"h", r.h_value}, {"tail_bound", r.h_tail_bound},
                           {"k_const", r.k_const}, {"ratio", r.ratio}});
            return emit(t, bl_o);
        }

        if (st->parsed()) {
            int failures = 0;
            if (st_o.out_path.empty()) {
                failures = orrw::run_selftest(std::cout, st_o.seed, st_o.threads);
            } else {
                std::ofstream f(st_o.out_path, std::ios::binary);
                if (!f) {
                    std::cerr << "orrw: cannot open " << st_o.out_path << "\n";
                    return 1;
                }
                failures = orrw::run_selftest(f, st_o.seed, st_o.threads);
            }
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "orrw: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "orrw: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
