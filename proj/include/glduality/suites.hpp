#pragma once

#include <map>
#include <string>
#include <vector>

#include "glduality/config.hpp"
#include "glduality/duality_t1.hpp"
#include "glduality/exact_dual.hpp"
#include "glduality/penalty_pd.hpp"
#include "glduality/report.hpp"
#include "glduality/residual_pd.hpp"
#include "glduality/toland.hpp"
#include "glduality/util.hpp"

namespace glduality {

// Reports plus named file artifacts (CSV tables, solution fields) produced by
// one suite invocation.
struct SuiteRun {
    std::vector<CheckReport> reports;
    std::map<std::string, std::string> artifacts;

    bool all_pass() const {
        for (const auto& r : reports)
            if (!r.all_pass()) return false;
        return true;
    }
    bool premise_failed() const {
        for (const auto& r : reports)
            if (r.premise_failed()) return true;
        return false;
    }
};

namespace detail {

struct Problem {
    Mesh mesh;
    GLParams params;
    Field u0;
    SolveReport solve;
};

// Solve the primal problem of a config, optionally on a coarser companion
// mesh with the same source specification. The cap bounds the total degrees
// of freedom, so a planar mesh is reduced per axis.
inline Problem solve_problem(const ExperimentConfig& cfg, int dof_cap = 0) {
    ExperimentConfig c = cfg;
    if (dof_cap > 0) {
        const int per_axis =
            cfg.dim == 1 ? dof_cap
                         : std::max(1, static_cast<int>(std::floor(std::sqrt(double(dof_cap)))));
        c.n = std::min(cfg.n, per_axis);
    }
    Mesh m = make_mesh(c);
    GLParams p = make_params(c, m);
    auto [u0, rep] = newton_solve(p, Field(m), cfg.tol, cfg.max_iter);
    return Problem{m, std::move(p), std::move(u0), rep};
}

inline CheckReport premise_failure_report(const std::string& suite, const SolveReport& rep) {
    CheckReport out;
    out.suite = suite;
    out.add_premise("newton_converged", rep.final_residual, 1e-10);
    out.set_value("newton_iterations", rep.iterations);
    return out;
}

// single-node companion with the same model constants, trivial source
inline ExperimentConfig single_node_config(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.dim = 1;
    c.n = 1;
    c.length = 1.0;
    c.f_spec = "const:0";
    return c;
}

inline double headline_tol(const ExperimentConfig& cfg, const std::string& suite, double fallback) {
    auto it = cfg.suite_tol.find(suite);
    return it == cfg.suite_tol.end() ? fallback : it->second;
}

// Re-evaluates the named check against an overridden tolerance, keeping the
// pass predicate identical for serialization and exit-code logic.
inline void apply_tol_override(CheckReport& rep, const ExperimentConfig& cfg,
                               const std::string& suite, const std::string& check_name) {
    auto it = cfg.suite_tol.find(suite);
    if (it == cfg.suite_tol.end()) return;
    for (auto& c : rep.checks) {
        if (c.name == check_name) {
            c.tolerance = it->second;
            c.pass = c.residual <= c.tolerance;
        }
    }
}

}  // namespace detail

inline SuiteRun run_thm1(const ExperimentConfig& cfg) {
    SuiteRun out;
    auto main = detail::solve_problem(cfg);
    if (!main.solve.converged) {
        out.reports.push_back(detail::premise_failure_report("thm1", main.solve));
        return out;
    }
    auto small = detail::solve_problem(cfg, 8);
    RegParams r = make_reg(cfg, main.params, main.u0);
    CheckReport rep =
        verify_theorem1(main.params, r, main.u0, 100, cfg.seed, &small.params, &small.u0);
    detail::apply_tol_override(rep, cfg, "thm1", "duality_gap");
    rep.config_echo = cfg.echo();
    rep.config_echo["reg"]["K"] = r.k_big;
    rep.config_echo["reg"]["K1"] = r.k1;
    out.reports.push_back(std::move(rep));
    std::ostringstream os;
    write_field_csv(os, main.u0);
    out.artifacts["u0.csv"] = os.str();
    return out;
}

inline SuiteRun run_thm2(const ExperimentConfig& cfg) {
    SuiteRun out;
    // desk-scale problem for the full Hessian checks
    auto small = detail::solve_problem(cfg, 8);
    if (!small.solve.converged) {
        out.reports.push_back(detail::premise_failure_report("thm2", small.solve));
        return out;
    }
    RegParams r = make_reg(cfg, small.params, small.u0);
    r.k_big = 1e3;  // residual band constant of this formulation
    CheckReport rep = verify_theorem2(gl_dc_split(small.params), small.params, r, small.u0,
                                      cfg.seed, /*det_structure=*/false);
    detail::apply_tol_override(rep, cfg, "thm2", "hessian_psd");
    rep.config_echo = cfg.echo();
    out.reports.push_back(std::move(rep));

    // single-node instance carrying the determinant structure, merged into
    // the same report under a name prefix. The structure is model-independent
    // (the dual block is constant, the remainder order is generic), so the
    // probe runs on a fixed moderate-curvature reference where the second
    // differences keep the remainder above roundoff.
    ExperimentConfig c1 = detail::single_node_config(cfg);
    c1.gamma = c1.alpha = c1.beta = 1.0;
    c1.f_spec = "const:0.3";
    auto node = detail::solve_problem(c1);
    CheckReport& rep0 = out.reports.back();
    if (!node.solve.converged) {
        rep0.add_premise("single_node_newton_converged", node.solve.final_residual, 1e-10);
        return out;
    }
    CheckReport nrep =
        verify_theorem2(gl_dc_split(node.params), node.params, r, node.u0, cfg.seed);
    for (const auto& c : nrep.checks)
        rep0.checks.push_back({"single_node_" + c.name, c.residual, c.tolerance, c.pass});
    for (const auto& [k, v] : nrep.values) rep0.set_value("single_node_" + k, v);
    return out;
}

inline SuiteRun run_thm3(const ExperimentConfig& cfg) {
    SuiteRun out;
    auto main = detail::solve_problem(cfg);
    if (!main.solve.converged) {
        out.reports.push_back(detail::premise_failure_report("thm3-penalty", main.solve));
        return out;
    }
    RegParams r = make_reg(cfg, main.params, main.u0);
    auto [state, srep] = solve_kkt(main.params, r, Field(main.mesh), cfg.tol, cfg.max_iter);
    if (!srep.converged) {
        out.reports.push_back(detail::premise_failure_report("thm3-penalty", srep));
        return out;
    }
    CheckReport rep = verify_theorem3_penalty(main.params, r, state, -1.0, 200, cfg.seed);
    for (const char* c : {"kkt_residual_u", "kkt_residual_v0", "kkt_residual_constraint"})
        detail::apply_tol_override(rep, cfg, "thm3-penalty", c);
    rep.config_echo = cfg.echo();
    rep.config_echo["reg"]["K"] = r.k_big;

    // K1 sweep on the stiff single-node companion: the penalty eigenvalue
    // K1 - 1/K stays minimal there, so its growth is observable
    {
        const std::vector<double> k1s = {1e3, 1e4, 1e5};
        auto [pp, ss] = penalty_sweep_instance(k1s.back());
        RegParams rr = r;
        auto sweep = penalty_k1_sweep(pp, rr, ss, k1s);
        rep.set_value("k1_min_eig_slope", sweep.min_eig_slope);
        rep.set_value("k1_det_slope", sweep.det_slope);
        rep.add("k1_min_eig_scaling", std::abs(sweep.min_eig_slope - 1.0), 0.3);
        rep.add("k1_det_scaling", std::abs(sweep.det_slope - 1.0), 0.35);
    }
    out.reports.push_back(std::move(rep));
    return out;
}

inline SuiteRun run_toland(const ExperimentConfig& cfg) {
    SuiteRun out;
    auto main = detail::solve_problem(cfg, 32);
    if (!main.solve.converged) {
        out.reports.push_back(detail::premise_failure_report("toland", main.solve));
        return out;
    }
    RegParams r = make_reg(cfg, main.params, main.u0);
    CheckReport rep = verify_theorem_toland(main.params, r, main.u0, cfg.seed);
    detail::apply_tol_override(rep, cfg, "toland", "chain_JKstar");
    detail::apply_tol_override(rep, cfg, "toland", "chain_J1star");
    rep.config_echo = cfg.echo();

    // curvature scaling probes on the single-node companion; the swept K must
    // clear the instance curvature for the conjugate to enter its 1/K regime
    {
        ExperimentConfig c1 = detail::single_node_config(cfg);
        Mesh m1 = make_mesh(c1);
        GLParams p1 = make_params(c1, m1);
        DcSplit dc = gl_dc_split(p1);
        Field at(m1);
        at[0] = 0.8 * std::max(1.0, std::sqrt(cfg.beta));
        const double curv = dc.G.hess_apply(at, Field(m1, 1.0))[0];
        const double kb = std::max(1e2, 100.0 * curv);
        ProbeTable t = hessian_scaling_probe(dc, {kb, 10.0 * kb, 100.0 * kb},
                                             {1e-2, 1e-3, 1e-4}, at, 10.0);
        rep.set_value("probe_slope_d2G_vs_K", t.summary.at("slope_d2G_vs_K"));
        rep.set_value("probe_slope_d3G_vs_K", t.summary.at("slope_d3G_vs_K"));
        rep.add("probe_d2_scaling", std::abs(t.summary.at("slope_d2G_vs_K") + 1.0), 0.2);
        rep.add("probe_d3_scaling", std::abs(t.summary.at("slope_d3G_vs_K") + 3.0), 0.5);
        if (!t.degenerate) {
            rep.set_value("probe_slope_det_vs_eps", t.summary.at("slope_det_vs_eps"));
            rep.set_value("probe_det_eps2_coefficient", t.summary.at("det_eps2_coefficient"));
            rep.add("probe_det_scaling", std::abs(t.summary.at("slope_det_vs_eps") + 2.0), 0.2);
        } else {
            rep.add("probe_det_degenerate", 1.0, 0.5);
        }
        out.artifacts["probe_toland.csv"] = t.to_csv();
    }
    out.reports.push_back(std::move(rep));
    return out;
}

inline SuiteRun run_exact_dual(const ExperimentConfig& cfg) {
    SuiteRun out;
    auto grad_prob = detail::solve_problem(cfg, 32);
    if (!grad_prob.solve.converged) {
        out.reports.push_back(detail::premise_failure_report("exact-dual", grad_prob.solve));
        return out;
    }
    auto hess_prob = detail::solve_problem(cfg, 8);
    RegParams r = make_reg(cfg, grad_prob.params, grad_prob.u0);
    const double tol = detail::headline_tol(cfg, "exact-dual", 1e-6);
    CheckReport rep = verify_exactness(grad_prob.params, r, grad_prob.u0, tol, &hess_prob.params,
                                       &hess_prob.u0);
    rep.config_echo = cfg.echo();
    rep.config_echo["reg"]["K"] = r.k_big;
    out.reports.push_back(std::move(rep));
    return out;
}

inline SuiteRun run_biconj(const ExperimentConfig& cfg) {
    SuiteRun out;
    // config-derived single-node instance
    ExperimentConfig c1 = detail::single_node_config(cfg);
    c1.f_spec = cfg.f_spec.rfind("file:", 0) == 0 ? "const:0" : cfg.f_spec;
    Mesh m1 = make_mesh(c1);
    GLParams p1 = make_params(c1, m1);
    BiconjResult main = biconjugate_bruteforce(gl_dc_split(p1), -2.0, 2.0, 401);
    main.report.suite = "biconj";
    main.report.config_echo = cfg.echo();
    main.report.add("min_gap_absolute", std::abs(main.min_j - main.min_jss),
                    detail::headline_tol(cfg, "biconj", 1e-2));
    out.artifacts["biconj.csv"] = main.to_csv();

    // double-well reference: the envelope must dip strictly below the energy
    {
        Mesh m = build_mesh(1, 1, 1.0);
        GLParams p(0.01, 1.0, 1.0, Field(m));
        BiconjResult dw = biconjugate_bruteforce(gl_dc_split(p), -2.0, 2.0, 401);
        const int mid = static_cast<int>(dw.grid.size()) / 2;
        const double gap = dw.j_values[mid] - dw.jss_values[mid];
        main.report.set_value("doublewell_gap", gap);
        main.report.set_value("doublewell_resolution", dw.resolution);
        main.report.add("doublewell_strictly_below", dw.resolution - gap, 0.0);
        main.report.add("doublewell_min_equality", std::abs(dw.min_j - dw.min_jss), 1e-2);
    }
    // convex reference: envelope and energy coincide up to the resolution
    {
        Mesh m = build_mesh(1, 1, 1.0);
        GLParams p(1.0, 1.0, 1.0, Field(m));
        BiconjResult cv = biconjugate_bruteforce(gl_dc_split(p), -2.0, 2.0, 401);
        double worst = 0.0;
        for (std::size_t i = 0; i < cv.j_values.size(); ++i)
            worst = std::max(worst, cv.j_values[i] - cv.jss_values[i]);
        main.report.set_value("convex_case_max_gap", worst);
        main.report.add("convex_case_match", worst, 2.0 * cv.resolution);
    }
    out.reports.push_back(std::move(main.report));
    return out;
}

inline SuiteRun run_suite(const ExperimentConfig& cfg, const std::string& suite) {
    if (suite == "thm1") return run_thm1(cfg);
    if (suite == "thm2") return run_thm2(cfg);
    if (suite == "thm3-penalty") return run_thm3(cfg);
    if (suite == "toland") return run_toland(cfg);
    if (suite == "exact-dual") return run_exact_dual(cfg);
    if (suite == "biconj") return run_biconj(cfg);
    if (suite == "all") {
        SuiteRun out;
        for (const char* s : {"thm1", "thm2", "thm3-penalty", "toland", "exact-dual", "biconj"}) {
            SuiteRun one = run_suite(cfg, s);
            for (auto& r : one.reports) out.reports.push_back(std::move(r));
            for (auto& [k, v] : one.artifacts) out.artifacts[k] = std::move(v);
        }
        return out;
    }
    throw ConfigError("unknown suite '" + suite + "'");
}

// exit semantics: 0 all pass, 1 check failure, 2 usage error (thrown before
// this point), 3 solver premise failure
inline int exit_code(const std::vector<CheckReport>& reports) {
    bool fail = false;
    for (const auto& r : reports) {
        if (r.premise_failed()) return 3;
        if (!r.all_pass()) fail = true;
    }
    return fail ? 1 : 0;
}

// ---------------------------------------------------------------------------
// parameter sweeps

struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::map<std::string, double> slopes;  // log-log fits of |column| vs value

    std::string to_csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
        os << "# summary\n";
        for (const auto& [k, v] : slopes) os << "# slope," << k << ',' << format_double(v) << '\n';
        return os.str();
    }
};

inline const std::set<std::string>& sweepable_params() {
    static const std::set<std::string> s = {"K", "K1", "eps", "eps1", "gamma", "alpha", "beta", "n"};
    return s;
}

inline SweepTable sweep(const ExperimentConfig& cfg, const std::string& param,
                        const std::vector<double>& values) {
    if (!sweepable_params().count(param)) throw ConfigError("unknown sweep parameter '" + param + "'");
    if (values.empty()) throw ConfigError("empty sweep value list");

    SweepTable table;
    table.columns = {param,
                     "solve_iterations",
                     "solve_residual",
                     "J",
                     "duality_gap",
                     "thm1_max_residual",
                     "thm2_hessian_min_eig",
                     "thm3_kkt_max_residual",
                     "toland_chain_residual",
                     "toland_d2G",
                     "toland_d3G",
                     "toland_detJ1",
                     "exact_grad_max",
                     "exact_J3_max_eig",
                     "biconj_min_gap",
                     "all_pass",
                     "error"};
    table.rows.assign(values.size(), {});

    parallel_for(static_cast<int>(values.size()), [&](int row) {
        const double value = values[row];
        std::vector<std::string> cells(table.columns.size(), "");
        cells[0] = format_double(value);
        try {
            ExperimentConfig c = cfg;
            if (param == "K") c.k_big = value;
            else if (param == "K1") c.k1 = value;
            else if (param == "eps") c.eps = value;
            else if (param == "eps1") c.eps1 = value;
            else if (param == "gamma") c.gamma = value;
            else if (param == "alpha") c.alpha = value;
            else if (param == "beta") c.beta = value;
            else if (param == "n") {
                if (value < 1.0 || value != std::floor(value))
                    throw ConfigError("n sweep values must be positive integers");
                c.n = static_cast<int>(value);
            }

            auto main = detail::solve_problem(c);
            if (!main.solve.converged) throw std::runtime_error("solver did not converge");
            RegParams r = make_reg(c, main.params, main.u0);
            cells[1] = format_double(main.solve.iterations);
            cells[2] = format_double(main.solve.final_residual);
            const double J0 = eval_J(main.params, main.u0);
            cells[3] = format_double(J0);

            bool pass = true;

            {
                auto small = detail::solve_problem(c, 8);
                CheckReport t1 = verify_theorem1(main.params, r, main.u0, 50, c.seed,
                                                 &small.params, &small.u0);
                double worst = 0.0;
                for (const auto& ch : t1.checks)
                    if (ch.name.rfind("stationarity", 0) == 0) worst = std::max(worst, ch.residual);
                cells[4] = format_double(
                    std::abs(J0 - t1.values.at("Jstar")) / (1.0 + std::abs(J0)));
                cells[5] = format_double(worst);
                pass = pass && t1.all_pass();

                SuiteRun t2 = run_thm2(c);
                cells[6] = format_double(t2.reports.at(0).values.at("hessian_min_eig"));
                pass = pass && t2.all_pass();
            }
            {
                auto [state, srep] = solve_kkt(main.params, r, Field(main.mesh), c.tol, c.max_iter);
                auto res = kkt_residual_norms(main.params, r, state);
                cells[7] = format_double(std::max({res[0], res[1], res[2]}));
            }
            {
                auto t = detail::solve_problem(c, 32);
                CheckReport tl = verify_theorem_toland(t.params, r, t.u0, c.seed);
                cells[8] = format_double(std::abs(tl.values.at("J") - tl.values.at("JKstar")) /
                                         (1.0 + std::abs(tl.values.at("J"))));
                pass = pass && tl.all_pass();

                ExperimentConfig c1 = detail::single_node_config(c);
                Mesh m1 = make_mesh(c1);
                GLParams p1 = make_params(c1, m1);
                DcSplit dc = gl_dc_split(p1);
                Field at(m1);
                at[0] = 0.8 * std::max(1.0, std::sqrt(c.beta));
                DcSplit dcK = augment(dc, r.k_big);
                const double v_at = dcK.G.grad(at)[0];
                const double step = 1e-2 * (1.0 + std::abs(v_at));
                auto gstar = [&](double v) {
                    Field vf(m1), ui(m1);
                    vf[0] = v;
                    ui[0] = at[0];
                    return conjugate_eval(dcK.G, vf, ui).value;
                };
                cells[9] = format_double(fd_second_derivative(gstar, v_at, step));
                cells[10] = format_double(std::abs(fd_third_derivative(gstar, v_at, step)));
                cells[11] = format_double(j1star_det_single_node(dc, 10.0, c.eps, at[0]));
            }
            {
                auto g = detail::solve_problem(c, 32);
                auto h = detail::solve_problem(c, 8);
                CheckReport ex = verify_exactness(g.params, r, g.u0,
                                                  detail::headline_tol(c, "exact-dual", 1e-6),
                                                  &h.params, &h.u0);
                double worst = 0.0;
                for (const auto& ch : ex.checks)
                    if (ch.name.rfind("stationarity", 0) == 0) worst = std::max(worst, ch.residual);
                cells[12] = format_double(worst);
                cells[13] = format_double(ex.values.at("concavity_J3_max_eig"));
                pass = pass && ex.all_pass();
            }
            {
                SuiteRun b = run_biconj(c);
                cells[14] = format_double(
                    std::abs(b.reports[0].values.at("min_J") - b.reports[0].values.at("min_Jss")));
                pass = pass && b.all_pass();
            }
            cells[15] = pass ? "1" : "0";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (auto& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            cells[15] = "0";
            cells[16] = msg;
        }
        table.rows[row] = std::move(cells);
    });

    // log-log slope fits over the swept values for the scaling columns
    for (const char* col : {"toland_detJ1", "toland_d2G", "toland_d3G", "thm2_hessian_min_eig"}) {
        std::size_t ci = 0;
        for (; ci < table.columns.size(); ++ci)
            if (table.columns[ci] == col) break;
        std::vector<double> xs, ys;
        bool ok = values.size() >= 2;
        for (std::size_t i = 0; i < values.size() && ok; ++i) {
            const std::string& cell = table.rows[i][ci];
            if (cell.empty()) { ok = false; break; }
            const double y = std::strtod(cell.c_str(), nullptr);
            if (!(values[i] > 0.0) || !(std::abs(y) > 0.0)) { ok = false; break; }
            xs.push_back(values[i]);
            ys.push_back(std::abs(y));
        }
        if (ok) table.slopes[col] = loglog_slope(xs, ys);
    }
    return table;
}

}  // namespace glduality
