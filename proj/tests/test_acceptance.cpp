// Acceptance gate: one test case per criterion, each printing a PASS/FAIL
// line with the governing residuals. Tolerances are pinned here, in code.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "glduality/suites.hpp"

using namespace glduality;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void announce(const char* id, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ": " << detail << std::endl;
}

Field sin_pi_field(const Mesh& m) {
    Field f(m);
    for (int i = 0; i < m.n; ++i) f[i] = std::sin(M_PI * m.coord(i));
    return f;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.n = 64;
    cfg.length = 1.0;
    cfg.gamma = cfg.alpha = cfg.beta = 1.0;
    cfg.f_spec = "sinpi";
    cfg.k_big = 100.0;
    cfg.k1 = 1e4;
    cfg.eps = 1e-3;
    cfg.eps1 = 1e-2;
    cfg.seed = 42;
    return cfg;
}

const Check& find_check(const CheckReport& rep, const std::string& name) {
    for (const auto& c : rep.checks)
        if (c.name == name) return c;
    throw std::runtime_error("missing check: " + name);
}

}  // namespace

TEST_CASE("criterion 1: calculus layer") {
    Stopwatch sw;
    Mesh m = build_mesh(1, 32, 1.0);
    CounterRng rng(2024, 0);
    GLParams p(1.0, 1.0, 1.0, gaussian_field(m, rng));
    const double t = 1e-5;
    double worst_grad = 0.0, worst_hess = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Field u = gaussian_field(m, rng);
        Field d = gaussian_field(m, rng);
        Field up = u, um = u;
        axpy(up, t, d);
        axpy(um, -t, d);
        const double fd = (eval_J(p, up) - eval_J(p, um)) / (2.0 * t);
        const double an = inner(grad_J(p, u), d);
        worst_grad = std::max(worst_grad, std::abs(fd - an) / (1.0 + std::abs(an)));

        Field gfd = grad_J(p, up) - grad_J(p, um);
        Field hd = hess_J_apply(p, u, d);
        for (int i = 0; i < m.size(); ++i)
            worst_hess = std::max(worst_hess,
                                  std::abs(gfd[i] / (2.0 * t) - hd[i]) / (1.0 + std::abs(hd[i])));
    }

    double worst_adj = 0.0, worst_inv = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        Field u = gaussian_field(m, rng);
        Field v = gaussian_field(m, rng);
        worst_adj = std::max(worst_adj, std::abs(inner(apply_neg_laplacian(1.3, u), v) -
                                                 inner(u, apply_neg_laplacian(1.3, v))));
        Field op_u = apply_neg_laplacian(1.3, u);
        axpy(op_u, 0.7, u);
        Field back = solve_helmholtz(1.3, 0.7, op_u, 1e-13);
        worst_inv = std::max(worst_inv, norm_inf(back - u));
    }

    const bool pass = worst_grad <= 1e-6 && worst_hess <= 1e-6 && worst_adj <= 1e-10 &&
                      worst_inv <= 1e-10 && sw.seconds() < 5.0;
    announce("criterion 1", pass,
             "grad fd " + format_double(worst_grad) + ", hess fd " + format_double(worst_hess) +
                 ", self-adjointness " + format_double(worst_adj) + ", inverse round-trip " +
                 format_double(worst_inv) + ", " + format_double(sw.seconds()) + " s");
    CHECK(worst_grad <= 1e-6);
    CHECK(worst_hess <= 1e-6);
    CHECK(worst_adj <= 1e-10);
    CHECK(worst_inv <= 1e-10);
    CHECK(sw.seconds() < 5.0);
}

TEST_CASE("criterion 2: primal solve") {
    Mesh m = build_mesh(1, 64, 1.0);
    GLParams p(1.0, 1.0, 1.0, sin_pi_field(m));
    auto [u0, rep] = newton_solve(p, Field(m), 1e-10, 100);
    const bool pass = rep.converged && rep.iterations <= 30 && norm_l2(grad_J(p, u0)) <= 1e-10;
    announce("criterion 2", pass,
             "converged in " + std::to_string(rep.iterations) + " iterations, residual " +
                 format_double(rep.final_residual));
    CHECK(rep.converged);
    CHECK(rep.iterations <= 30);
    CHECK(norm_l2(grad_J(p, u0)) <= 1e-10);
}

TEST_CASE("criterion 3: convex dual suite") {
    Stopwatch sw;
    ExperimentConfig cfg = default_config();
    SuiteRun run = run_thm1(cfg);
    REQUIRE(run.reports.size() == 1);
    const CheckReport& rep = run.reports[0];
    INFO(rep.to_string());

    bool pass = rep.all_pass();
    for (const char* name : {"stationarity_v1", "stationarity_v2", "stationarity_v0",
                             "stationarity_z"})
        pass = pass && find_check(rep, name).residual <= 1e-8;
    pass = pass && find_check(rep, "stationarity_u_Astar").residual == 0.0;
    pass = pass && find_check(rep, "feasibility_Bstar").residual == 0.0;
    pass = pass && find_check(rep, "duality_gap").residual <= 1e-8;
    pass = pass && find_check(rep, "proximal_inequality").residual <= 1e-10;
    pass = pass && rep.values.at("concavity_max_eig") <= 1e-8;
    pass = pass && sw.seconds() < 30.0;
    announce("criterion 3", pass,
             "gap " + format_double(find_check(rep, "duality_gap").residual) +
                 ", proximal slack " + format_double(rep.values.at("proximal_min_slack")) +
                 ", block max eig " + format_double(rep.values.at("concavity_max_eig")) + ", " +
                 format_double(sw.seconds()) + " s");
    CHECK(rep.all_pass());
    CHECK(find_check(rep, "stationarity_u_Astar").residual == 0.0);
    CHECK(find_check(rep, "feasibility_Bstar").residual == 0.0);
    CHECK(rep.values.at("concavity_max_eig") <= 1e-8);
    CHECK(sw.seconds() < 30.0);
}

TEST_CASE("criterion 4: residual dual suite") {
    ExperimentConfig cfg = default_config();
    SuiteRun run = run_thm2(cfg);
    REQUIRE(run.reports.size() == 1);
    const CheckReport& rep = run.reports[0];
    INFO(rep.to_string());

    const bool zero_min = rep.values.at("value_at_optimum") <= 1e-20;
    const bool det_exact = find_check(rep, "single_node_vblock_det_exact").residual == 0.0;
    const bool psd = rep.values.at("hessian_min_eig") >= -1e-8;
    const double slope = rep.values.at("single_node_det_remainder_slope");
    const bool slope_ok = std::abs(slope + 1.0) <= 0.2;
    const bool pass = rep.all_pass() && zero_min && det_exact && psd && slope_ok;
    announce("criterion 4", pass,
             "value at optimum " + format_double(rep.values.at("value_at_optimum")) +
                 ", dual block det exact, hessian min eig " +
                 format_double(rep.values.at("hessian_min_eig")) + ", remainder slope " +
                 format_double(slope));
    CHECK(rep.all_pass());
    CHECK(zero_min);
    CHECK(det_exact);
    CHECK(psd);
    CHECK(slope_ok);
}

TEST_CASE("criterion 5: penalty dual suite") {
    ExperimentConfig cfg = default_config();
    SuiteRun run = run_thm3(cfg);
    REQUIRE(run.reports.size() == 1);
    const CheckReport& rep = run.reports[0];
    INFO(rep.to_string());

    bool pass = rep.all_pass();
    for (const char* name : {"kkt_residual_u", "kkt_residual_v0", "kkt_residual_constraint"})
        pass = pass && find_check(rep, name).residual <= 1e-8;
    pass = pass && find_check(rep, "multiplier_identity").residual <= 1e-8;
    pass = pass && find_check(rep, "neg_control_lambda_detected").pass;
    pass = pass && find_check(rep, "value_chain_lagrangian").residual <= 1e-10;
    pass = pass && find_check(rep, "value_chain_J").residual <= 1e-10;
    const double slope = rep.values.at("k1_min_eig_slope");
    pass = pass && std::abs(slope - 1.0) <= 0.3;
    announce("criterion 5", pass,
             "kkt residual " + format_double(find_check(rep, "kkt_residual_u").residual) +
                 ", multiplier identity " +
                 format_double(find_check(rep, "multiplier_identity").residual) +
                 ", min-eig slope in K1 " + format_double(slope));
    CHECK(rep.all_pass());
    CHECK(std::abs(slope - 1.0) <= 0.3);
}

TEST_CASE("criterion 6: toland suite") {
    ExperimentConfig cfg = default_config();
    SuiteRun run = run_toland(cfg);
    REQUIRE(run.reports.size() == 1);
    const CheckReport& rep = run.reports[0];
    INFO(rep.to_string());

    bool pass = rep.all_pass();
    pass = pass && find_check(rep, "chain_JKstar").residual <= 1e-7;
    pass = pass && find_check(rep, "chain_J1star").residual <= 1e-7;
    const double s2 = rep.values.at("probe_slope_d2G_vs_K");
    const double s3 = rep.values.at("probe_slope_d3G_vs_K");
    const double sd = rep.values.at("probe_slope_det_vs_eps");
    const double c2 = rep.values.at("probe_det_eps2_coefficient");
    pass = pass && std::abs(s2 + 1.0) <= 0.2 && std::abs(s3 + 3.0) <= 0.5 &&
           std::abs(sd + 2.0) <= 0.2;
    // the fitted 1/eps^2 coefficient resolves the constant: close to 3 (A-B)^2
    // and away from 2 (A-B)^2
    pass = pass && std::abs(c2 - 3.0) < std::abs(c2 - 2.0);
    announce("criterion 6", pass,
             "chain " + format_double(find_check(rep, "chain_JKstar").residual) + ", slopes " +
                 format_double(s2) + " / " + format_double(s3) + " / " + format_double(sd) +
                 ", det eps^-2 coefficient " + format_double(c2) + " (reported against 2 and 3)");
    CHECK(rep.all_pass());
    CHECK(std::abs(s2 + 1.0) <= 0.2);
    CHECK(std::abs(s3 + 3.0) <= 0.5);
    CHECK(std::abs(sd + 2.0) <= 0.2);
    CHECK(std::abs(c2 - 3.0) < std::abs(c2 - 2.0));
}

TEST_CASE("criterion 7: biconjugate oracle") {
    Mesh m = build_mesh(1, 1, 1.0);
    {
        GLParams p(1.0, 1.0, 1.0, Field(m));
        BiconjResult b = biconjugate_bruteforce(gl_dc_split(p), -2.0, 2.0, 401);
        double worst = -1e300;
        for (std::size_t i = 0; i < b.j_values.size(); ++i)
            worst = std::max(worst, b.jss_values[i] - b.j_values[i]);
        CHECK(worst <= 1e-9);
        CHECK(std::abs(b.min_j - b.min_jss) <= 1e-2);
    }
    GLParams pw(0.01, 1.0, 1.0, Field(m));
    BiconjResult dw = biconjugate_bruteforce(gl_dc_split(pw), -2.0, 2.0, 401);
    double worst = -1e300;
    for (std::size_t i = 0; i < dw.j_values.size(); ++i)
        worst = std::max(worst, dw.jss_values[i] - dw.j_values[i]);
    const int mid = static_cast<int>(dw.grid.size()) / 2;
    const double gap = dw.j_values[mid] - dw.jss_values[mid];
    const bool pass = worst <= 1e-9 && std::abs(dw.min_j - dw.min_jss) <= 1e-2 &&
                      gap >= dw.resolution;
    announce("criterion 7", pass,
             "minorant excess " + format_double(std::max(0.0, worst)) + ", min gap " +
                 format_double(std::abs(dw.min_j - dw.min_jss)) + ", double-well separation " +
                 format_double(gap) + " >= resolution " + format_double(dw.resolution));
    CHECK(worst <= 1e-9);
    CHECK(std::abs(dw.min_j - dw.min_jss) <= 1e-2);
    CHECK(gap >= dw.resolution);
}

TEST_CASE("criterion 8: exact dual suite") {
    ExperimentConfig cfg = default_config();
    SuiteRun run = run_exact_dual(cfg);
    REQUIRE(run.reports.size() == 1);
    const CheckReport& rep = run.reports[0];
    INFO(rep.to_string());

    bool pass = rep.all_pass();
    pass = pass && find_check(rep, "stationarity_J2").residual <= 1e-6;
    pass = pass && find_check(rep, "stationarity_J3").residual <= 1e-6;
    pass = pass && find_check(rep, "penalty_decomposition").residual <= 1e-12;
    pass = pass && find_check(rep, "j3_below_j2").residual == 0.0;
    pass = pass && rep.values.at("concavity_J3_max_eig") <= 1e-8;
    pass = pass && find_check(rep, "neg_control_k1_detected").pass;
    announce("criterion 8", pass,
             "stationarity " + format_double(find_check(rep, "stationarity_J2").residual) +
                 " / " + format_double(find_check(rep, "stationarity_J3").residual) +
                 ", extension max eig " + format_double(rep.values.at("concavity_J3_max_eig")) +
                 ", dropped-separation control max eig " +
                 format_double(rep.values.at("neg_control_k1_max_eig")));
    CHECK(rep.all_pass());
    CHECK(rep.values.at("concavity_J3_max_eig") <= 1e-8);
    CHECK(find_check(rep, "neg_control_k1_detected").pass);
}

TEST_CASE("criterion 9: orchestration") {
    ExperimentConfig cfg = default_config();
    auto serialize = [](const SuiteRun& run) {
        std::string s;
        for (const auto& r : run.reports) s += r.to_string();
        for (const auto& [k, v] : run.artifacts) s += k + "\n" + v;
        return s;
    };
    Stopwatch sw;
    SuiteRun first = run_suite(cfg, "all");
    const double elapsed = sw.seconds();
    const std::string a = serialize(first);
    const std::string b = serialize(run_suite(cfg, "all"));
    setenv("GLDUALITY_THREADS", "4", 1);
    const std::string c = serialize(run_suite(cfg, "all"));
    unsetenv("GLDUALITY_THREADS");

    const bool pass = exit_code(first.reports) == 0 && elapsed < 120.0 && a == b && a == c;
    announce("criterion 9", pass,
             "verify all in " + format_double(elapsed) + " s single-threaded, outputs byte-identical"
             " across runs and thread counts");
    CHECK(exit_code(first.reports) == 0);
    CHECK(elapsed < 120.0);
    CHECK(a == b);
    CHECK(a == c);
}
