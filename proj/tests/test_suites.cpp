#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "glduality/suites.hpp"

using namespace glduality;

namespace {

ExperimentConfig trivial_config() {
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.n = 16;
    cfg.gamma = cfg.alpha = cfg.beta = 1.0;
    cfg.f_spec = "const:0";
    cfg.k_big = 100.0;
    cfg.k1 = 1e4;
    cfg.seed = 42;
    return cfg;
}

std::string serialize(const SuiteRun& run) {
    std::string s;
    for (const auto& r : run.reports) s += r.to_string();
    for (const auto& [k, v] : run.artifacts) s += k + "\n" + v;
    return s;
}

}  // namespace

TEST_CASE("every suite passes on the trivial config") {
    ExperimentConfig cfg = trivial_config();
    SuiteRun run = run_suite(cfg, "all");
    for (const auto& rep : run.reports) {
        INFO(rep.to_string());
        CHECK(rep.all_pass());
    }
    CHECK(exit_code(run.reports) == 0);
    CHECK(run.artifacts.count("u0.csv") == 1);
    CHECK(run.artifacts.count("probe_toland.csv") == 1);
    CHECK(run.artifacts.count("biconj.csv") == 1);
}

TEST_CASE("unknown suite raises a usage error") {
    ExperimentConfig cfg = trivial_config();
    CHECK_THROWS_AS(run_suite(cfg, "nosuch"), ConfigError);
}

TEST_CASE("solver premise failure maps to exit code 3") {
    ExperimentConfig cfg = trivial_config();
    cfg.max_iter = 1;
    cfg.f_spec = "sinpi";
    cfg.n = 64;
    SuiteRun run = run_suite(cfg, "thm1");
    REQUIRE_FALSE(run.reports.empty());
    CHECK(run.reports[0].premise_failed());
    CHECK(exit_code(run.reports) == 3);
}

TEST_CASE("suite outputs are byte-identical across runs and thread counts") {
    ExperimentConfig cfg = trivial_config();
    const std::string a = serialize(run_suite(cfg, "thm1"));
    const std::string b = serialize(run_suite(cfg, "thm1"));
    CHECK(a == b);

    setenv("GLDUALITY_THREADS", "4", 1);
    const std::string c = serialize(run_suite(cfg, "thm1"));
    unsetenv("GLDUALITY_THREADS");
    CHECK(a == c);
}

TEST_CASE("sweep of a single value matches the standalone suite summary") {
    ExperimentConfig cfg = trivial_config();
    SweepTable t = sweep(cfg, "K", {100.0});
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.rows[0].size() == t.columns.size());
    CHECK(t.rows[0][0] == "100");
    CHECK(t.rows[0][t.columns.size() - 2] == "1");  // all_pass
    CHECK(t.rows[0].back().empty());                // no error

    // J value in the table equals a direct evaluation
    Mesh m = make_mesh(cfg);
    GLParams p = make_params(cfg, m);
    auto [u0, rep] = newton_solve(p, Field(m));
    const double J0 = eval_J(p, u0);
    CHECK(std::stod(t.rows[0][3]) == Catch::Approx(J0).margin(1e-14));
}

TEST_CASE("empty sweep list is a usage error") {
    ExperimentConfig cfg = trivial_config();
    CHECK_THROWS_AS(sweep(cfg, "K", {}), ConfigError);
    CHECK_THROWS_AS(sweep(cfg, "nosuch", {1.0}), ConfigError);
}

TEST_CASE("eps sweep recovers the inverse-square determinant scaling") {
    ExperimentConfig cfg;
    cfg.dim = 1;
    cfg.n = 1;
    cfg.gamma = 1000.0;
    cfg.alpha = 1.0;
    cfg.beta = 0.01;
    cfg.f_spec = "const:0";
    cfg.k_big = 10.0;
    cfg.k1 = 1000.0;
    SweepTable t = sweep(cfg, "eps", {1e-1, 1e-2, 1e-3});
    INFO(t.to_csv());
    REQUIRE(t.slopes.count("toland_detJ1") == 1);
    CHECK(t.slopes.at("toland_detJ1") == Catch::Approx(-2.0).margin(0.2));
}

TEST_CASE("per-row failures are recorded in-row and the sweep continues") {
    ExperimentConfig cfg = trivial_config();
    // beta = -1 violates the model constraints for that row only
    SweepTable t = sweep(cfg, "beta", {1.0, -1.0});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].back().empty());
    CHECK_FALSE(t.rows[1].back().empty());
    CHECK(t.rows[1][t.columns.size() - 2] == "0");
}
