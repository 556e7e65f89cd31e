#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "glduality/primal.hpp"
#include "glduality/rng.hpp"

using namespace glduality;

namespace {

Field sin_pi_field(const Mesh& m, double amplitude = 1.0) {
    Field f(m);
    if (m.dim == 1) {
        for (int i = 0; i < m.n; ++i) f[i] = amplitude * std::sin(M_PI * m.coord(i));
    } else {
        for (int j = 0; j < m.n; ++j)
            for (int i = 0; i < m.n; ++i)
                f[j * m.n + i] =
                    amplitude * std::sin(M_PI * m.coord(i)) * std::sin(M_PI * m.coord(j));
    }
    return f;
}

// Test-side re-evaluation of the three energy terms with long double
// accumulation, kept independent of eval_J.
double quadrature_oracle_J(const GLParams& p, const Field& u) {
    const Mesh& m = u.mesh;
    long double grad = 0.0L;
    Field lap = apply_neg_laplacian(1.0, u);
    for (int i = 0; i < m.size(); ++i)
        grad += static_cast<long double>(u[i]) * static_cast<long double>(lap[i]);
    grad *= 0.5L * static_cast<long double>(p.gamma) * static_cast<long double>(m.weight);
    long double quart = 0.0L;
    for (int i = 0; i < m.size(); ++i) {
        const long double d = static_cast<long double>(u[i]) * u[i] - p.beta;
        quart += d * d;
    }
    quart *= 0.5L * static_cast<long double>(p.alpha) * static_cast<long double>(m.weight);
    long double src = 0.0L;
    for (int i = 0; i < m.size(); ++i)
        src += static_cast<long double>(u[i]) * static_cast<long double>(p.f[i]) *
               static_cast<long double>(m.weight);
    return static_cast<double>(grad + quart - src);
}

}  // namespace

TEST_CASE("J at zero is the constant well energy") {
    Mesh m = build_mesh(1, 8, 1.0);
    GLParams p(1.0, 2.0, 1.0, Field(m));
    Field zero(m);
    CHECK(eval_J(p, zero) == Catch::Approx(1.0).epsilon(1e-14));  // alpha beta^2 |Omega| / 2

    GLParams p2(1.0, 2.0, 1.0, sin_pi_field(m));
    CHECK(eval_J(p2, zero) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("J matches the independent quadrature oracle") {
    Mesh m = build_mesh(1, 8, 1.0);
    CounterRng rng(31, 0);
    GLParams p(0.7, 1.3, 0.9, gaussian_field(m, rng));
    for (int trial = 0; trial < 5; ++trial) {
        Field u = gaussian_field(m, rng);
        CHECK(eval_J(p, u) == Catch::Approx(quadrature_oracle_J(p, u)).margin(1e-12));
    }
}

TEST_CASE("gradient at zero") {
    Mesh m = build_mesh(1, 6, 1.0);
    GLParams p0(1.0, 1.0, 1.0, Field(m));
    Field zero(m);
    Field g = grad_J(p0, zero);
    for (int i = 0; i < m.size(); ++i) CHECK(g[i] == 0.0);

    CounterRng rng(37, 0);
    Field f = gaussian_field(m, rng);
    GLParams pf(1.0, 1.0, 1.0, f);
    Field gf = grad_J(pf, zero);
    for (int i = 0; i < m.size(); ++i) CHECK(gf[i] == -f[i]);
}

TEST_CASE("gradient matches central differences of J") {
    Mesh m = build_mesh(1, 12, 1.0);
    CounterRng rng(41, 0);
    GLParams p(0.8, 1.1, 1.2, gaussian_field(m, rng));
    const double t = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
        Field u = gaussian_field(m, rng);
        Field d = gaussian_field(m, rng);
        Field up = u, um = u;
        axpy(up, t, d);
        axpy(um, -t, d);
        const double fd = (eval_J(p, up) - eval_J(p, um)) / (2.0 * t);
        const double an = inner(grad_J(p, u), d);
        CHECK(std::abs(fd - an) <= 1e-6 * (1.0 + std::abs(eval_J(p, u))));
    }
}

TEST_CASE("hessian action matches central differences of the gradient") {
    Mesh m = build_mesh(1, 10, 1.0);
    CounterRng rng(43, 0);
    GLParams p(1.0, 1.0, 1.0, gaussian_field(m, rng));
    const double t = 1e-5;
    Field u = gaussian_field(m, rng);
    Field d = gaussian_field(m, rng);
    Field zero(m);
    Field hz = hess_J_apply(p, u, zero);
    for (int i = 0; i < m.size(); ++i) CHECK(hz[i] == 0.0);

    Field up = u, um = u;
    axpy(up, t, d);
    axpy(um, -t, d);
    Field fd = grad_J(p, up) - grad_J(p, um);
    Field hd = hess_J_apply(p, u, d);
    for (int i = 0; i < m.size(); ++i) {
        const double approx = fd[i] / (2.0 * t);
        CHECK(std::abs(approx - hd[i]) <= 1e-6 * (1.0 + std::abs(hd[i])));
    }
}

TEST_CASE("hessian at zero is the shifted stencil and is symmetric") {
    Mesh m = build_mesh(1, 9, 1.0);
    GLParams p(1.0, 1.5, 0.8, Field(m));
    Field zero(m);
    CounterRng rng(47, 0);
    Field d = gaussian_field(m, rng);
    Field hd = hess_J_apply(p, zero, d);
    Field ref = apply_neg_laplacian(p.gamma, d);
    axpy(ref, -2.0 * p.alpha * p.beta, d);
    for (int i = 0; i < m.size(); ++i) CHECK(hd[i] == Catch::Approx(ref[i]).margin(1e-13));

    Field u = gaussian_field(m, rng);
    Field d1 = gaussian_field(m, rng);
    Field d2 = gaussian_field(m, rng);
    CHECK(inner(hess_J_apply(p, u, d1), d2) ==
          Catch::Approx(inner(d1, hess_J_apply(p, u, d2))).margin(1e-10));
}

TEST_CASE("newton from a critical point returns immediately") {
    Mesh m = build_mesh(1, 16, 1.0);
    GLParams p(1.0, 1.0, 1.0, Field(m));
    auto [u0, rep] = newton_solve(p, Field(m));
    CHECK(rep.converged);
    CHECK(rep.iterations <= 1);
    CHECK(norm_l2(u0) == 0.0);
    REQUIRE_FALSE(rep.residual_history.empty());
}

TEST_CASE("newton solves the driven problem at n = 64") {
    Mesh m = build_mesh(1, 64, 1.0);
    GLParams p(1.0, 1.0, 1.0, sin_pi_field(m));
    auto [u0, rep] = newton_solve(p, Field(m), 1e-10, 100);
    REQUIRE(rep.converged);
    CHECK(rep.final_residual < 1e-10);
    CHECK(rep.iterations <= 30);
    for (std::size_t i = 1; i < rep.residual_history.size(); ++i)
        CHECK(rep.residual_history[i] <= rep.residual_history[i - 1] + 1e-16);

    // Independent corroboration: a plain gradient-descent run settles at the
    // same critical point.
    Field u = Field(m);
    const double step = 1.0 / laplacian_max_eigenvalue(m);  // stability limit of the stiff mode
    for (int it = 0; it < 40000; ++it) {
        Field g = grad_J(p, u);
        axpy(u, -step, g);
    }
    CHECK(norm_l2(u - u0) < 1e-6);
}

TEST_CASE("newton finds a kink profile for a shallow interface") {
    Mesh m = build_mesh(1, 64, 1.0);
    GLParams p(1e-2, 1.0, 1.0, Field(m));
    Field init(m);
    const double width = std::sqrt(p.gamma / (p.alpha * p.beta));
    for (int i = 0; i < m.n; ++i)
        init[i] = std::sqrt(p.beta) * std::tanh((m.coord(i) - 0.5) / width);
    auto [u0, rep] = newton_solve(p, init, 1e-10, 200);
    REQUIRE(rep.converged);
    CHECK(norm_inf(u0) <= std::sqrt(p.beta) + 0.1);
    CHECK(norm_inf(u0) >= 0.3);  // nontrivial
    CHECK(norm_l2(grad_J(p, u0)) <= 1e-10);
}

TEST_CASE("B+ and E+ membership") {
    Mesh m = build_mesh(1, 15, 1.0);
    GLParams p0(1.0, 1.0, 1.0, Field(m));
    CounterRng rng(53, 0);
    Field u = gaussian_field(m, rng);
    CHECK(in_B_plus(p0, u));  // f = 0 always qualifies

    const double lam = laplacian_min_eigenvalue(m);
    Field zero(m);
    {
        // 2 alpha beta below gamma lambda_min: second variation positive
        GLParams p(1.0, 1.0, 0.25 * lam / 2.0, Field(m));
        CHECK(in_E_plus(p, zero, 1e-10));
        CHECK(min_eig_hess_J(p, zero) ==
              Catch::Approx(lam - 2.0 * p.alpha * p.beta).margin(1e-8));
    }
    {
        GLParams p(1.0, 1.0, lam, Field(m));  // 2 alpha beta = 2 lam > lam
        CHECK_FALSE(in_E_plus(p, zero, 1e-10));
    }
}

TEST_CASE("parameter validation") {
    Mesh m = build_mesh(1, 3, 1.0);
    CHECK_THROWS_AS(GLParams(0.0, 1.0, 1.0, Field(m)), std::invalid_argument);
    CHECK_THROWS_AS(GLParams(1.0, -1.0, 1.0, Field(m)), std::invalid_argument);
    CHECK_THROWS_AS(GLParams(1.0, 1.0, 0.0, Field(m)), std::invalid_argument);
    RegParams r;
    r.eps1 = 1.5;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    RegParams r2;
    r2.k_big = 100.0;
    r2.k1 = 200.0;
    CHECK_THROWS_AS(r2.validate_separation(), std::invalid_argument);
}
