#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "glduality/operators.hpp"
#include "glduality/rng.hpp"

using namespace glduality;

TEST_CASE("1d stencil on a unit bump") {
    Mesh m = build_mesh(1, 3, 1.0);  // h = 0.25
    Field u(m);
    u[1] = 1.0;
    Field w = apply_neg_laplacian(1.0, u);
    CHECK(w[0] == Catch::Approx(-16.0));
    CHECK(w[1] == Catch::Approx(32.0));
    CHECK(w[2] == Catch::Approx(-16.0));
}

TEST_CASE("stencil of the zero field is zero") {
    Mesh m = build_mesh(2, 5, 2.0);
    Field u(m);
    Field w = apply_neg_laplacian(3.0, u);
    for (int i = 0; i < w.size(); ++i) CHECK(w[i] == 0.0);
}

TEST_CASE("stencil is linear and self-adjoint in the quadrature inner product") {
    for (int dim : {1, 2}) {
        Mesh m = build_mesh(dim, dim == 1 ? 14 : 6, 1.0);
        CounterRng rng(3, dim);
        Field u = gaussian_field(m, rng);
        Field v = gaussian_field(m, rng);
        const double a = rng.gaussian(), b = rng.gaussian();
        Field lin = apply_neg_laplacian(2.0, a * u + b * v);
        Field ref = a * apply_neg_laplacian(2.0, u) + b * apply_neg_laplacian(2.0, v);
        for (int i = 0; i < m.size(); ++i) CHECK(lin[i] == Catch::Approx(ref[i]).margin(1e-12));

        const double lhs = inner(apply_neg_laplacian(2.0, u), v);
        const double rhs = inner(u, apply_neg_laplacian(2.0, v));
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }
}

TEST_CASE("smallest stencil eigenvalue matches the dense eigensolver") {
    Mesh m = build_mesh(1, 31, 1.0);
    DenseMatrix a = assemble_helmholtz(m, 1.0, 0.0);
    auto e = jacobi_eigen(a);
    const double lam = 4.0 / (m.h * m.h) * std::pow(std::sin(M_PI * m.h / 2.0), 2);
    CHECK(e.values.front() == Catch::Approx(lam).margin(1e-10));
    CHECK(laplacian_min_eigenvalue(m) == Catch::Approx(lam).margin(1e-12));
    CHECK(laplacian_max_eigenvalue(m) == Catch::Approx(e.values.back()).margin(1e-8));
}

TEST_CASE("helmholtz with gamma = 0 is diagonal") {
    Mesh m = build_mesh(1, 6, 1.0);
    CounterRng rng(11, 0);
    Field r = gaussian_field(m, rng);
    Field w = solve_helmholtz(0.0, 2.0, r);
    for (int i = 0; i < m.size(); ++i) CHECK(w[i] == r[i] / 2.0);
}

TEST_CASE("helmholtz solution inherits the symmetry of the data") {
    Mesh m = build_mesh(1, 15, 1.0);
    Field r(m);
    for (int i = 0; i < m.n; ++i) {
        const double x = m.coord(i);
        r[i] = std::exp(-20.0 * (x - 0.5) * (x - 0.5));
    }
    Field w = solve_helmholtz(1.0, 0.5, r);
    for (int i = 0; i < m.n / 2; ++i)
        CHECK(w[i] == Catch::Approx(w[m.n - 1 - i]).margin(1e-12));
}

TEST_CASE("1d helmholtz matches a dense direct solve") {
    Mesh m = build_mesh(1, 15, 1.0);
    CounterRng rng(17, 0);
    Field r = gaussian_field(m, rng);
    Field w = solve_helmholtz(1.0, 5.0, r);
    DenseMatrix a = assemble_helmholtz(m, 1.0, 5.0);
    auto w_ref = lu_solve(a, r.v);
    for (int i = 0; i < m.size(); ++i) CHECK(w[i] == Catch::Approx(w_ref[i]).margin(1e-10));
}

TEST_CASE("2d helmholtz matches a dense direct solve") {
    Mesh m = build_mesh(2, 5, 1.0);
    CounterRng rng(19, 0);
    Field r = gaussian_field(m, rng);
    Field w = solve_helmholtz(0.7, 2.0, r, 1e-13);
    DenseMatrix a = assemble_helmholtz(m, 0.7, 2.0);
    auto w_ref = lu_solve(a, r.v);
    for (int i = 0; i < m.size(); ++i) CHECK(w[i] == Catch::Approx(w_ref[i]).margin(1e-9));
}

TEST_CASE("solve and apply are two-sided inverses") {
    for (int dim : {1, 2}) {
        Mesh m = build_mesh(dim, dim == 1 ? 21 : 6, 1.0);
        CounterRng rng(23, dim);
        Field u = gaussian_field(m, rng);
        const double gamma = 1.3, k = 0.9;

        Field op_u = apply_neg_laplacian(gamma, u);
        axpy(op_u, k, u);
        Field back = solve_helmholtz(gamma, k, op_u, 1e-13);
        for (int i = 0; i < m.size(); ++i) CHECK(back[i] == Catch::Approx(u[i]).margin(1e-9));

        Field sol = solve_helmholtz(gamma, k, u, 1e-13);
        Field fwd = apply_neg_laplacian(gamma, sol);
        axpy(fwd, k, sol);
        for (int i = 0; i < m.size(); ++i) CHECK(fwd[i] == Catch::Approx(u[i]).margin(1e-9));
    }
}

TEST_CASE("helmholtz rejects the doubly singular operator") {
    Mesh m = build_mesh(1, 4, 1.0);
    Field r(m, 1.0);
    CHECK_THROWS_AS(solve_helmholtz(0.0, 0.0, r), std::invalid_argument);
}

TEST_CASE("dirichlet energy is the quadratic form of the stencil") {
    Mesh m = build_mesh(1, 10, 1.0);
    CounterRng rng(29, 0);
    Field u = gaussian_field(m, rng);
    CHECK(dirichlet_energy(u) == Catch::Approx(inner(u, apply_neg_laplacian(1.0, u))).margin(1e-13));
    CHECK(dirichlet_energy(u) >= 0.0);
}
