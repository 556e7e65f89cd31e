#pragma once

#include <cmath>
#include <stdexcept>

#include "glduality/linalg.hpp"
#include "glduality/mesh.hpp"

namespace glduality {

// -gamma * discrete Laplacian with zero Dirichlet data: 3-point stencil in 1D,
// 5-point in 2D. Boundary neighbours read as zero.
inline Field apply_neg_laplacian(double gamma, const Field& u) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("apply_neg_laplacian: gamma must be >= 0");
    const Mesh& m = u.mesh;
    Field w(m);
    const double s = gamma / (m.h * m.h);
    if (m.dim == 1) {
        for (int i = 0; i < m.n; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;
            const double right = i + 1 < m.n ? u[i + 1] : 0.0;
            w[i] = s * (2.0 * u[i] - left - right);
        }
    } else {
        const int n = m.n;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int k = j * n + i;
                const double left = i > 0 ? u[k - 1] : 0.0;
                const double right = i + 1 < n ? u[k + 1] : 0.0;
                const double down = j > 0 ? u[k - n] : 0.0;
                const double up = j + 1 < n ? u[k + n] : 0.0;
                w[k] = s * (4.0 * u[k] - left - right - down - up);
            }
        }
    }
    return w;
}

// Quadratic form of the unit-coefficient stencil under the quadrature inner
// product; gamma/2 * dirichlet_energy(u) is the gradient term of the energy.
inline double dirichlet_energy(const Field& u) {
    return inner(u, apply_neg_laplacian(1.0, u));
}

// Smallest eigenvalue of the negative Laplacian stencil (unit coefficient).
inline double laplacian_min_eigenvalue(const Mesh& m) {
    const double s = std::sin(M_PI * m.h / (2.0 * m.length));
    const double lam1d = 4.0 / (m.h * m.h) * s * s;
    return m.dim == 1 ? lam1d : 2.0 * lam1d;
}

inline double laplacian_max_eigenvalue(const Mesh& m) {
    const double s = std::sin(M_PI * m.n * m.h / (2.0 * m.length));
    const double lam1d = 4.0 / (m.h * m.h) * s * s;
    return m.dim == 1 ? lam1d : 2.0 * lam1d;
}

// Dense matrix of d |-> k*d - gamma*laplacian(d) in the nodal basis.
inline DenseMatrix assemble_helmholtz(const Mesh& m, double gamma, double k) {
    const int n = m.size();
    DenseMatrix a(n, n);
    Field e(m);
    for (int j = 0; j < n; ++j) {
        e.v.assign(n, 0.0);
        e[j] = 1.0;
        Field col = apply_neg_laplacian(gamma, e);
        for (int i = 0; i < n; ++i) a(i, j) = col[i] + (i == j ? k : 0.0);
    }
    return a;
}

// Solves (k*I - gamma*laplacian) w = rhs. 1D uses direct tridiagonal
// elimination, 2D unpreconditioned CG (cap 10*n^2 iterations).
inline Field solve_helmholtz(double gamma, double k, const Field& rhs, double tol = 1e-12) {
    if (!(gamma >= 0.0) || !(k >= 0.0))
        throw std::invalid_argument("solve_helmholtz: gamma and k must be >= 0");
    if (gamma == 0.0 && k == 0.0)
        throw std::invalid_argument("solve_helmholtz: singular operator (gamma = 0 and k = 0)");
    const Mesh& m = rhs.mesh;
    if (gamma == 0.0) {
        Field w(m);
        for (int i = 0; i < m.size(); ++i) w[i] = rhs[i] / k;
        return w;
    }
    if (m.dim == 1) {
        const double s = gamma / (m.h * m.h);
        std::vector<double> lower(m.n > 1 ? m.n - 1 : 0, -s);
        std::vector<double> upper(m.n > 1 ? m.n - 1 : 0, -s);
        std::vector<double> diag(m.n, 2.0 * s + k);
        Field w(m, rhs.v);
        auto res = thomas_solve(lower, diag, upper, w.v);
        if (!res.ok) throw std::runtime_error("solve_helmholtz: elimination broke down");
        return w;
    }
    Field w(m);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        Field xf(m, x);
        Field ax = apply_neg_laplacian(gamma, xf);
        for (int i = 0; i < m.size(); ++i) y[i] = ax[i] + k * x[i];
    };
    const int cap = 10 * m.size() * m.size();
    auto res = cg_solve(apply, w.v, rhs.v, tol, cap);
    if (res.breakdown) throw std::runtime_error("solve_helmholtz: CG breakdown (operator not SPD)");
    if (!res.converged)
        throw std::runtime_error("solve_helmholtz: CG failed to converge (ill-conditioned system)");
    return w;
}

}  // namespace glduality
