#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glduality/linalg.hpp"
#include "glduality/mesh.hpp"
#include "glduality/operators.hpp"

namespace glduality {

// Model constants of the energy
//   J(u) = gamma/2 int |grad u|^2 + alpha/2 int (u^2 - beta)^2 - <u,f>.
struct GLParams {
    double gamma;
    double alpha;
    double beta;
    Field f;

    GLParams(double gamma_, double alpha_, double beta_, Field f_)
        : gamma(gamma_), alpha(alpha_), beta(beta_), f(std::move(f_)) {
        if (!(gamma > 0.0)) throw std::invalid_argument("GLParams: gamma must be > 0");
        if (!(alpha > 0.0)) throw std::invalid_argument("GLParams: alpha must be > 0");
        if (!(beta > 0.0)) throw std::invalid_argument("GLParams: beta must be > 0");
        if (!f.finite()) throw std::invalid_argument("GLParams: source field must be finite");
    }
};

// Regularization constants shared by the dual formulations: K (proximal and
// augmentation weight), K1 (constraint penalty), eps / eps1 (coupling
// constants), K3 (sup-norm bound used by the conjugate machinery).
struct RegParams {
    double k_big = 100.0;
    double k1 = 1e4;
    double eps = 1e-3;
    double eps1 = 1e-2;
    double k3 = 10.0;

    void validate() const {
        if (!(k_big > 0.0)) throw std::invalid_argument("RegParams: K must be > 0");
        if (!(k1 > 0.0)) throw std::invalid_argument("RegParams: K1 must be > 0");
        if (!(eps > 0.0)) throw std::invalid_argument("RegParams: eps must be > 0");
        if (!(eps1 > 0.0 && eps1 < 1.0))
            throw std::invalid_argument("RegParams: eps1 must lie in (0,1)");
        if (!(k3 > 0.0)) throw std::invalid_argument("RegParams: K3 must be > 0");
    }

    // The penalty and exact-dual formulations additionally assume a clear
    // separation K1 >> K >> 1.
    void validate_separation() const {
        validate();
        if (k_big < 10.0) throw std::invalid_argument("RegParams: need K >= 10");
        if (k1 < 10.0 * k_big) throw std::invalid_argument("RegParams: need K1 >= 10*K");
    }
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    double final_residual = 0.0;
};

inline double eval_J(const GLParams& p, const Field& u) {
    require_same_mesh(p.f, u, "eval_J");
    const double grad_term = 0.5 * p.gamma * dirichlet_energy(u);
    double quartic = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const double d = u[i] * u[i] - p.beta;
        quartic += d * d;
    }
    quartic *= 0.5 * p.alpha * u.mesh.weight;
    return grad_term + quartic - inner(u, p.f);
}

// Pointwise Euler-Lagrange residual -gamma*lap(u) + 2*alpha*(u^2-beta)*u - f.
// Returned in function form: the directional derivative of eval_J along d is
// inner(grad_J(u), d).
inline Field grad_J(const GLParams& p, const Field& u) {
    require_same_mesh(p.f, u, "grad_J");
    Field g = apply_neg_laplacian(p.gamma, u);
    for (int i = 0; i < u.size(); ++i)
        g[i] += 2.0 * p.alpha * (u[i] * u[i] - p.beta) * u[i] - p.f[i];
    return g;
}

// Second variation applied to a direction: (-gamma*lap + 2*alpha*(3u^2-beta)) d.
inline Field hess_J_apply(const GLParams& p, const Field& u, const Field& d) {
    require_same_mesh(p.f, u, "hess_J_apply");
    require_same_mesh(u, d, "hess_J_apply");
    Field w = apply_neg_laplacian(p.gamma, d);
    for (int i = 0; i < u.size(); ++i)
        w[i] += 2.0 * p.alpha * (3.0 * u[i] * u[i] - p.beta) * d[i];
    return w;
}

inline DenseMatrix assemble_hess_J(const GLParams& p, const Field& u) {
    const int n = u.size();
    DenseMatrix h(n, n);
    Field e(u.mesh);
    for (int j = 0; j < n; ++j) {
        e.v.assign(n, 0.0);
        e[j] = 1.0;
        Field col = hess_J_apply(p, u, e);
        for (int i = 0; i < n; ++i) h(i, j) = col[i];
    }
    return h;
}

inline double min_eig_hess_J(const GLParams& p, const Field& u) {
    return min_eigenvalue(assemble_hess_J(p, u));
}

namespace detail {

// Solves (hess_J(u) + mu I) step = -g. Direct tridiagonal elimination in 1D
// with a pivot-sign check, CG in 2D with breakdown detection. Returns false
// when the shifted operator is not positive definite.
inline bool newton_step(const GLParams& p, const Field& u, const Field& g, double mu, Field& step) {
    const Mesh& m = u.mesh;
    if (m.dim == 1) {
        const double s = p.gamma / (m.h * m.h);
        std::vector<double> lower(m.n > 1 ? m.n - 1 : 0, -s);
        std::vector<double> upper(m.n > 1 ? m.n - 1 : 0, -s);
        std::vector<double> diag(m.n);
        for (int i = 0; i < m.n; ++i)
            diag[i] = 2.0 * s + 2.0 * p.alpha * (3.0 * u[i] * u[i] - p.beta) + mu;
        step = Field(m);
        for (int i = 0; i < m.n; ++i) step[i] = -g[i];
        auto res = thomas_solve(lower, diag, upper, step.v);
        return res.ok && res.positive_pivots;
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        Field xf(m, x);
        Field hx = hess_J_apply(p, u, xf);
        for (int i = 0; i < m.size(); ++i) y[i] = hx[i] + mu * x[i];
    };
    std::vector<double> rhs(m.size());
    for (int i = 0; i < m.size(); ++i) rhs[i] = -g[i];
    step = Field(m);
    auto res = cg_solve(apply, step.v, rhs, 1e-12, 10 * m.size() * m.size());
    return !res.breakdown && res.converged;
}

}  // namespace detail

// Damped Newton on grad_J = 0 with Armijo backtracking on ||grad_J||_2.
// Hessian solves are regularized by +mu*I, with mu doubled from 1e-8 whenever
// positive definiteness fails or the line search stalls.
inline std::pair<Field, SolveReport> newton_solve(const GLParams& p, const Field& u_init,
                                                  double tol = 1e-10, int max_iter = 100) {
    if (!(tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be > 0");
    require_same_mesh(p.f, u_init, "newton_solve");
    Field u = u_init;
    SolveReport rep;
    Field g = grad_J(p, u);
    double res = norm_l2(g);
    rep.residual_history.push_back(res);
    for (int it = 0; it < max_iter && res > tol; ++it) {
        double mu = 0.0;
        Field step(u.mesh);
        bool accepted = false;
        while (!accepted) {
            bool pd = detail::newton_step(p, u, g, mu, step);
            if (pd) {
                double t = 1.0;
                for (int ls = 0; ls < 40; ++ls) {
                    Field trial = u;
                    axpy(trial, t, step);
                    const double trial_res = norm_l2(grad_J(p, trial));
                    if (trial_res <= (1.0 - 1e-4 * t) * res) {
                        u = trial;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if (!accepted) {
                mu = (mu == 0.0 ? 1e-8 : 2.0 * mu);
                if (mu > 1e16) break;  // give up on this iterate
            }
        }
        if (!accepted) break;
        g = grad_J(p, u);
        res = norm_l2(g);
        rep.residual_history.push_back(res);
        rep.iterations = it + 1;
    }
    rep.final_residual = res;
    rep.converged = res <= tol;
    return {std::move(u), rep};
}

// u f >= 0 nodewise (up to tol).
inline bool in_B_plus(const GLParams& p, const Field& u, double tol = 0.0) {
    require_same_mesh(p.f, u, "in_B_plus");
    for (int i = 0; i < u.size(); ++i)
        if (u[i] * p.f[i] < -tol) return false;
    return true;
}

// Second variation positive definite: smallest eigenvalue >= tol > 0.
inline bool in_E_plus(const GLParams& p, const Field& u, double tol) {
    return min_eig_hess_J(p, u) >= tol;
}

// Default proximal weight, large enough that the reconstructed dual
// multiplier stays strictly admissible and the proximal objective is convex.
inline double default_k_big(const GLParams& p, const Field& u0) {
    const double ui = norm_inf(u0);
    return std::max({100.0 * p.gamma, 10.0 * (2.0 * p.alpha * p.beta + 6.0 * p.alpha * ui * ui), 10.0});
}

}  // namespace glduality
