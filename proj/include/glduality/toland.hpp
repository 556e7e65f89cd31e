#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "glduality/fd.hpp"
#include "glduality/report.hpp"
#include "glduality/residual_pd.hpp"
#include "glduality/rng.hpp"

namespace glduality {

// Adds K/2 int u^2 to both components; the difference G_K - F_K is unchanged
// and both components become strongly convex for K above the curvature
// deficit of F and G.
inline DcSplit augment(const DcSplit& dc, double K) {
    if (!(K > 0.0)) throw std::invalid_argument("augment: K must be > 0");
    DcSplit out;
    out.mesh = dc.mesh;
    auto lift = [K](const ConvexOracle& c) {
        ConvexOracle o;
        o.value = [c, K](const Field& u) { return c.value(u) + 0.5 * K * inner(u, u); };
        o.grad = [c, K](const Field& u) {
            Field g = c.grad(u);
            axpy(g, K, u);
            return g;
        };
        o.hess_apply = [c, K](const Field& u, const Field& d) {
            Field h = c.hess_apply(u, d);
            axpy(h, K, d);
            return h;
        };
        return o;
    };
    out.G = lift(dc.G);
    out.F = lift(dc.F);
    return out;
}

// Value and maximizer of Phi*(v*) = sup_u { <u,v*> - Phi(u) } for a strongly
// convex Phi, computed by Newton on grad Phi(u) = v*. The envelope identity
// gives d Phi*/d v* = argmax.
struct ConjugateEval {
    double value = 0.0;
    Field argmax;
    SolveReport inner_report;
};

inline ConjugateEval conjugate_eval(const ConvexOracle& phi, const Field& vs, const Field& u_init,
                                    double tol = 1e-12) {
    if (!(tol > 0.0)) throw std::invalid_argument("conjugate_eval: tol must be > 0");
    const Mesh& m = vs.mesh;
    Field u = u_init;
    ConjugateEval out;
    const double scale = 1.0 + norm_l2(vs);
    Field res = phi.grad(u) - vs;
    double rn = norm_l2(res);
    out.inner_report.residual_history.push_back(rn);
    for (int it = 0; it < 100 && rn > tol * scale; ++it) {
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            Field xf(m, x);
            Field hx = phi.hess_apply(u, xf);
            y = hx.v;
        };
        std::vector<double> rhs(m.size());
        for (int i = 0; i < m.size(); ++i) rhs[i] = -res[i];
        std::vector<double> step(m.size(), 0.0);
        auto cg = cg_solve(apply, step, rhs, 1e-14, 10 * m.size() * m.size());
        if (cg.breakdown)
            throw std::runtime_error("conjugate_eval: Hessian not positive definite (augment with larger K)");
        double t = 1.0;
        Field stepf(m, step);
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            Field trial = u;
            axpy(trial, t, stepf);
            Field tres = phi.grad(trial) - vs;
            const double trn = norm_l2(tres);
            if (trn <= (1.0 - 1e-4 * t) * rn) {
                u = trial;
                res = tres;
                rn = trn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        out.inner_report.residual_history.push_back(rn);
        out.inner_report.iterations = it + 1;
    }
    out.inner_report.final_residual = rn;
    out.inner_report.converged = rn <= tol * scale;
    if (!out.inner_report.converged)
        throw std::runtime_error("conjugate_eval: inner Newton failed to converge");
    out.argmax = u;
    out.value = inner(u, vs) - phi.value(u);
    return out;
}

// Toland dual of the augmented split: J_K*(v*) = F_K*(v*) - G_K*(v*).
inline double eval_JKstar(const DcSplit& dcK, const Field& vs) {
    Field zero(dcK.mesh);
    ConjugateEval f = conjugate_eval(dcK.F, vs, zero);
    ConjugateEval g = conjugate_eval(dcK.G, vs, f.argmax);
    return f.value - g.value;
}

// Coupled functional
//   J1*(u, v*) = F_K*(v*) - G_K*(v*)
//              + 1/(2 eps) [ ||dG_K*/dv* - u||^2 + ||dF_K*/dv* - u||^2
//                          + ||dG_K*/dv* - dF_K*/dv*||^2 ]
// with the gradient maps realized by the conjugate maximizers. Always at
// least J_K*(v*), with equality when both maximizers coincide with u.
inline double eval_J1star_toland(const DcSplit& dcK, const Field& u, const Field& vs, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eval_J1star_toland: eps must be > 0");
    Field zero(dcK.mesh);
    ConjugateEval f = conjugate_eval(dcK.F, vs, zero);
    ConjugateEval g = conjugate_eval(dcK.G, vs, f.argmax);
    Field dg = g.argmax - u;
    Field df = f.argmax - u;
    Field dd = g.argmax - f.argmax;
    return f.value - g.value +
           (0.5 / eps) * (inner(dg, dg) + inner(df, df) + inner(dd, dd));
}

// ---------------------------------------------------------------------------
// scaling probes (single-node instances)

struct ProbeRow {
    double K = 0.0;
    double eps = 0.0;
    double d2G = 0.0;
    double d3G = 0.0;
    double det_hess = 0.0;
};

struct ProbeTable {
    std::vector<ProbeRow> rows;
    std::map<std::string, double> summary;
    bool degenerate = false;

    std::string to_csv() const {
        std::ostringstream os;
        os << "K,eps,d2G,d3G,detHess\n";
        for (const auto& r : rows) {
            os << format_double(r.K) << ',' << format_double(r.eps) << ',' << format_double(r.d2G)
               << ',' << format_double(r.d3G) << ',' << format_double(r.det_hess) << '\n';
        }
        os << "# summary\n";
        for (const auto& [k, v] : summary) os << "# " << k << ',' << format_double(v) << '\n';
        return os.str();
    }
};

namespace detail {

// scalar helpers on a single-node mesh
inline double scalar_conjugate(const DcSplit& dcK, bool use_F, double v, double u_init) {
    Field vf(dcK.mesh), ui(dcK.mesh);
    vf[0] = v;
    ui[0] = u_init;
    return conjugate_eval(use_F ? dcK.F : dcK.G, vf, ui).value;
}

// critical point of the scalar energy G - F by damped Newton
inline double scalar_critical_point(const DcSplit& dc, double init) {
    Field u(dc.mesh);
    u[0] = init;
    double g;
    for (int it = 0; it < 200; ++it) {
        Field gu = dc.G.grad(u) - dc.F.grad(u);
        g = gu[0];
        if (std::abs(g) <= 1e-13) break;
        Field one(dc.mesh, 1.0);
        const double h = dc.G.hess_apply(u, one)[0] - dc.F.hess_apply(u, one)[0];
        double step = (std::abs(h) > 1e-30) ? -g / h : -g;
        double t = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            Field trial = u;
            trial[0] += t * step;
            Field gt = dc.G.grad(trial) - dc.F.grad(trial);
            if (std::abs(gt[0]) <= (1.0 - 1e-4 * t) * std::abs(g)) {
                u = trial;
                break;
            }
            t *= 0.5;
        }
    }
    return u[0];
}

}  // namespace detail

// Determinant of the 2x2 finite-difference Hessian of (u, v*) -> J1*(u, v*)
// on a single-node instance, evaluated at a critical point of the scalar
// energy located from the given initial guess.
inline double j1star_det_single_node(const DcSplit& dc, double k, double eps, double u_guess) {
    if (dc.mesh.size() != 1)
        throw std::invalid_argument("j1star_det_single_node: needs a single-node mesh");
    DcSplit dcK = augment(dc, k);
    const double u_c = detail::scalar_critical_point(dc, u_guess);
    Field ucf(dc.mesh);
    ucf[0] = u_c;
    const double v0 = dcK.F.grad(ucf)[0];
    auto fn = [&](const std::vector<double>& x) {
        Field u(dc.mesh), v(dc.mesh);
        u[0] = x[0];
        v[0] = x[1];
        return eval_J1star_toland(dcK, u, v, eps);
    };
    std::vector<double> x = {u_c, v0};
    DenseMatrix h = fd_hessian(fn, x, fd_step(x, 1e-4));
    h.symmetrize();
    return h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
}

// Finite-difference estimates of the conjugate curvatures and of the coupled
// Hessian determinant on a single-node instance.
//
// Rows come in two groups sharing one table: a K sweep of d2 G_K* and d3 G_K*
// at the probe point `at` (the maximizer is pinned there by choosing
// v* = G_K'(at) per K), and an eps sweep of det(d^2 J1*) at a critical point
// of the scalar energy with K = k_det. The determinant sweep needs the two
// conjugate curvatures to differ at the critical point; equal curvatures are
// reported as a degenerate fit instead of an error.
inline ProbeTable hessian_scaling_probe(const DcSplit& dc, const std::vector<double>& k_list,
                                        const std::vector<double>& eps_list, const Field& at,
                                        double k_det = 10.0) {
    if (dc.mesh.size() != 1)
        throw std::invalid_argument("hessian_scaling_probe: needs a single-node mesh");
    if (k_list.size() < 3 || eps_list.size() < 3)
        throw std::invalid_argument("hessian_scaling_probe: need at least 3 values per sweep");
    ProbeTable out;
    const double u_at = at[0];
    const double u_c = detail::scalar_critical_point(dc, u_at);
    Field ucf(dc.mesh);
    ucf[0] = u_c;
    Field one(dc.mesh, 1.0);

    // K sweep of the conjugate curvatures at the pinned maximizer
    std::vector<double> d2s, d3s;
    for (double K : k_list) {
        DcSplit dcK = augment(dc, K);
        Field atf(dc.mesh);
        atf[0] = u_at;
        const double v_at = dcK.G.grad(atf)[0];
        const double step = 1e-2 * (1.0 + std::abs(v_at));
        auto gstar = [&](double v) { return detail::scalar_conjugate(dcK, false, v, u_at); };
        const double d2 = fd_second_derivative(gstar, v_at, step);
        const double d3 = fd_third_derivative(gstar, v_at, step);
        d2s.push_back(d2);
        d3s.push_back(std::abs(d3));
        out.rows.push_back({K, eps_list.front(), d2, d3,
                            j1star_det_single_node(dc, K, eps_list.front(), u_at)});
    }
    out.summary["slope_d2G_vs_K"] = loglog_slope(k_list, d2s);
    bool d3_ok = true;
    for (double v : d3s)
        if (!(std::abs(v) > 0.0)) d3_ok = false;
    out.summary["slope_d3G_vs_K"] = d3_ok ? loglog_slope(k_list, d3s)
                                          : std::numeric_limits<double>::quiet_NaN();

    // eps sweep of the coupled Hessian determinant at the critical point
    DcSplit dcK = augment(dc, k_det);
    const double A = 1.0 / dcK.F.hess_apply(ucf, one)[0];
    const double B = 1.0 / dcK.G.hess_apply(ucf, one)[0];
    out.summary["A"] = A;
    out.summary["B"] = B;
    out.summary["u_critical"] = u_c;
    if (std::abs(A - B) < 1e-10 * (std::abs(A) + std::abs(B))) {
        out.degenerate = true;
        out.summary["degenerate_fit"] = 1.0;
        return out;
    }
    out.summary["degenerate_fit"] = 0.0;

    std::vector<double> dets;
    for (double eps : eps_list) {
        const double det = j1star_det_single_node(dc, k_det, eps, u_at);
        dets.push_back(det);
        out.rows.push_back({k_det, eps, B, 0.0, det});
    }
    out.summary["slope_det_vs_eps"] = loglog_slope(eps_list, dets);
    // fitted 1/eps^2 coefficient, normalized by (A - B)^2
    {
        const double eps_min = eps_list.back();
        const double det_min = dets.back();
        const double w = dc.mesh.weight;
        const double c2 = (det_min * eps_min * eps_min / (w * w) - 2.0 * (A - B) * eps_min) /
                          ((A - B) * (A - B));
        out.summary["det_eps2_coefficient"] = c2;
    }
    return out;
}

// ---------------------------------------------------------------------------
// brute-force biconjugate on meshes with at most two interior nodes

struct BiconjResult {
    std::vector<double> grid;        // per-axis sample points
    std::vector<double> j_values;    // lexicographic over the grid
    std::vector<double> jss_values;  // biconjugate on the same grid
    double resolution = 0.0;
    double min_j = 0.0;
    double min_jss = 0.0;
    CheckReport report;

    std::string to_csv() const {
        std::ostringstream os;
        const int dof = (grid.size() * grid.size() == j_values.size()) ? 2 : 1;
        os << (dof == 1 ? "u,J,Jss\n" : "u1,u2,J,Jss\n");
        const int g = static_cast<int>(grid.size());
        if (dof == 1) {
            for (int i = 0; i < g; ++i)
                os << format_double(grid[i]) << ',' << format_double(j_values[i]) << ','
                   << format_double(jss_values[i]) << '\n';
        } else {
            for (int j = 0; j < g; ++j)
                for (int i = 0; i < g; ++i)
                    os << format_double(grid[i]) << ',' << format_double(grid[j]) << ','
                       << format_double(j_values[j * g + i]) << ','
                       << format_double(jss_values[j * g + i]) << '\n';
        }
        return os.str();
    }
};

// Computes the convex envelope on a sampled box by two dense discrete
// Legendre transforms and checks the minorant property, midpoint convexity,
// and equality of the minima.
inline BiconjResult biconjugate_bruteforce(const DcSplit& dc, double lo, double hi,
                                           int grid_points) {
    const int dof = dc.mesh.size();
    if (dof > 2) throw std::invalid_argument("biconjugate_bruteforce: needs at most 2 dof");
    if (grid_points < 5) throw std::invalid_argument("biconjugate_bruteforce: grid too coarse");
    if (!(hi > lo)) throw std::invalid_argument("biconjugate_bruteforce: empty box");

    BiconjResult out;
    out.report.suite = "biconj";
    const int g = grid_points;
    const double du = (hi - lo) / (g - 1);
    out.grid.resize(g);
    for (int i = 0; i < g; ++i) out.grid[i] = lo + i * du;

    const double w = dc.mesh.weight;
    auto J = [&](double a, double b) {
        Field u(dc.mesh);
        u[0] = a;
        if (dof == 2) u[1] = b;
        return dc.G.value(u) - dc.F.value(u);
    };

    const int total = dof == 1 ? g : g * g;
    out.j_values.resize(total);
    double max_grad = 0.0;
    {
        // tabulate J and estimate the gradient range for the dual grid
        for (int j = 0; j < (dof == 2 ? g : 1); ++j) {
            for (int i = 0; i < g; ++i) {
                const int idx = dof == 1 ? i : j * g + i;
                out.j_values[idx] = J(out.grid[i], dof == 2 ? out.grid[j] : 0.0);
            }
        }
        Field u(dc.mesh);
        for (int j = 0; j < (dof == 2 ? g : 1); ++j) {
            for (int i = 0; i < g; ++i) {
                u[0] = out.grid[i];
                if (dof == 2) u[1] = out.grid[j];
                Field gr = dc.G.grad(u) - dc.F.grad(u);
                max_grad = std::max(max_grad, norm_inf(gr));
            }
        }
    }
    const double vmax = 1.05 * max_grad + 1e-9;
    const int gv = 2 * g + 1;  // odd, symmetric, contains v = 0 exactly
    std::vector<double> vgrid(gv);
    for (int i = 0; i < gv; ++i) vgrid[i] = -vmax + (2.0 * vmax) * i / (gv - 1);
    vgrid[(gv - 1) / 2] = 0.0;

    out.jss_values.assign(total, 0.0);
    if (dof == 1) {
        std::vector<double> jstar(gv, -std::numeric_limits<double>::infinity());
        for (int k = 0; k < gv; ++k)
            for (int i = 0; i < g; ++i)
                jstar[k] = std::max(jstar[k], w * out.grid[i] * vgrid[k] - out.j_values[i]);
        for (int i = 0; i < g; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < gv; ++k)
                best = std::max(best, w * out.grid[i] * vgrid[k] - jstar[k]);
            out.jss_values[i] = best;
        }
    } else {
        std::vector<double> jstar(gv * gv, -std::numeric_limits<double>::infinity());
        for (int kb = 0; kb < gv; ++kb)
            for (int ka = 0; ka < gv; ++ka) {
                double m = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < g; ++j)
                    for (int i = 0; i < g; ++i)
                        m = std::max(m, w * (out.grid[i] * vgrid[ka] + out.grid[j] * vgrid[kb]) -
                                            out.j_values[j * g + i]);
                jstar[kb * gv + ka] = m;
            }
        for (int j = 0; j < g; ++j)
            for (int i = 0; i < g; ++i) {
                double best = -std::numeric_limits<double>::infinity();
                for (int kb = 0; kb < gv; ++kb)
                    for (int ka = 0; ka < gv; ++ka)
                        best = std::max(best, w * (out.grid[i] * vgrid[ka] + out.grid[j] * vgrid[kb]) -
                                                  jstar[kb * gv + ka]);
                out.jss_values[j * g + i] = best;
            }
    }

    // locate minima; the box must contain the minimizer strictly inside
    int argmin_j = 0;
    for (int i = 0; i < total; ++i)
        if (out.j_values[i] < out.j_values[argmin_j]) argmin_j = i;
    out.min_j = out.j_values[argmin_j];
    out.min_jss = *std::min_element(out.jss_values.begin(), out.jss_values.end());
    {
        const int ia = dof == 1 ? argmin_j : argmin_j % g;
        const int ib = dof == 1 ? 1 : argmin_j / g;
        if (ia == 0 || ia == g - 1 || (dof == 2 && (ib == 0 || ib == g - 1)))
            throw std::runtime_error("biconjugate_bruteforce: minimizer on the box boundary; enlarge the box");
    }

    out.resolution = 2.0 * du * w * max_grad;

    double worst_minorant = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < total; ++i)
        worst_minorant = std::max(worst_minorant, out.jss_values[i] - out.j_values[i]);
    out.report.add("minorant", std::max(0.0, worst_minorant), 1e-9);

    double worst_mid = 0.0;
    if (dof == 1) {
        for (int i = 0; i < g; ++i)
            for (int k = i + 2; k < g; k += 2) {
                const double mid = out.jss_values[(i + k) / 2];
                worst_mid = std::max(worst_mid, mid - 0.5 * (out.jss_values[i] + out.jss_values[k]));
            }
    } else {
        for (int idx = 0; idx < total; ++idx) {
            const int i = idx % g, j = idx / g;
            if (i + 2 < g) {
                const double mid = out.jss_values[j * g + i + 1];
                worst_mid = std::max(worst_mid,
                                     mid - 0.5 * (out.jss_values[j * g + i] + out.jss_values[j * g + i + 2]));
            }
            if (j + 2 < g) {
                const double mid = out.jss_values[(j + 1) * g + i];
                worst_mid = std::max(worst_mid,
                                     mid - 0.5 * (out.jss_values[j * g + i] + out.jss_values[(j + 2) * g + i]));
            }
        }
    }
    out.report.add("midpoint_convexity", worst_mid, 1e-12);

    out.report.add("min_equality", std::abs(out.min_j - out.min_jss),
                   std::max(out.resolution, 1e-12));
    out.report.set_value("min_J", out.min_j);
    out.report.set_value("min_Jss", out.min_jss);
    out.report.set_value("resolution", out.resolution);
    return out;
}

// ---------------------------------------------------------------------------

// Verification of the coupled dual formulation at a critical point u0:
// v0* = F_K'(u0), both conjugate maximizers return u0, the value chain
// J(u0) = J_K*(v0*) = J1*(u0, v0*), the minorant property of J1*, and local
// convexity of J1* at (u0, v0*).
inline CheckReport verify_theorem_toland(const GLParams& p, const RegParams& r, const Field& u0,
                                         std::uint64_t seed = 42) {
    CheckReport rep;
    rep.suite = "toland";
    const double K = r.k_big;
    const double eps = r.eps;
    rep.set_value("K", K);
    rep.set_value("eps", eps);

    rep.add_premise("gradJ_norm", norm_l2(grad_J(p, u0)), 1e-10);
    rep.add_premise("sup_norm_bound", norm_inf(u0) < r.k3 ? 0.0 : 1.0, 0.5);

    DcSplit dc = gl_dc_split(p);
    DcSplit dcK = augment(dc, K);
    Field v0s = dcK.F.grad(u0);

    Field zero(dc.mesh);
    ConjugateEval cf = conjugate_eval(dcK.F, v0s, zero);
    ConjugateEval cg = conjugate_eval(dcK.G, v0s, zero);
    rep.add("argmax_F_is_u0", norm_l2(cf.argmax - u0), 1e-8);
    rep.add("argmax_G_is_u0", norm_l2(cg.argmax - u0), 1e-8);

    const double J0 = eval_J(p, u0);
    const double jk = cf.value - cg.value;
    const double j1 = eval_J1star_toland(dcK, u0, v0s, eps);
    rep.set_value("J", J0);
    rep.set_value("JKstar", jk);
    rep.set_value("J1star", j1);
    const double scale = 1.0 + std::abs(J0);
    rep.add("chain_JKstar", std::abs(J0 - jk) / scale, 1e-7);
    rep.add("chain_J1star", std::abs(J0 - j1) / scale, 1e-7);

    // J1* dominates J_K* everywhere (sum-of-squares penalties)
    {
        double min_slack = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 20; ++s) {
            CounterRng rng(seed, 31000ULL + s);
            Field u = gaussian_field(dc.mesh, rng, 0.5);
            Field vs = gaussian_field(dc.mesh, rng, 0.5 * K);
            const double a = eval_J1star_toland(dcK, u, vs, eps);
            const double b = eval_JKstar(dcK, vs);
            min_slack = std::min(min_slack, a - b);
        }
        rep.set_value("j1_minus_jk_min", min_slack);
        rep.add("j1_dominates_jk", std::max(0.0, -min_slack), 1e-10);
    }

    // Fenchel-Young for the augmented components on random pairs
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 20; ++s) {
            CounterRng rng(seed, 32000ULL + s);
            Field u = gaussian_field(dc.mesh, rng, 0.5);
            Field vs = gaussian_field(dc.mesh, rng, 0.5 * K);
            ConjugateEval f = conjugate_eval(dcK.F, vs, zero);
            ConjugateEval g = conjugate_eval(dcK.G, vs, zero);
            worst = std::min(worst, f.value + dcK.F.value(u) - inner(u, vs));
            worst = std::min(worst, g.value + dcK.G.value(u) - inner(u, vs));
        }
        rep.set_value("fenchel_young_min_slack", worst);
        rep.add("fenchel_young", std::max(0.0, -worst), 1e-9);
    }

    // envelope identity: finite-difference gradient of G_K* equals the argmax
    {
        CounterRng rng(seed, 33000ULL);
        Field vs = gaussian_field(dc.mesh, rng, 0.5 * K);
        Field dir = gaussian_field(dc.mesh, rng);
        const double t = 1e-5 * (1.0 + norm_inf(vs));
        ConjugateEval base = conjugate_eval(dcK.G, vs, zero);
        Field vp = vs, vm = vs;
        axpy(vp, t, dir);
        axpy(vm, -t, dir);
        const double fd = (conjugate_eval(dcK.G, vp, base.argmax).value -
                           conjugate_eval(dcK.G, vm, base.argmax).value) /
                          (2.0 * t);
        const double an = inner(base.argmax, dir);
        rep.add("envelope_gradient", std::abs(fd - an) / (1.0 + std::abs(an)), 1e-6);
    }

    // local convexity of J1* at (u0, v0*)
    {
        const Mesh& m = dc.mesh;
        auto fn = [&](const std::vector<double>& x) {
            Field u(m), vs(m);
            for (int i = 0; i < m.size(); ++i) {
                u[i] = x[i];
                vs[i] = x[m.size() + i];
            }
            return eval_J1star_toland(dcK, u, vs, eps);
        };
        std::vector<double> x(2 * m.size());
        for (int i = 0; i < m.size(); ++i) {
            x[i] = u0[i];
            x[m.size() + i] = v0s[i];
        }
        DenseMatrix h = fd_hessian(fn, x, fd_step(x, 1e-4));
        const double asym = h.max_asymmetry();
        h.symmetrize();
        const double min_eig = min_eigenvalue(h);
        rep.set_value("j1_hessian_min_eig", min_eig);
        rep.set_value("j1_hessian_fd_asymmetry", asym);
        rep.add("j1_local_convexity", std::max(0.0, -min_eig), 1e-8);

        // informative: the same probe with the coupling relaxed to eps = 1
        auto fn_relaxed = [&](const std::vector<double>& xx) {
            Field u(m), vs(m);
            for (int i = 0; i < m.size(); ++i) {
                u[i] = xx[i];
                vs[i] = xx[m.size() + i];
            }
            return eval_J1star_toland(dcK, u, vs, 1.0);
        };
        DenseMatrix hr = fd_hessian(fn_relaxed, x, fd_step(x, 1e-4));
        hr.symmetrize();
        rep.set_value("j1_hessian_min_eig_eps_relaxed", min_eigenvalue(hr));
    }

    return rep;
}

}  // namespace glduality
