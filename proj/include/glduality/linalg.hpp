#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace glduality {

// Small dense matrix, row-major. Everything in this project is desk scale
// (a few hundred rows at most), so plain O(n^3) algorithms are fine.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols_) throw std::invalid_argument("DenseMatrix::apply: size mismatch");
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double max_asymmetry() const {
        double a = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                a = std::max(a, std::abs((*this)(i, j) - (*this)(j, i)));
        return a;
    }

    void symmetrize() {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j) {
                const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = v;
                (*this)(j, i) = v;
            }
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// LU with partial pivoting; solves in place on a copy.
inline std::vector<double> lu_solve(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("lu_solve: shape mismatch");
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) { best = std::abs(a(i, k)); p = i; }
        if (best == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            a(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
            b[i] -= m * b[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * b[j];
        b[i] = s / a(i, i);
    }
    return b;
}

struct EigenDecomposition {
    std::vector<double> values;   // ascending
    DenseMatrix vectors;          // columns match values
};

// Cyclic Jacobi for symmetric matrices. Desk-scale sizes only.
inline EigenDecomposition jacobi_eigen(DenseMatrix a, int max_sweeps = 64) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
    DenseMatrix v = DenseMatrix::identity(n);
    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double tol = (scale == 0.0 ? 0.0 : 1e-15 * scale * static_cast<double>(n));
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol / static_cast<double>(n * n + 1)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    EigenDecomposition e;
    e.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return e.values[i] < e.values[j]; });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = e.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

inline double min_eigenvalue(const DenseMatrix& sym) { return jacobi_eigen(sym).values.front(); }
inline double max_eigenvalue(const DenseMatrix& sym) { return jacobi_eigen(sym).values.back(); }

// Tridiagonal solve (Thomas). No pivoting; reports a nonpositive pivot so
// callers can detect loss of positive definiteness.
struct TridiagResult {
    bool ok = true;
    bool positive_pivots = true;
};

inline TridiagResult thomas_solve(const std::vector<double>& lower,
                                  const std::vector<double>& diag,
                                  const std::vector<double>& upper,
                                  std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    TridiagResult res;
    std::vector<double> c(n, 0.0);
    double piv = diag[0];
    if (piv <= 0.0) res.positive_pivots = false;
    if (piv == 0.0) { res.ok = false; return res; }
    c[0] = (n > 1 ? upper[0] / piv : 0.0);
    rhs[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i - 1] * c[i - 1];
        if (piv <= 0.0) res.positive_pivots = false;
        if (piv == 0.0) { res.ok = false; return res; }
        if (i + 1 < n) c[i] = upper[i] / piv;
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return res;
}

struct CgResult {
    bool converged = false;
    bool breakdown = false;   // encountered p'Ap <= 0 (operator not SPD)
    int iterations = 0;
    double relative_residual = 0.0;
};

// Plain conjugate gradients on a matrix-free SPD operator.
inline CgResult cg_solve(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                         std::vector<double>& x, const std::vector<double>& b,
                         double tol, int max_iter) {
    const std::size_t n = b.size();
    CgResult res;
    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - ap[i];
        bnorm += b[i] * b[i];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        res.converged = true;
        return res;
    }
    p = r;
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) rr += r[i] * r[i];
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= tol * bnorm) {
            res.converged = true;
            res.iterations = it;
            res.relative_residual = std::sqrt(rr) / bnorm;
            return res;
        }
        apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) {
            res.breakdown = true;
            res.iterations = it;
            res.relative_residual = std::sqrt(rr) / bnorm;
            return res;
        }
        const double alpha = rr / pap;
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rr_new += r[i] * r[i];
        }
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        res.iterations = it + 1;
    }
    res.relative_residual = std::sqrt(rr) / bnorm;
    res.converged = std::sqrt(rr) <= tol * bnorm;
    return res;
}

// Least-squares slope of log10(y) against log10(x). Used by the scaling probes.
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(std::abs(ys[i]) > 0.0))
            throw std::domain_error("loglog_slope: nonpositive sample");
        const double lx = std::log10(xs[i]);
        const double ly = std::log10(std::abs(ys[i]));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace glduality
