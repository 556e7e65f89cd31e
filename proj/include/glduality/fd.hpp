#pragma once

#include <functional>
#include <vector>

#include "glduality/linalg.hpp"

namespace glduality {

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline double fd_step(const std::vector<double>& x, double scale) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return scale * (1.0 + m);
}

// Central first differences.
inline std::vector<double> fd_gradient(const ScalarFn& f, std::vector<double> x, double step) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + step;
        const double fp = f(x);
        x[i] = xi - step;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

// Full second-order central-difference Hessian. Every entry, including the
// (j,i) mirror, is assembled independently so the caller can measure the
// discretization asymmetry before symmetrizing for an eigensolve.
inline DenseMatrix fd_hessian(const ScalarFn& f, std::vector<double> x, double step) {
    const std::size_t n = x.size();
    DenseMatrix h(n, n);
    const double f0 = f(x);
    std::vector<double> fp(n), fm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        x[i] = xi + step;
        fp[i] = f(x);
        x[i] = xi - step;
        fm[i] = f(x);
        x[i] = xi;
    }
    for (std::size_t i = 0; i < n; ++i)
        h(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (step * step);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double xi = x[i], xj = x[j];
            x[i] = xi + step; x[j] = xj + step;
            const double fpp = f(x);
            x[j] = xj - step;
            const double fpm = f(x);
            x[i] = xi - step; x[j] = xj + step;
            const double fmp = f(x);
            x[j] = xj - step;
            const double fmm = f(x);
            x[i] = xi; x[j] = xj;
            h(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
        }
    }
    return h;
}

inline double fd_second_derivative(const std::function<double(double)>& f, double x, double step) {
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
}

inline double fd_third_derivative(const std::function<double(double)>& f, double x, double step) {
    return (f(x + 2.0 * step) - 2.0 * f(x + step) + 2.0 * f(x - step) - f(x - 2.0 * step)) /
           (2.0 * step * step * step);
}

}  // namespace glduality
