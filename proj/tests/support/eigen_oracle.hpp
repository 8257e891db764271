#pragma once

// Independent eigenvalue oracle for small symmetric matrices. It shares nothing
// with the rotation-based solver: the characteristic polynomial is formed by the
// Faddeev-LeVerrier recurrence and its roots are bracketed by the roots of its
// derivative (each real-rooted, so consecutive critical points enclose exactly
// one root) and then bisected.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hogface/matrix.hpp"

namespace hogface::testing {

/// Coefficients c[0..n] of det(xI - A), lowest degree first, c[n] = 1.
inline std::vector<long double> characteristic_polynomial(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<long double> c(n + 1, 0.0L);
    c[n] = 1.0L;
    std::vector<long double> m(n * n, 0.0L);  // M_0 = 0
    std::vector<long double> am(n * n);
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I ;  c_{n-k} = -tr(A M_k) / k
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (std::size_t l = 0; l < n; ++l) s += static_cast<long double>(a(i, l)) * m[l * n + j];
                am[i * n + j] = s;
            }
        for (std::size_t i = 0; i < n * n; ++i) m[i] = am[i];
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] += c[n - k + 1];
        long double trace = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) trace += static_cast<long double>(a(i, l)) * m[l * n + i];
        c[n - k] = -trace / static_cast<long double>(k);
    }
    return c;
}

inline long double evaluate(const std::vector<long double>& c, long double x) {
    long double v = 0.0L;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

/// Real roots, ascending, of a polynomial known to be real-rooted, within [lo, hi].
inline std::vector<long double> real_roots(const std::vector<long double>& c, long double lo, long double hi) {
    const std::size_t deg = c.size() - 1;
    if (deg == 0) return {};
    if (deg == 1) return {-c[0] / c[1]};
    std::vector<long double> derivative(deg);
    for (std::size_t i = 1; i <= deg; ++i) derivative[i - 1] = c[i] * static_cast<long double>(i);
    std::vector<long double> edges{lo};
    for (long double r : real_roots(derivative, lo, hi)) edges.push_back(std::clamp(r, lo, hi));
    edges.push_back(hi);

    std::vector<long double> roots;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        long double a = edges[i];
        long double b = edges[i + 1];
        long double fa = evaluate(c, a);
        const long double fb = evaluate(c, b);
        if ((fa < 0) == (fb < 0) && fa != 0 && fb != 0) {
            // no sign change: a double root sitting on a critical point
            roots.push_back(std::abs(fa) < std::abs(fb) ? a : b);
            continue;
        }
        for (int it = 0; it < 200 && b - a > 0; ++it) {
            const long double mid = (a + b) / 2;
            if (mid <= a || mid >= b) break;
            const long double fm = evaluate(c, mid);
            if (fm == 0) {
                a = b = mid;
                break;
            }
            if ((fm < 0) == (fa < 0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back((a + b) / 2);
    }
    return roots;
}

/// All eigenvalues of symmetric `a`, ascending.
inline std::vector<double> oracle_eigenvalues(const Matrix& a) {
    const std::size_t n = a.rows();
    double bound = 1.0;
    for (std::size_t i = 0; i < n; ++i) {  // Gershgorin
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j) radius += std::abs(a(i, j));
        bound = std::max(bound, radius);
    }
    const auto roots = real_roots(characteristic_polynomial(a), -bound - 1.0L, bound + 1.0L);
    return {roots.begin(), roots.end()};
}

}  // namespace hogface::testing
