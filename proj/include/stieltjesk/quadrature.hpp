#pragma once

// Numerical integration on [a,b] and [a,inf) split at known breakpoints.
// Segments use double-exponential rules (tanh-sinh, exp-sinh), which absorb
// kinks at segment ends, integrable endpoint singularities and algebraic
// decay. Adaptive Gauss-Kronrod (7/15) serves smooth oscillation panels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace stieltjesk {

struct QuadOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    unsigned max_depth = 18;
};

template <class Real>
struct QuadResult {
    Real value = 0;
    Real error = 0;  // estimated absolute error
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        return *this;
    }
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

namespace detail {

template <class Real>
bool meets(const QuadResult<Real>& r, const QuadOptions& o) {
    using std::abs;
    return r.error <= std::max<Real>(Real(o.abs_tol), Real(o.rel_tol) * abs(r.value)) * 100;
}

}  // namespace detail

/// Smooth integrand on a finite interval.
template <class Real, class F>
QuadResult<Real> integrate_smooth(F f, Real a, Real b, const QuadOptions& o = {}) {
    QuadResult<Real> r;
    if (a == b) return r;
    Real err = 0;
    r.value = boost::math::quadrature::gauss_kronrod<Real, 15>::integrate(f, a, b, o.max_depth, Real(o.rel_tol), &err);
    r.error = err;
    r.converged = detail::meets(r, o);
    return r;
}

/// Finite interval whose endpoints may carry integrable singularities.
template <class Real, class F>
QuadResult<Real> integrate_endpoint_singular(F f, Real a, Real b, const QuadOptions& o = {}) {
    QuadResult<Real> r;
    if (a == b) return r;
    thread_local boost::math::quadrature::tanh_sinh<Real> rule(15);
    Real err = 0, l1 = 0;
    std::size_t levels = 0;
    r.value = rule.integrate(f, a, b, Real(o.rel_tol), &err, &l1, &levels);
    r.error = err;
    r.converged = detail::meets(r, o);
    return r;
}

/// [a, inf) with algebraic or faster decay.
template <class Real, class F>
QuadResult<Real> integrate_tail(F f, Real a, const QuadOptions& o = {}) {
    QuadResult<Real> r;
    thread_local boost::math::quadrature::exp_sinh<Real> rule(12);
    Real err = 0, l1 = 0;
    std::size_t levels = 0;
    // exp_sinh integrates over [0, inf); shift by a.
    auto g = [&](Real s) { return f(a + s); };
    r.value = rule.integrate(g, Real(o.rel_tol), &err, &l1, &levels);
    r.error = err;
    r.converged = detail::meets(r, o);
    return r;
}

/// Integral over [lo, hi] (hi may be +inf) split at the given interior breakpoints.
template <class Real, class F>
QuadResult<Real> integrate_segments(F f, Real lo, Real hi, std::vector<Real> breaks, const QuadOptions& o = {}) {
    const bool infinite = std::isinf(static_cast<double>(hi));
    std::vector<Real> pts{lo};
    std::sort(breaks.begin(), breaks.end());
    for (const Real& b : breaks)
        if (b > pts.back() && (infinite || b < hi)) pts.push_back(b);
    QuadResult<Real> total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        // Endpoint rules everywhere: kernels have kinks exactly at breakpoints and
        // densities may be singular at their interval ends.
        total += integrate_endpoint_singular<Real>(f, pts[i], pts[i + 1], o);
    }
    if (infinite) {
        total += integrate_tail<Real>(f, pts.back(), o);
    } else if (pts.back() < hi) {
        total += integrate_endpoint_singular<Real>(f, pts.back(), hi, o);
    }
    return total;
}

/// Wynn epsilon acceleration of the partial sums s_0..s_n; returns the best diagonal estimate.
template <class Real>
Real wynn_epsilon(const std::vector<Real>& partial_sums) {
    const std::size_t n = partial_sums.size();
    if (n < 3) return n ? partial_sums.back() : Real(0);
    std::vector<Real> prev(n + 1, Real(0)), cur(partial_sums.begin(), partial_sums.end());
    Real best = cur.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<Real> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const Real d = cur[i + 1] - cur[i];
            if (d == 0) return cur[i + 1];
            next[i] = prev[i + 1] + Real(1) / d;
        }
        prev = cur;
        cur = next;
        if (k % 2 == 0 && !cur.empty()) best = cur.back();
    }
    return best;
}

/// Integral over [0, inf) of a function oscillating with known zeros z_0 < z_1 < ...,
/// summed between zeros and accelerated. zero(j) returns z_j with z_0 = 0.
template <class Real, class F, class Z>
QuadResult<Real> integrate_between_zeros(F f, Z zero, const QuadOptions& o = {}, int max_terms = 400) {
    std::vector<Real> partial;
    Real s = 0, err = 0;
    Real last_term = 0;
    for (int j = 0; j < max_terms; ++j) {
        const auto piece = integrate_smooth<Real>(f, zero(j), zero(j + 1), o);
        s += piece.value;
        err += piece.error;
        partial.push_back(s);
        last_term = piece.value;
        if (j >= 4 && std::abs(last_term) <= Real(o.abs_tol) * Real(1e-3)) break;
    }
    QuadResult<Real> r;
    r.value = wynn_epsilon(partial);
    r.error = err + std::abs(r.value - partial.back()) + std::abs(last_term);
    r.converged = detail::meets(r, o);
    return r;
}

}  // namespace stieltjesk
