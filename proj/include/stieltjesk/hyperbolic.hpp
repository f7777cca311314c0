#pragma once

// The hyperbolic difference quotient
//   Delta_{k,u}(w) = (psi_k(u v) - psi_k(u / v)) / (v - 1/v),   w = v + 1/v, v >= 1,
// its exact two-region form, the closed k-th derivative, Taylor data at w = 2
// and hypergeometric cross-checks.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "stieltjesk/funcmodel.hpp"
#include "stieltjesk/hyperbolic_fn.hpp"
#include "stieltjesk/kernels.hpp"
#include "stieltjesk/quadrature.hpp"

namespace stieltjesk {

struct DeltaKU {
    int k = 0;
    Rational u;
    Rational threshold;               // u + 1/u
    std::optional<QPoly> region_low;  // polynomial in w on (2, threshold); empty for u = 1
    HyperbolicFn region_high;         // v >= max(u, 1/u)

    /// j-th w-derivative of the high-region expression.
    HyperbolicFn high_derivative(int j) const {
        while (static_cast<int>(high_derivs_.size()) <= j) high_derivs_.push_back(high_derivs_.back().d_dw());
        return high_derivs_[static_cast<std::size_t>(j)];
    }

    bool in_low_region(const Rational& v) const { return region_low && v + 1 / v < threshold; }

    /// Delta^{(j)} at w = v + 1/v, exact, v >= 1 (v = 1 only in the low region).
    Rational at_v(const Rational& v, int j = 0) const {
        if (v < 1) throw std::domain_error("DeltaKU::at_v needs v >= 1");
        const Rational w = v + 1 / v;
        if (in_low_region(v)) return region_low->derivative(j)(w);
        if (v == 1) throw std::domain_error("DeltaKU::at_v: w = 2 lies outside the high region");
        return high_derivative(j).at_v(v);
    }

    /// Delta^{(j)}(w) for real w > 2; evaluated in 113-bit arithmetic.
    template <class T>
    T at_w(const T& w, int j = 0) const {
        if (!(w > T(2))) throw std::domain_error("Delta is defined for w > 2");
        const HighReal wq(w);
        if (region_low && wq < to_real<HighReal>(threshold))
            return static_cast<T>(region_low->derivative(j).template convert<HighReal>()(wq));
        return static_cast<T>(high_derivative(j).at_w(wq));
    }

    mutable std::vector<HyperbolicFn> high_derivs_;
};

namespace detail {

/// psi_k piece composed with y = c v^e (e = +1 or -1), as a rational function of v.
inline RationalFn psi_piece_in_v(const KernelFamily& fam, bool upper, const Rational& c, int e) {
    const RationalFn arg = RationalFn::monomial(c, e);
    const RationalFn& piece = fam.psi.pieces()[upper ? 1 : 0];
    return piece.compose(arg);
}

inline RationalFn v_minus_inverse() { return RationalFn(QPoly{Rational(-1), Rational(0), Rational(1)}, QPoly::x()); }

}  // namespace detail

inline DeltaKU build_delta(int k, const Rational& u) {
    if (k < 1) throw std::domain_error("build_delta needs k >= 1");
    if (u <= 0) throw std::domain_error("build_delta needs u > 0");
    const KernelFamily& fam = build_kernel_family(k);
    DeltaKU d;
    d.k = k;
    d.u = u;
    d.threshold = u + 1 / u;
    const RationalFn denom = detail::v_minus_inverse();
    // High region: u v >= 1 and u / v <= 1.
    const RationalFn high =
        (detail::psi_piece_in_v(fam, true, u, 1) - detail::psi_piece_in_v(fam, false, u, -1)) / denom;
    d.region_high = HyperbolicFn(high);
    d.high_derivs_.push_back(d.region_high);
    if (u != 1) {
        // Both arguments on the same side of 1.
        const bool upper = u > 1;
        const RationalFn low =
            (detail::psi_piece_in_v(fam, upper, u, 1) - detail::psi_piece_in_v(fam, upper, u, -1)) / denom;
        auto p = HyperbolicFn(low).as_w_poly();
        if (!p) throw std::logic_error("build_delta: low region is not a polynomial in w");
        if (p->degree() > k - 1) throw std::logic_error("build_delta: low region degree exceeds k-1");
        d.region_low = *p;
        const Rational vb = u > 1 ? u : Rational(1 / u);
        if ((*p)(d.threshold) != d.region_high.at_v(vb)) throw std::logic_error("build_delta: regions do not match");
    }
    return d;
}

/// (-1)^k (2k)! (w - u - 1/u)^k / (k! (w^2 - 4)^{k + 1/2}) for w >= u + 1/u, w > 2.
template <class T>
T delta_kth_derivative_closed(int k, const T& u, const T& w) {
    using std::pow;
    using std::sqrt;
    const T lo = u + T(1) / u;
    if (!(w > T(2)) || !(w >= lo * (T(1) - T(64) * std::numeric_limits<T>::epsilon())))
        throw std::domain_error("closed form needs w >= u + 1/u and w > 2");
    if (w <= lo) return T(0);
    T c = T(1);
    for (int i = k + 1; i <= 2 * k; ++i) c *= T(i);  // (2k)!/k!
    const T s = w * w - T(4);
    const T r = c * pow(w - lo, k) / (pow(s, k) * sqrt(s));
    return k % 2 ? -r : r;
}

/// The closed form at w = v + 1/v with (w^2 - 4)^{1/2} = v - 1/v; exact for rational v > 1.
inline Rational delta_kth_derivative_closed_at_v(int k, const Rational& u, const Rational& v) {
    if (v <= 1) throw std::domain_error("closed form needs v > 1");
    const Rational w = v + 1 / v;
    const Rational r = Rational(factorial(2 * k)) / Rational(factorial(k)) * rpow(w - u - 1 / u, k) /
                       rpow(v - 1 / v, 2 * k + 1);
    return k % 2 ? Rational(-r) : r;
}

/// k-fold d/dw of the high-region expression in the v-field, at rational v > 1.
/// Below u + 1/u this is the analytic continuation of that expression.
inline Rational delta_kth_derivative_exact(const DeltaKU& d, const Rational& v) {
    if (v <= 1) throw std::domain_error("v-field derivative needs v > 1");
    return d.high_derivative(d.k).at_v(v);
}

// ---------------------------------------------------------------------------
// Taylor data at w = 2 from derivatives of psi_f at u.

/// Delta_u(f)^{(j)}(2), j = 0..order, for rational psi_f.
inline std::vector<Rational> taylor_at_2(const RationalFn& psi, const Rational& u, int order) {
    std::vector<Rational> out;
    for (int j = 0; j <= order; ++j) {
        const RationalFn g = RationalFn::monomial(Rational(1), 2 * j + 1) * psi.derivative(j + 1);
        out.push_back(Rational(factorial(j)) / Rational(factorial(2 * j + 1)) * g.derivative(j)(u));
    }
    return out;
}

/// Same from a function model of f; psi_f = -x (log f)'.
inline std::vector<HighReal> taylor_at_2(const Model& f, const HighReal& u, int order) {
    const Model psi = log_derivative_psi(f);
    if (auto r = as_rational(psi); r && u == to_real<HighReal>(rational_from_real(u))) {
        std::vector<HighReal> out;
        for (const Rational& q : taylor_at_2(*r, rational_from_real(u), order)) out.push_back(to_real<HighReal>(q));
        return out;
    }
    const std::vector<HighReal> dpsi = derivatives_at<HighReal>(psi, 2 * order + 1, u);
    std::vector<HighReal> out;
    for (int j = 0; j <= order; ++j) {
        // (x^{2j+1} psi^{(j+1)})^{(j)} by Leibniz.
        HighReal s = 0;
        for (int i = 0; i <= j && i <= 2 * j + 1; ++i) {
            HighReal falling = 1;
            for (int m = 0; m < i; ++m) falling *= HighReal(2 * j + 1 - m);
            s += to_real<HighReal>(Rational(binomial(j, i))) * falling * pow(u, 2 * j + 1 - i) *
                 dpsi[static_cast<std::size_t>(2 * j + 1 - i)];
        }
        out.push_back(s * to_real<HighReal>(Rational(factorial(j))) / to_real<HighReal>(Rational(factorial(2 * j + 1))));
    }
    return out;
}

/// Delta_u(f) as an exact v-field function when psi_f is rational.
inline HyperbolicFn delta_of_rational_psi(const RationalFn& psi, const Rational& u) {
    const RationalFn num = psi.compose(RationalFn::monomial(u, 1)) - psi.compose(RationalFn::monomial(u, -1));
    return HyperbolicFn(num / detail::v_minus_inverse());
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function on z <= 0 (and terminating series anywhere).

class Hyp2F1Error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

template <class Real>
bool nonpositive_integer(const Real& a) {
    using std::floor;
    return a <= Real(0) && floor(a) == a;
}

template <class Real>
Real hyp2f1_series(const Real& a, const Real& b, const Real& c, const Real& z, const Real& rel_tol,
                   long max_terms = 200000) {
    using std::abs;
    Real term = 1, sum = 1;
    for (long n = 0; n < max_terms; ++n) {
        term *= (a + Real(n)) * (b + Real(n)) / ((c + Real(n)) * Real(n + 1)) * z;
        sum += term;
        if (term == Real(0) || abs(term) <= rel_tol * abs(sum) * Real(1e-2)) return sum;
    }
    throw Hyp2F1Error("hyp2f1 series did not converge");
}

}  // namespace detail

/// Euler integral Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt, c > b > 0, z < 1.
template <class Real>
Real hyp2f1_euler(const Real& a, const Real& b, const Real& c, const Real& z, const Real& rel_tol = Real(1e-14)) {
    using std::pow;
    if (!(c > b && b > Real(0))) throw Hyp2F1Error("Euler integral needs c > b > 0");
    if (!(z < Real(1))) throw Hyp2F1Error("Euler integral needs z < 1");
    // t = 1 - s^2 removes the (1-t)^{c-b-1} endpoint behaviour.
    auto f = [&](Real s) -> Real {
        const Real t = Real(1) - s * s;
        return 2 * pow(s, 2 * (c - b) - 1) * pow(t, b - 1) * pow(Real(1) - z * t, -a);
    };
    QuadOptions o;
    o.rel_tol = static_cast<double>(rel_tol);
    o.abs_tol = 0;
    const auto r = integrate_endpoint_singular<Real>(f, Real(0), Real(1), o);
    if (!r.converged) throw QuadratureError("hyp2f1 Euler integral did not converge", static_cast<double>(r.error));
    using boost::math::tgamma;
    return r.value * tgamma(c) / (tgamma(b) * tgamma(c - b));
}

/// 2F1(a, b; c; z). Series for |z| < 0.95 or terminating parameters, Euler integral otherwise.
template <class Real>
Real hyp2f1(const Real& a, const Real& b, const Real& c, const Real& z, const Real& rel_tol = Real(1e-14)) {
    using std::abs;
    if (detail::nonpositive_integer(c)) throw Hyp2F1Error("hyp2f1: c is a non-positive integer");
    if (z == Real(0)) return 1;
    if (detail::nonpositive_integer(a) || detail::nonpositive_integer(b) || abs(z) < Real(0.95))
        return detail::hyp2f1_series(a, b, c, z, rel_tol);
    if (z > Real(0)) throw Hyp2F1Error("hyp2f1 supports z <= 0 outside the unit disc");
    if (c > b && b > Real(0)) return hyp2f1_euler(a, b, c, z, rel_tol);
    if (c > a && a > Real(0)) return hyp2f1_euler(b, a, c, z, rel_tol);
    throw Hyp2F1Error("hyp2f1: parameters outside the Euler integral range");
}

/// -x binom(2k,k) 2F1(1, k+1/2; k+1; 4x), x = 1/(2 - w).
template <class Real>
Real delta_k1_hypergeometric(int k, const Real& w) {
    const Real x = Real(1) / (Real(2) - w);
    return -x * to_real<Real>(Rational(binomial(2 * k, k))) * hyp2f1(Real(1), Real(k) + Real(0.5), Real(k + 1), 4 * x);
}

/// (2k)!/(sqrt(pi) k! Gamma(k+1/2)) int_0^1 t^{k-1/2}(1-t)^{-1/2}/(w-2+4t) dt.
template <class Real>
Real delta_k1_euler(int k, const Real& w) {
    using std::pow;
    using std::sqrt;
    auto f = [&](Real s) -> Real {
        const Real t = Real(1) - s * s;  // t = 1 - s^2 absorbs (1-t)^{-1/2}
        return 2 * pow(t, Real(k) - Real(0.5)) / (w - 2 + 4 * t);
    };
    QuadOptions o;
    o.abs_tol = 0;
    const auto r = integrate_endpoint_singular<Real>(f, Real(0), Real(1), o);
    const Real c = to_real<Real>(Rational(factorial(2 * k))) /
                   (sqrt(pi_value<Real>()) * to_real<Real>(Rational(factorial(k))) * boost::math::tgamma(Real(k) + Real(0.5)));
    return c * r.value;
}

/// -x sum_{i=0}^k binom(2k,k+i) 2F1(i+1, k+1/2; k+i+1; 4x) (x y)^i, x = 1/(2-w), y = u + 1/u - 2.
template <class Real>
Real appendix_sum(int k, const Real& u, const Real& w) {
    const Real x = Real(1) / (Real(2) - w);
    const Real y = u + Real(1) / u - Real(2);
    Real s = 0, xy_pow = 1;
    for (int i = 0; i <= k; ++i) {
        s += to_real<Real>(Rational(binomial(2 * k, k + i))) *
             hyp2f1(Real(i + 1), Real(k) + Real(0.5), Real(k + i + 1), 4 * x) * xy_pow;
        xy_pow *= x * y;
    }
    return -x * s;
}

/// |appendix_sum - Delta_{k,u}(w)| for w >= u + 1/u.
inline double appendix_sum_check(int k, const Rational& u, double w) {
    const double lo = to_real<double>(u + 1 / u);
    if (w < lo) throw std::domain_error("appendix_sum_check needs w >= u + 1/u");
    const DeltaKU d = build_delta(k, u);
    return std::abs(appendix_sum<double>(k, to_real<double>(u), w) - d.at_w(w));
}

}  // namespace stieltjesk
