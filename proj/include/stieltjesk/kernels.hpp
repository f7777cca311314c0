#pragma once

// The kernel family of order k: P_k(x) = sum_{n=0}^k binom(2k, n+k) (-x)^n,
// Phat_k = P_k - P_k(0), the profile psi_k(y) = P_k(1/y) for y >= 1 and
// -Phat_k(y) for y < 1, and Phi_k(x, t) = psi_k(x/t) / x.

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "stieltjesk/jet.hpp"
#include "stieltjesk/piecewise.hpp"

namespace stieltjesk {

struct KernelFamily {
    int k = 0;
    QPoly P;
    QPoly Phat;
    PiecewiseRationalFn psi;

    BigInt central_binomial() const { return binomial(2 * k, k); }

    /// Coefficients of P_k in floating type T (cached per family).
    template <class T>
    const std::vector<T>& coeffs() const {
        if constexpr (std::is_same_v<T, double>) return coeffs_d;
        else if constexpr (std::is_same_v<T, long double>) return coeffs_ld;
        else return coeffs_q;
    }

    std::vector<double> coeffs_d;
    std::vector<long double> coeffs_ld;
    std::vector<HighReal> coeffs_q;
};

namespace detail {

inline KernelFamily make_kernel_family(int k) {
    if (k < 0) throw std::domain_error("kernel order must be nonnegative");
    KernelFamily fam;
    fam.k = k;
    std::vector<Rational> c;
    for (int n = 0; n <= k; ++n) c.push_back(Rational((n % 2 ? -1 : 1) * binomial(2 * k, n + k)));
    fam.P = QPoly(c);
    fam.Phat = fam.P - QPoly::constant(fam.P.coeff(0));
    const RationalFn low = -RationalFn(fam.Phat);
    const RationalFn high(fam.P.reversed(k), QPoly::monomial(Rational(1), k));  // P_k(1/y)
    fam.psi = PiecewiseRationalFn({Rational(1)}, {low, high});
    for (const auto& v : fam.P.coeffs()) {
        fam.coeffs_d.push_back(to_real<double>(v));
        fam.coeffs_ld.push_back(to_real<long double>(v));
        fam.coeffs_q.push_back(to_real<HighReal>(v));
    }

    // Construction-time invariants.
    const BigInt central = binomial(2 * k, k);
    if (fam.P(Rational(0)) != Rational(central)) throw std::logic_error("kernel: P_k(0) != binom(2k,k)");
    if (k >= 1) {
        if (fam.P(Rational(1)) != Rational(central) / 2) throw std::logic_error("kernel: P_k(1) != binom(2k,k)/2");
        // psi_k > 0: -Phat_k has no zero on (0,1], P_k has none on (0,1].
        if (count_roots_open(fam.Phat, Rational(0), Rational(1)) != 0 || !(fam.Phat(Rational(1)) < 0))
            throw std::logic_error("kernel: psi_k changes sign on (0,1)");
        if (count_roots_open(fam.P, Rational(0), Rational(1)) != 0 || !(fam.P(Rational(1)) > 0))
            throw std::logic_error("kernel: psi_k changes sign on (1,inf)");
        // C^{2k-1} at y = 1: Taylor coefficients in s = y - 1 through order 2k-1.
        const int order = 2 * k - 1;
        const QPoly shift{Rational(1), Rational(1)};
        const QPoly low_taylor = (-fam.Phat).compose(shift);
        // (1+s)^{-k} truncated, times rev P_k(1+s).
        std::vector<Rational> inv(static_cast<std::size_t>(order) + 1);
        for (int i = 0; i <= order; ++i)
            inv[static_cast<std::size_t>(i)] = Rational((i % 2 ? -1 : 1) * binomial(k + i - 1, i));
        const QPoly rev_taylor = fam.P.reversed(k).compose(shift);
        for (int i = 0; i <= order; ++i) {
            Rational high_coeff(0);
            for (int j = 0; j <= i; ++j) high_coeff += rev_taylor.coeff(j) * inv[static_cast<std::size_t>(i - j)];
            if (high_coeff != low_taylor.coeff(i))
                throw std::logic_error("kernel: psi_k not C^{2k-1} at 1 (order " + std::to_string(i) + ")");
        }
    }
    return fam;
}

}  // namespace detail

/// Shared, immutable kernel family (built once per k).
inline const KernelFamily& build_kernel_family(int k) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<const KernelFamily>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, std::make_unique<const KernelFamily>(detail::make_kernel_family(k))).first;
    return *it->second;
}

/// psi_k(y) over T or Jet<T>.
template <class V>
V psi_value(const KernelFamily& fam, const V& y) {
    using T = decltype(value_of(y));
    const auto& c = fam.coeffs<T>();
    if (!(value_of(y) < T(1))) {
        const V z = T(1) / y;
        V r = z * T(0) + c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) r = r * z + c[i];
        return r;
    }
    // -Phat_k(y) = -sum_{n>=1} c_n y^n
    V r = y * T(0);
    for (std::size_t i = c.size() - 1; i >= 1; --i) r = (r + c[i]) * y;
    return -r;
}

inline Rational psi_exact(const KernelFamily& fam, const Rational& y) { return fam.psi(y); }

/// Phi_k(x, t), exact for rational arguments.
inline Rational eval_Phi(int k, const Rational& x, const Rational& t) {
    if (x <= 0 || t < 0) throw std::domain_error("eval_Phi needs x > 0, t >= 0");
    const KernelFamily& fam = build_kernel_family(k);
    if (t == 0) return Rational(fam.central_binomial()) / x;
    return fam.psi(x / t) / x;
}

/// Phi_k(x, t) in floating point; x may be a jet.
template <class V, class T>
V eval_Phi(int k, const V& x, const T& t) {
    if (!(value_of(x) > T(0)) || t < T(0)) throw std::domain_error("eval_Phi needs x > 0, t >= 0");
    const KernelFamily& fam = build_kernel_family(k);
    const auto& c = fam.coeffs<T>();
    if (t == T(0)) return c[0] / x;
    if (!(value_of(x) < t)) {
        // z P_k(z) / t with z = t/x
        const V z = t / x;
        V r = z * T(0) + c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) r = r * z + c[i];
        return r * z / t;
    }
    // -(Phat_k(y) / y) / t with y = x/t, a polynomial of degree k-1
    const V y = x / t;
    V r = y * T(0);
    for (std::size_t i = c.size() - 1; i >= 1; --i) r = r * y + c[i];
    return -r / t;
}

/// Psi_k(x, t) = x Phi_k(x, t) = psi_k(x/t).
inline Rational eval_Psi(int k, const Rational& x, const Rational& t) { return x * eval_Phi(k, x, t); }

/// i-th partial derivative of Phi_k(., t) at x, exact.
inline Rational eval_Phi_x_derivative(int k, int i, const Rational& x, const Rational& t) {
    if (x <= 0 || t < 0 || i < 0) throw std::domain_error("eval_Phi_x_derivative: bad arguments");
    const KernelFamily& fam = build_kernel_family(k);
    if (t == 0) {
        // binom(2k,k) (-1)^i i! / x^{i+1}
        return Rational(fam.central_binomial() * factorial(i)) * Rational(i % 2 ? -1 : 1) / rpow(x, i + 1);
    }
    const PiecewiseRationalFn phi =
        fam.psi.argument_divided_by(t) * PiecewiseRationalFn(RationalFn::monomial(Rational(1), -1));
    const PiecewiseRationalFn d = phi.derivative_pieces(i);
    if (x == t) {
        if (i >= 2 * k) throw std::domain_error("eval_Phi_x_derivative: order >= 2k at x = t is distributional");
        const Rational left = d.left_limit(0), right = d.right_limit(0);
        if (left != right) throw std::logic_error("eval_Phi_x_derivative: one-sided derivatives disagree");
        return right;
    }
    return d(x);
}

/// Floating version through jets.
template <class T>
T eval_Phi_x_derivative(int k, int i, const T& x, const T& t) {
    if (!(x > T(0)) || t < T(0) || i < 0) throw std::domain_error("eval_Phi_x_derivative: bad arguments");
    if (x == t && i >= 2 * k) throw std::domain_error("eval_Phi_x_derivative: order >= 2k at x = t is distributional");
    return eval_Phi(k, Jet<T>::variable(i, x), t).derivative(i);
}

/// (-1)^{n-1} (x^{n-1} psi_k)^{(2n-1)}, classical on each side of 1.
inline PiecewiseRationalFn widder_function(int n, int k) {
    if (n < 1) throw std::domain_error("widder_function needs n >= 1");
    const KernelFamily& fam = build_kernel_family(k);
    const PiecewiseRationalFn d =
        (fam.psi * PiecewiseRationalFn(RationalFn::monomial(Rational(1), n - 1))).derivative_pieces(2 * n - 1);
    return (n % 2 == 1) ? d : -d;
}

/// pi_k = (-1)^k (x^k psi_k)^{(2k-1)}.
inline PiecewiseRationalFn pi_k(int k) {
    if (k < 1) throw std::domain_error("pi_k needs k >= 1");
    const KernelFamily& fam = build_kernel_family(k);
    const PiecewiseRationalFn d =
        (fam.psi * PiecewiseRationalFn(RationalFn::monomial(Rational(1), k))).derivative_pieces(2 * k - 1);
    return (k % 2 == 0) ? d : -d;
}

struct Atom {
    Rational location;
    Rational mass;
};

/// Jump at x = t of (-1)^k (x^{k+1} Phi_k(x,t))^{(2k)}, from exact one-sided limits.
inline Atom dirac_jump(int k, const Rational& t) {
    if (k < 1 || t <= 0) throw std::domain_error("dirac_jump needs k >= 1, t > 0");
    const KernelFamily& fam = build_kernel_family(k);
    // x^{k+1} Phi_k(x,t) = x^k psi_k(x/t)
    const PiecewiseRationalFn h =
        fam.psi.argument_divided_by(t) * PiecewiseRationalFn(RationalFn::monomial(Rational(1), k));
    PiecewiseRationalFn d = h.derivative_pieces(2 * k);
    if (k % 2 == 1) d = -d;
    return {t, d.right_limit(0) - d.left_limit(0)};
}

/// Phi_k(x,t) / binom(2k,k), which tends to 1/(x+t) as k grows.
inline Rational kernel_limit_check(int k, const Rational& x, const Rational& t) {
    return eval_Phi(k, x, t) / Rational(binomial(2 * k, k));
}
template <class T>
T kernel_limit_check(int k, const T& x, const T& t) {
    return eval_Phi(k, x, t) / to_real<T>(Rational(binomial(2 * k, k)));
}

}  // namespace stieltjesk
