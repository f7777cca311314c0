#pragma once

// Shared helpers for the test binaries: random exact objects and small
// numeric comparisons.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "stieltjesk/ratfn.hpp"

namespace test_support {

inline stieltjesk::Rational random_rational(std::mt19937_64& rng, int max_num = 9, int max_den = 5) {
    std::uniform_int_distribution<int> n(-max_num, max_num);
    std::uniform_int_distribution<int> d(1, max_den);
    return stieltjesk::make_rational(n(rng), d(rng));
}

inline stieltjesk::QPoly random_poly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    const int d = deg(rng);
    std::vector<stieltjesk::Rational> c;
    for (int i = 0; i <= d; ++i) c.push_back(random_rational(rng));
    return stieltjesk::QPoly(c);
}

inline stieltjesk::RationalFn random_ratfn(std::mt19937_64& rng, int max_degree) {
    stieltjesk::QPoly den;
    while (den.is_zero()) den = random_poly(rng, max_degree);
    return stieltjesk::RationalFn(random_poly(rng, max_degree), den);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace test_support

namespace test_support {

/// Taylor coefficients at w = 2 (as derivatives) of a function of w given in the
/// v-chart, obtained by expanding in s = v - 1 and re-expanding in X = w - 2 = s^2/(1+s).
/// Returns nullopt if the odd s-coefficients are inconsistent with a series in X.
inline std::optional<std::vector<stieltjesk::Rational>> w_taylor_via_v_series(const stieltjesk::RationalFn& in_v,
                                                                               int order) {
    using namespace stieltjesk;
    const int n = 2 * order + 2;  // s-series length needed
    const RationalFn shifted = in_v.compose(RationalFn(QPoly{Rational(1), Rational(1)}));
    const QPoly& num = shifted.num();
    const QPoly& den = shifted.den();
    if (den.coeff(0) == 0) return std::nullopt;
    // num / den as a power series in s.
    std::vector<Rational> f(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        Rational acc = num.coeff(i);
        for (int j = 1; j <= i; ++j) acc -= den.coeff(j) * f[static_cast<std::size_t>(i - j)];
        f[static_cast<std::size_t>(i)] = acc / den.coeff(0);
    }
    // X = s^2 (1 - s + s^2 - ...), truncated powers.
    auto mul = [n](const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> c(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) c[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
        return c;
    };
    std::vector<Rational> X(static_cast<std::size_t>(n) + 1);
    for (int i = 2; i <= n; ++i) X[static_cast<std::size_t>(i)] = (i % 2 ? -1 : 1);
    std::vector<Rational> power(static_cast<std::size_t>(n) + 1);
    power[0] = 1;
    std::vector<Rational> residual = f, coeffs;
    for (int j = 0; j <= order; ++j) {
        const Rational c = residual[static_cast<std::size_t>(2 * j)];
        coeffs.push_back(c);
        for (int i = 0; i <= n; ++i) residual[static_cast<std::size_t>(i)] -= c * power[static_cast<std::size_t>(i)];
        power = mul(power, X);
    }
    for (int i = 0; i <= 2 * order + 1; ++i)
        if (residual[static_cast<std::size_t>(i)] != 0) return std::nullopt;
    std::vector<Rational> out;
    for (int j = 0; j <= order; ++j) out.push_back(coeffs[static_cast<std::size_t>(j)] * Rational(factorial(j)));
    return out;
}

}  // namespace test_support
