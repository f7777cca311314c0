#pragma once

// Exact sign certificates for rational functions on an interval, by Sturm
// root isolation.

#include <optional>
#include <vector>

#include "stieltjesk/ratfn.hpp"

namespace stieltjesk {

namespace detail {

/// Sign of p just to the right of a (first nonzero derivative at a).
inline int sign_right_of(const QPoly& p, const Rational& a) {
    QPoly d = p;
    for (int j = 0; j <= p.degree(); ++j) {
        const int s = sgn(d(a));
        if (s != 0) return s;
        d = d.derivative();
    }
    return 0;
}

/// Sign of p just to the left of b.
inline int sign_left_of(const QPoly& p, const Rational& b) {
    QPoly d = p;
    for (int j = 0; j <= p.degree(); ++j) {
        const int s = sgn(d(b));
        if (s != 0) return j % 2 ? -s : s;
        d = d.derivative();
    }
    return 0;
}

/// Bound exceeding every real root of p.
inline Rational root_bound(const QPoly& p) {
    Rational m(0);
    for (int i = 0; i < p.degree(); ++i) {
        Rational q = p.coeff(i) / p.leading();
        if (q < 0) q = -q;
        if (q > m) m = q;
    }
    return m + 1;
}

/// Disjoint sorted intervals (a, b), one root each; endpoints are never roots
/// unless they coincide with lo or hi.
inline std::vector<std::pair<Rational, Rational>> isolate_roots(const QPoly& p, const Rational& lo, const Rational& hi) {
    std::vector<std::pair<Rational, Rational>> out;
    std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        const int c = count_roots_open(p, a, b);
        if (c == 0) continue;
        if (c == 1) {
            out.emplace_back(a, b);
            continue;
        }
        Rational m = (a + b) / 2;
        for (int shift = 3; p(m) == 0; ++shift) m = a + (b - a) * make_rational(shift - 1, 2 * shift);
        stack.emplace_back(m, b);
        stack.emplace_back(a, m);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
}

/// Witness close to `edge` inside (edge, toward) (or (toward, edge)) where p < 0.
inline std::optional<Rational> approach(const QPoly& p, const Rational& edge, Rational toward) {
    for (int i = 0; i < 2000; ++i) {
        if (p(toward) < 0) return toward;
        toward = (edge + toward) / 2;
    }
    return std::nullopt;
}

}  // namespace detail

/// A point of (lo, hi) where r < 0, or nullopt when r >= 0 on the whole interval
/// (poles excluded). hi = nullopt means +infinity.
inline std::optional<Rational> negative_point(const RationalFn& r, const Rational& lo, const std::optional<Rational>& hi) {
    if (r.is_zero()) return std::nullopt;
    const QPoly q = r.num() * r.den();
    if (q.degree() <= 0) {
        if (sgn(q.leading()) >= 0) return std::nullopt;
        return hi ? Rational((lo + *hi) / 2) : Rational(lo + 1);
    }
    Rational top;
    if (hi) {
        top = *hi;
    } else {
        top = detail::root_bound(q);
        if (top <= lo) top = lo + 1;
    }
    const auto roots = detail::isolate_roots(q, lo, top);
    // First region.
    if (roots.empty() || roots.front().first > lo) {
        const Rational probe = roots.empty() ? (lo + top) / 2 : roots.front().first;
        if (roots.empty()) {
            if (detail::sign_right_of(q, lo) < 0) return detail::approach(q, lo, probe);
        } else if (q(probe) < 0) {
            return probe;
        }
    } else if (detail::sign_right_of(q, lo) < 0) {
        return detail::approach(q, lo, roots.front().second);
    }
    // Between consecutive roots.
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
        if (q(roots[i].second) < 0) return roots[i].second;
    // Last region.
    if (!roots.empty()) {
        const Rational& b = roots.back().second;
        if (b < top) {
            if (q(b) < 0) return b;
        } else if (hi) {
            if (detail::sign_left_of(q, top) < 0) return detail::approach(q, top, roots.back().first);
        } else if (q(top) < 0) {
            return top;
        }
    }
    if (!hi && sgn(q.leading()) < 0) return top + 1;
    return std::nullopt;
}

}  // namespace stieltjesk
