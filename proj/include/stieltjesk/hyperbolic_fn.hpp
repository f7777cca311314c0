#pragma once

// Functions of w = v + 1/v on w > 2, stored as rational functions of v on the
// branch v >= 1, so d/dw = v^2/(v^2-1) d/dv stays exact.

#include <stdexcept>
#include <vector>

#include "stieltjesk/jet.hpp"
#include "stieltjesk/ratfn.hpp"

namespace stieltjesk {

class HyperbolicFn {
public:
    HyperbolicFn() = default;
    explicit HyperbolicFn(RationalFn in_v) : r_(std::move(in_v)) {}

    /// w = v + 1/v.
    static RationalFn w_in_v() { return RationalFn(QPoly{Rational(1), Rational(0), Rational(1)}, QPoly::x()); }

    /// Embeds a polynomial in w.
    static HyperbolicFn from_w_poly(const QPoly& p) {
        const RationalFn w = w_in_v();
        RationalFn acc;
        for (int i = p.degree(); i >= 0; --i) acc = acc * w + RationalFn(p.coeff(i));
        return HyperbolicFn(acc);
    }

    const RationalFn& in_v() const { return r_; }

    HyperbolicFn d_dw() const {
        // v^2/(v^2-1) * dr/dv
        const RationalFn factor(QPoly::monomial(Rational(1), 2), QPoly{Rational(-1), Rational(0), Rational(1)});
        return HyperbolicFn(factor * r_.derivative());
    }
    HyperbolicFn d_dw(int order) const {
        HyperbolicFn h = *this;
        for (int i = 0; i < order; ++i) h = h.d_dw();
        return h;
    }

    /// Polynomial in w when the v-form is a Laurent polynomial invariant under
    /// v -> 1/v; nullopt otherwise.
    std::optional<QPoly> as_w_poly() const {
        if (r_.is_zero()) return QPoly();
        const QPoly& den = r_.den();
        if (den.degree() < 0 || den.valuation() != den.degree()) return std::nullopt;  // den must be c*v^m
        const int m = den.degree();
        const Rational scale = Rational(1) / den.leading();
        // Laurent coefficients a_e for e = i - m.
        const QPoly& num = r_.num();
        auto laurent = [&](int e) -> Rational { return num.coeff(e + m) * scale; };
        const int top = num.degree() - m;
        const int bottom = num.valuation() - m;
        if (top != -bottom) return std::nullopt;
        for (int e = 1; e <= top; ++e)
            if (laurent(e) != laurent(-e)) return std::nullopt;
        // v^e + v^-e = D_e(w) with D_0 = 2, D_1 = w, D_e = w D_{e-1} - D_{e-2}.
        std::vector<QPoly> dickson{QPoly::constant(Rational(2)), QPoly::x()};
        for (int e = 2; e <= top; ++e) dickson.push_back(QPoly::x() * dickson[e - 1] - dickson[e - 2]);
        QPoly out = QPoly::constant(laurent(0));
        for (int e = 1; e <= top; ++e) out += dickson[static_cast<std::size_t>(e)] * laurent(e);
        return out;
    }

    Rational at_v(const Rational& v) const { return r_(v); }

    /// Value at real w > 2 through the v >= 1 branch; V may be a jet in w.
    template <class V>
    V at_w(const V& w) const {
        using std::sqrt;
        const V v = (w + sqrt(w * w - decltype(value_of(w))(4))) / decltype(value_of(w))(2);
        return r_.eval(v);
    }

    friend HyperbolicFn operator+(const HyperbolicFn& a, const HyperbolicFn& b) { return HyperbolicFn(a.r_ + b.r_); }
    friend HyperbolicFn operator-(const HyperbolicFn& a, const HyperbolicFn& b) { return HyperbolicFn(a.r_ - b.r_); }
    friend HyperbolicFn operator*(const HyperbolicFn& a, const HyperbolicFn& b) { return HyperbolicFn(a.r_ * b.r_); }
    friend bool operator==(const HyperbolicFn& a, const HyperbolicFn& b) { return a.r_ == b.r_; }

private:
    RationalFn r_;
};

inline std::ostream& operator<<(std::ostream& os, const HyperbolicFn& h) { return os << h.in_v().str("v"); }

/// v >= 1 with v + 1/v = w.
template <class T>
T v_of_w(const T& w) {
    using std::sqrt;
    return (w + sqrt((w - T(2)) * (w + T(2)))) / T(2);
}

}  // namespace stieltjesk
