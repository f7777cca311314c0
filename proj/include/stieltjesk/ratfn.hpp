#pragma once

// Exact rational functions num/den over Q in normal form: gcd(num, den) = 1
// and den monic, so structural equality is mathematical equality.

#include <optional>
#include <stdexcept>
#include <string>

#include "stieltjesk/jet.hpp"
#include "stieltjesk/poly.hpp"

namespace stieltjesk {

class RationalFn {
public:
    RationalFn() : num_(), den_(QPoly::constant(Rational(1))) {}
    RationalFn(const Rational& c) : num_(QPoly::constant(c)), den_(QPoly::constant(Rational(1))) {}  // NOLINT
    RationalFn(QPoly p) : num_(std::move(p)), den_(QPoly::constant(Rational(1))) {}                  // NOLINT
    RationalFn(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static RationalFn x() { return RationalFn(QPoly::x()); }
    /// c * x^e for any integer e.
    static RationalFn monomial(const Rational& c, int e) {
        if (e >= 0) return RationalFn(QPoly::monomial(c, e));
        return RationalFn(QPoly::constant(c), QPoly::monomial(Rational(1), -e));
    }

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }
    bool is_constant() const { return is_polynomial() && num_.degree() <= 0; }
    Rational constant_value() const { return num_.coeff(0); }

    friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
        if (a.den_ == b.den_) return RationalFn(a.num_ + b.num_, a.den_);
        return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a) { return RationalFn(-a.num_, a.den_, NoNormalize{}); }
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }
    friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
        if (b.is_zero()) throw std::domain_error("rational function division by zero");
        return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
    }
    RationalFn& operator+=(const RationalFn& o) { return *this = *this + o; }
    RationalFn& operator-=(const RationalFn& o) { return *this = *this - o; }
    RationalFn& operator*=(const RationalFn& o) { return *this = *this * o; }
    friend bool operator==(const RationalFn& a, const RationalFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const RationalFn& a, const RationalFn& b) { return !(a == b); }

    RationalFn pow(int e) const {
        if (e < 0) return RationalFn(Rational(1)) / pow(-e);
        return RationalFn(num_.pow(e), den_.pow(e), NoNormalize{});
    }

    RationalFn derivative(int order = 1) const {
        if (order < 0) throw std::domain_error("negative derivative order");
        if (order == 0 || is_zero()) return *this;
        if (is_polynomial()) return RationalFn(num_.derivative(order), den_);
        if (den_.valuation() == den_.degree()) {
            // N / x^m: N_{j+1} = x N_j' - (m + j) N_j over x^{m+j+1}.
            const int m = den_.degree();
            QPoly n = num_;
            for (int j = 0; j < order; ++j) n = n.derivative().shifted(1) - n * Rational(m + j);
            return RationalFn(n, QPoly::monomial(Rational(1), m + order));
        }
        // r^{(j)} = N_j / D^{j+1} with N_{j+1} = N_j' D - (j+1) N_j D'; one reduction at the end.
        const QPoly dd = den_.derivative();
        QPoly n = num_;
        for (int j = 0; j < order; ++j) n = n.derivative() * den_ - n * dd * Rational(j + 1);
        return RationalFn(n, den_.pow(order + 1));
    }

    /// r(q(x)) for a rational function q.
    RationalFn compose(const RationalFn& q) const {
        auto horner = [&q](const QPoly& p) {
            RationalFn acc;
            for (int i = p.degree(); i >= 0; --i) acc = acc * q + RationalFn(p.coeff(i));
            return acc;
        };
        return horner(num_) / horner(den_);
    }

    /// r(1/x).
    RationalFn reciprocal_argument() const {
        const int d = std::max(num_.degree(), den_.degree());
        return RationalFn(num_.reversed(d), den_.reversed(d));
    }

    /// r(s*x).
    RationalFn scaled_argument(const Rational& s) const { return RationalFn(num_.scaled(s), den_.scaled(s)); }

    /// x -> -r(1/x).
    RationalFn hat() const { return -reciprocal_argument(); }

    bool has_pole_at(const Rational& x) const { return den_(x) == 0; }

    Rational operator()(const Rational& x) const {
        const Rational d = den_(x);
        if (d == 0) throw std::domain_error("rational function evaluated at a pole: x=" + x.get_str());
        return num_(x) / d;
    }

    template <class V>
    V eval(const V& x) const {
        return num_.convert<decltype(value_of(x))>()(x) / den_.convert<decltype(value_of(x))>()(x);
    }

    /// Limit at 0+ or +infinity; nullopt when it diverges.
    std::optional<Rational> limit_at_zero() const {
        const int vn = num_.valuation();
        if (vn < 0) return Rational(0);
        const int vd = den_.valuation();
        if (vn > vd) return Rational(0);
        if (vn < vd) return std::nullopt;
        return num_.coeff(vn) / den_.coeff(vd);
    }
    std::optional<Rational> limit_at_infinity() const {
        if (num_.is_zero()) return Rational(0);
        if (num_.degree() < den_.degree()) return Rational(0);
        if (num_.degree() > den_.degree()) return std::nullopt;
        return num_.leading() / den_.leading();
    }
    /// Exponent e with r ~ c x^e at 0 (num_.valuation - den_.valuation).
    int order_at_zero() const { return num_.valuation() - den_.valuation(); }
    int order_at_infinity() const { return num_.degree() - den_.degree(); }

    /// True when num or den vanish somewhere in the open interval (lo, hi).
    bool has_zero_or_pole_in(const Rational& lo, const std::optional<Rational>& hi) const {
        auto roots = [&](const QPoly& p) {
            if (p.degree() <= 0) return 0;
            return hi ? count_roots_open(p, lo, *hi) : count_roots_open(p, lo, lo, true);
        };
        return is_zero() || roots(num_) > 0 || roots(den_) > 0;
    }

    std::string str(const std::string& var = "x") const {
        if (is_polynomial()) return format_poly(num_ * (Rational(1) / den_.leading()), var);
        return "(" + format_poly(num_, var) + ")/(" + format_poly(den_, var) + ")";
    }

private:
    struct NoNormalize {};
    RationalFn(QPoly num, QPoly den, NoNormalize) : num_(std::move(num)), den_(std::move(den)) {}

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
        if (num_.is_zero()) {
            den_ = QPoly::constant(Rational(1));
            return;
        }
        if (den_.degree() > 0) {
            QPoly g = gcd(num_, den_);
            if (g.degree() > 0) {
                num_ = divmod(num_, g).first;
                den_ = divmod(den_, g).first;
            }
        }
        const Rational lead = den_.leading();
        if (lead != 1) {
            num_ *= Rational(1) / lead;
            den_ *= Rational(1) / lead;
        }
    }

    QPoly num_;
    QPoly den_;
};

inline std::ostream& operator<<(std::ostream& os, const RationalFn& r) { return os << r.str(); }

/// Theta_n(h) = x^n (x^{n-1} h)^{(2n-1)}.
inline RationalFn theta_operator(const RationalFn& h, int n) {
    if (n < 1) throw std::domain_error("theta operator needs n >= 1");
    return RationalFn::monomial(Rational(1), n) * (RationalFn::monomial(Rational(1), n - 1) * h).derivative(2 * n - 1);
}

}  // namespace stieltjesk
