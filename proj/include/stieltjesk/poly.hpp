#pragma once

// Dense univariate polynomials over a field F (Rational for exact work, a
// floating type for evaluation). Index i of the coefficient vector holds the
// coefficient of x^i; trailing zeros are always trimmed.

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stieltjesk/rational.hpp"

namespace stieltjesk {

template <class F>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<F> coeffs) : c_(std::move(coeffs)) { canonicalize_and_trim(); }
    Poly(std::initializer_list<F> coeffs) : c_(coeffs) { canonicalize_and_trim(); }

    static Poly constant(const F& v) { return Poly(std::vector<F>{v}); }
    static Poly monomial(const F& coeff, int degree) {
        std::vector<F> c(static_cast<std::size_t>(degree) + 1, F(0));
        c.back() = coeff;
        return Poly(std::move(c));
    }
    static Poly x() { return monomial(F(1), 1); }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    const std::vector<F>& coeffs() const { return c_; }
    F coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)] : F(0); }
    F leading() const { return c_.empty() ? F(0) : c_.back(); }

    /// Index of the lowest nonzero coefficient (-1 for zero).
    int valuation() const {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != F(0)) return static_cast<int>(i);
        return -1;
    }

    template <class V>
    V operator()(const V& x) const {
        if (c_.empty()) return x * F(0);
        V r = x * F(0) + c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) r = r * x + c_[i];
        return r;
    }
    F operator()(const F& x) const {
        F r(0);
        for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
        return r;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), F(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) { return *this += -o; }
    Poly& operator*=(const F& s) {
        for (auto& v : c_) v *= s;
        trim();
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const F& s) { return a *= s; }
    friend Poly operator*(const F& s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<F> c(a.c_.size() + b.c_.size() - 1, F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly pow(int e) const {
        if (e < 0) throw std::domain_error("negative polynomial power");
        Poly r = constant(F(1));
        Poly b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    Poly derivative(int order = 1) const {
        if (order < 0) throw std::domain_error("negative derivative order");
        std::vector<F> c = c_;
        for (int k = 0; k < order; ++k) {
            if (c.empty()) break;
            std::vector<F> d(c.size() - 1, F(0));
            for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * F(static_cast<long>(i));
            c = std::move(d);
        }
        return Poly(std::move(c));
    }

    /// Antiderivative vanishing at 0.
    Poly antiderivative() const {
        std::vector<F> c(c_.size() + 1, F(0));
        for (std::size_t i = 0; i < c_.size(); ++i) c[i + 1] = c_[i] / F(static_cast<long>(i + 1));
        return Poly(std::move(c));
    }

    /// p(q(x)).
    Poly compose(const Poly& q) const {
        Poly r;
        for (std::size_t i = c_.size(); i-- > 0;) r = r * q + constant(c_[i]);
        return r;
    }

    /// x^degree * p(1/x) for the given degree >= deg p.
    Poly reversed(int degree) const {
        if (degree < this->degree()) throw std::domain_error("reversal degree below polynomial degree");
        std::vector<F> c(static_cast<std::size_t>(degree) + 1, F(0));
        for (std::size_t i = 0; i < c_.size(); ++i) c[static_cast<std::size_t>(degree) - i] = c_[i];
        return Poly(std::move(c));
    }

    /// p(s*x).
    Poly scaled(const F& s) const {
        std::vector<F> c = c_;
        F f(1);
        for (auto& v : c) {
            v *= f;
            f *= s;
        }
        return Poly(std::move(c));
    }

    /// Multiplies by x^k.
    Poly shifted(int k) const {
        if (is_zero()) return Poly();
        std::vector<F> c(static_cast<std::size_t>(k), F(0));
        c.insert(c.end(), c_.begin(), c_.end());
        return Poly(std::move(c));
    }

    /// Euclidean division; b must be nonzero.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<F> r = a.c_;
        const int db = b.degree();
        if (a.degree() < db) return {Poly(), a};
        std::vector<F> q(static_cast<std::size_t>(a.degree() - db) + 1, F(0));
        const F lead = b.leading();
        for (int i = a.degree() - db; i >= 0; --i) {
            const F f = r[static_cast<std::size_t>(i + db)] / lead;
            q[static_cast<std::size_t>(i)] = f;
            if (f == F(0)) continue;
            for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i + j)] -= f * b.c_[static_cast<std::size_t>(j)];
        }
        r.resize(static_cast<std::size_t>(db));
        return {Poly(std::move(q)), Poly(std::move(r))};
    }

    Poly monic() const {
        if (is_zero()) return *this;
        return *this * (F(1) / leading());
    }

    template <class G>
    Poly<G> convert() const {
        std::vector<G> c;
        c.reserve(c_.size());
        for (const auto& v : c_) c.push_back(convert_scalar<G>(v));
        return Poly<G>(std::move(c));
    }

private:
    template <class G>
    static G convert_scalar(const F& v) {
        if constexpr (std::is_same_v<F, Rational>) return to_real<G>(v);
        else return G(v);
    }

    void canonicalize_and_trim() {
        if constexpr (std::is_same_v<F, Rational>)
            for (auto& v : c_) v.canonicalize();
        trim();
    }

    void trim() {
        while (!c_.empty() && c_.back() == F(0)) c_.pop_back();
    }

    std::vector<F> c_;
};

using QPoly = Poly<Rational>;

inline QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = divmod(a, b).second.monic();
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Number of distinct real roots in the open interval (lo, hi) by Sturm's
/// theorem; `hi_infinite` treats hi as +infinity. p must be nonzero.
inline int count_roots_open(const QPoly& p, const Rational& lo, const Rational& hi, bool hi_infinite = false) {
    if (p.is_zero()) throw std::domain_error("root count of the zero polynomial");
    // Square-free part keeps the count of distinct roots.
    QPoly g = gcd(p, p.derivative());
    QPoly f = divmod(p, g).first;
    if (f.degree() <= 0) return 0;
    std::vector<QPoly> seq{f, f.derivative()};
    while (!seq.back().is_zero() && seq.back().degree() > 0) {
        QPoly r = -divmod(seq[seq.size() - 2], seq.back()).second;
        if (r.is_zero()) break;
        seq.push_back(r);
    }
    auto sign_changes_at = [&](const Rational& x) {
        int changes = 0, last = 0;
        for (const auto& s : seq) {
            const int v = sgn(s(x));
            if (v == 0) continue;
            if (last != 0 && v != last) ++changes;
            last = v;
        }
        return changes;
    };
    auto sign_changes_at_inf = [&]() {
        int changes = 0, last = 0;
        for (const auto& s : seq) {
            const int v = sgn(s.leading());
            if (v == 0) continue;
            if (last != 0 && v != last) ++changes;
            last = v;
        }
        return changes;
    };
    int count = sign_changes_at(lo) - (hi_infinite ? sign_changes_at_inf() : sign_changes_at(hi));
    // Sturm counts roots in (lo, hi]; remove a root sitting exactly at hi.
    if (!hi_infinite && f(hi) == 0) --count;
    return count;
}

inline std::string format_poly(const QPoly& p, const std::string& var = "x") {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        Rational c = p.coeff(i);
        if (c == 0) continue;
        const bool negative = c < 0;
        if (negative) c = -c;
        if (first) {
            if (negative) os << "-";
        } else {
            os << (negative ? "-" : "+");
        }
        first = false;
        if (i == 0) {
            os << c.get_str();
        } else {
            if (c != 1) os << c.get_str() << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const QPoly& p) { return os << format_poly(p); }

}  // namespace stieltjesk
