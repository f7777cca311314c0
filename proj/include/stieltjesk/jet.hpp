#pragma once

// Truncated Taylor arithmetic ("jets"). A Jet<T> of order N holds the Taylor
// coefficients c_0..c_N of a function at a point; every operation propagates
// them exactly up to floating rounding, so high-order derivatives never go
// through finite differences.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/container/small_vector.hpp>

namespace stieltjesk {

template <class T>
T pi_value() {
    using std::acos;
    return acos(T(-1));
}

template <class T>
class Jet {
public:
    using value_type = T;

    Jet() : c_(1, T(0)) {}
    Jet(int order, T value) : c_(static_cast<std::size_t>(order) + 1, T(0)) { c_[0] = value; }

    /// The independent variable x = x0 + eps.
    static Jet variable(int order, T x0) {
        Jet j(order, x0);
        if (order >= 1) j.c_[1] = T(1);
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const T& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    T& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const T& value() const { return c_[0]; }

    /// n-th derivative at the expansion point.
    T derivative(int n) const {
        T f(1);
        for (int i = 2; i <= n; ++i) f *= T(i);
        return c_[static_cast<std::size_t>(n)] * f;
    }

    Jet truncated(int order) const {
        Jet r(order, T(0));
        for (int i = 0; i <= std::min(order, this->order()); ++i) r[i] = (*this)[i];
        return r;
    }

    /// Taylor coefficients of the derivative (order drops by one).
    Jet differentiated() const {
        if (order() == 0) return Jet(0, T(0));
        Jet r(order() - 1, T(0));
        for (int i = 0; i < order(); ++i) r[i] = (*this)[i + 1] * T(i + 1);
        return r;
    }

    Jet operator-() const {
        Jet r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    Jet& operator+=(const Jet& o) {
        shrink_to(o.order());
        for (int i = 0; i <= order(); ++i) (*this)[i] += o[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        shrink_to(o.order());
        for (int i = 0; i <= order(); ++i) (*this)[i] -= o[i];
        return *this;
    }
    Jet& operator+=(const T& s) {
        c_[0] += s;
        return *this;
    }
    Jet& operator-=(const T& s) {
        c_[0] -= s;
        return *this;
    }
    Jet& operator*=(const T& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    Jet& operator/=(const T& s) {
        for (auto& v : c_) v /= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, const T& s) { return a += s; }
    friend Jet operator+(const T& s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, const T& s) { return a -= s; }
    friend Jet operator-(const T& s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, const T& s) { return a *= s; }
    friend Jet operator*(const T& s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, const T& s) { return a /= s; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const int n = std::min(a.order(), b.order());
        Jet r(n, T(0));
        for (int i = 0; i <= n; ++i) {
            T s(0);
            for (int j = 0; j <= i; ++j) s += a[j] * b[i - j];
            r[i] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        const int n = std::min(a.order(), b.order());
        if (b[0] == T(0)) throw std::domain_error("jet division by a function vanishing at the point");
        Jet q(n, T(0));
        for (int i = 0; i <= n; ++i) {
            T s = a[i];
            for (int j = 1; j <= i; ++j) s -= b[j] * q[i - j];
            q[i] = s / b[0];
        }
        return q;
    }

    friend Jet operator/(const T& s, const Jet& b) { return Jet(b.order(), s) / b; }

    friend Jet exp(const Jet& a) {
        using std::exp;
        Jet r(a.order(), exp(a[0]));
        for (int n = 1; n <= a.order(); ++n) {
            T s(0);
            for (int j = 1; j <= n; ++j) s += T(j) * a[j] * r[n - j];
            r[n] = s / T(n);
        }
        return r;
    }

    friend Jet log(const Jet& a) {
        using std::log;
        if (!(a[0] > T(0))) throw std::domain_error("jet log of a non-positive value");
        Jet r(a.order(), log(a[0]));
        for (int n = 1; n <= a.order(); ++n) {
            T s = a[n];
            for (int j = 1; j < n; ++j) s -= T(j) * r[j] * a[n - j] / T(n);
            r[n] = s / a[0];
        }
        return r;
    }

    /// a^beta for a(x0) > 0 (or any a(x0) != 0 when beta is an integer).
    friend Jet pow(const Jet& a, const T& beta) {
        using std::pow;
        if (a[0] == T(0)) throw std::domain_error("jet power at a zero of the base");
        Jet r(a.order(), pow(a[0], beta));
        for (int n = 1; n <= a.order(); ++n) {
            T s(0);
            for (int j = 1; j <= n; ++j) s += ((beta + T(1)) * T(j) - T(n)) * a[j] * r[n - j];
            r[n] = s / (T(n) * a[0]);
        }
        return r;
    }

    friend Jet sqrt(const Jet& a) { return pow(a, T(1) / T(2)); }

    /// Integer power by repeated squaring (valid through zeros of the base).
    friend Jet ipow(Jet base, int e) {
        if (e < 0) return T(1) / ipow(base, -e);
        Jet r(base.order(), T(1));
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

private:
    void shrink_to(int order) {
        if (order < this->order()) c_.resize(static_cast<std::size_t>(order) + 1);
    }

    boost::container::small_vector<T, 12> c_;
};

/// Substitutes the series `outer` (in powers of eps) with eps := inner - inner[0].
template <class T>
Jet<T> compose(const Jet<T>& outer, const Jet<T>& inner) {
    Jet<T> d = inner;
    d[0] = T(0);
    Jet<T> r(inner.order(), outer[outer.order()]);
    for (int i = outer.order() - 1; i >= 0; --i) {
        r = r * d;
        r[0] += outer[i];
    }
    return r;
}

/// Scalar helpers so generic code can treat T and Jet<T> alike.
template <class T>
T value_of(const T& x) {
    return x;
}
template <class T>
T value_of(const Jet<T>& x) {
    return x[0];
}

template <class T>
T ipow(T base, int e) {
    if (e < 0) return T(1) / ipow(base, -e);
    T r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace stieltjesk
