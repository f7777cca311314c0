#pragma once

// Symbolic candidate functions on (0, inf): an immutable expression tree over
// exact rational functions, piecewise rational functions, power terms c x^b,
// exponentials, sums, products, real powers f^p, and lazy derivatives.
// Numeric evaluation is generic over a floating type T or Jet<T>, so any
// derivative order comes from Taylor arithmetic instead of differencing.

#include <cmath>
#include <iomanip>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "stieltjesk/jet.hpp"
#include "stieltjesk/piecewise.hpp"

namespace stieltjesk {

/// A real coefficient: exact when rational, otherwise a 113-bit float.
class Coef {
public:
    Coef() : exact_(Rational(0)), value_(0) {}
    Coef(const Rational& q) : exact_(q), value_(to_real<HighReal>(q)) {}  // NOLINT
    Coef(long n) : Coef(Rational(n)) {}                                  // NOLINT
    static Coef real(const HighReal& v) {
        Coef c;
        c.exact_.reset();
        c.value_ = v;
        return c;
    }

    bool is_exact() const { return exact_.has_value(); }
    const Rational& exact() const { return *exact_; }
    const HighReal& value() const { return value_; }
    bool is_zero() const { return is_exact() ? *exact_ == 0 : value_ == 0; }
    bool is_one() const { return is_exact() && *exact_ == 1; }
    bool is_integer() const { return is_exact() && exact_->get_den() == 1; }
    long as_long() const { return exact_->get_num().get_si(); }
    int sign() const { return is_exact() ? sgn(*exact_) : (value_ > 0 ? 1 : (value_ < 0 ? -1 : 0)); }

    template <class T>
    T as() const {
        if (is_exact()) return to_real<T>(*exact_);
        if constexpr (std::is_same_v<T, HighReal>) return value_;
        else return static_cast<T>(value_);
    }

    friend Coef operator+(const Coef& a, const Coef& b) {
        if (a.is_exact() && b.is_exact()) return Coef(Rational(a.exact() + b.exact()));
        return real(a.value_ + b.value_);
    }
    friend Coef operator-(const Coef& a) { return a.is_exact() ? Coef(Rational(-a.exact())) : real(-a.value_); }
    friend Coef operator-(const Coef& a, const Coef& b) { return a + (-b); }
    friend Coef operator*(const Coef& a, const Coef& b) {
        if (a.is_exact() && b.is_exact()) return Coef(Rational(a.exact() * b.exact()));
        return real(a.value_ * b.value_);
    }
    friend Coef operator/(const Coef& a, const Coef& b) {
        if (b.is_zero()) throw std::domain_error("coefficient division by zero");
        if (a.is_exact() && b.is_exact()) return Coef(Rational(a.exact() / b.exact()));
        return real(a.value_ / b.value_);
    }
    /// a^p for a > 0 (any integer p for exact a).
    friend Coef coef_pow(const Coef& a, const Coef& p) {
        if (a.is_exact() && p.is_integer()) {
            if (a.is_zero() && p.sign() < 0) throw std::domain_error("zero to a negative power");
            return Coef(rpow(a.exact(), p.as_long()));
        }
        if (a.sign() <= 0) throw std::domain_error("non-integer power of a non-positive coefficient");
        using boost::multiprecision::pow;
        return real(pow(a.value_, p.value_));
    }

    std::string str() const {
        if (is_exact()) return exact_->get_str();
        std::ostringstream os;
        os << "~" << std::setprecision(36) << value_;  // '~' marks an inexact value
        return os.str();
    }

private:
    std::optional<Rational> exact_;
    HighReal value_;
};

/// cos(pi r) and sin(pi r); exact at the rational values (0, +-1/2, +-1), 113-bit otherwise.
inline Coef cospi_coef(const Rational& r) {
    // Reduce r mod 2 into [0, 2).
    const BigInt q = r.get_num() / (2 * r.get_den());
    Rational s = r - Rational(2 * q);
    if (s < 0) s += 2;
    if (s == 0) return Coef(Rational(1));
    if (s == 1) return Coef(Rational(-1));
    if (s == make_rational(1, 2) || s == make_rational(3, 2)) return Coef(Rational(0));
    if (s == make_rational(1, 3) || s == make_rational(5, 3)) return Coef(make_rational(1, 2));
    if (s == make_rational(2, 3) || s == make_rational(4, 3)) return Coef(make_rational(-1, 2));
    using boost::multiprecision::cos;
    return Coef::real(cos(pi_value<HighReal>() * to_real<HighReal>(r)));
}
inline Coef sinpi_coef(const Rational& r) { return cospi_coef(Rational(make_rational(1, 2) - r)); }

enum class NodeKind { Rat, Piecewise, Power, Exp, Sum, Product, Scale, Derivative };

struct Node;
using Model = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    RationalFn rat;
    PiecewiseRationalFn pw;
    Coef coef;      // Power: c; Scale: p
    Coef exponent;  // Power: beta
    std::vector<Model> children;
    int order = 0;  // Derivative
};

/// Default limit on tree size for symbolic operations.
inline constexpr std::size_t kDefaultNodeCap = 10000;

class NodeCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::size_t node_count(const Model& m, std::size_t cap = static_cast<std::size_t>(-1)) {
    std::size_t n = 1;
    for (const auto& c : m->children) {
        n += node_count(c, cap);
        if (n > cap) return n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Constructors with light simplification.

namespace model {

inline Model make(Node n) { return std::make_shared<const Node>(std::move(n)); }

inline Model rat(const RationalFn& r) { return make(Node{NodeKind::Rat, r, {}, {}, {}, {}, 0}); }
inline Model constant(const Rational& c) { return rat(RationalFn(c)); }
inline Model zero() { return constant(Rational(0)); }
inline Model one() { return constant(Rational(1)); }
inline Model x() { return rat(RationalFn::x()); }

inline Model piecewise(const PiecewiseRationalFn& p) {
    const auto s = p.simplified();
    if (s.breakpoints().empty()) return rat(s.pieces()[0]);
    return make(Node{NodeKind::Piecewise, {}, s, {}, {}, {}, 0});
}

/// c x^beta.
inline Model power(const Coef& c, const Coef& beta) {
    if (c.is_zero()) return zero();
    if (c.is_exact() && beta.is_integer()) {
        const long b = beta.as_long();
        return rat(RationalFn::monomial(c.exact(), static_cast<int>(b)));
    }
    return make(Node{NodeKind::Power, {}, {}, c, beta, {}, 0});
}
/// A real constant (exact or not).
inline Model constant(const Coef& c) { return power(c, Coef(0)); }

inline bool is_rat(const Model& m) { return m->kind == NodeKind::Rat; }
inline bool is_zero(const Model& m) { return is_rat(m) && m->rat.is_zero(); }
inline bool is_one(const Model& m) { return is_rat(m) && m->rat == RationalFn(Rational(1)); }

inline Model exp_of(const Model& a) {
    if (is_zero(a)) return one();
    return make(Node{NodeKind::Exp, {}, {}, {}, {}, {a}, 0});
}

inline Model sum(std::vector<Model> terms) {
    std::vector<Model> flat;
    RationalFn rat_part;
    bool have_rat = false;
    for (auto& t : terms) {
        if (t->kind == NodeKind::Sum) {
            for (const auto& c : t->children) flat.push_back(c);
        } else {
            flat.push_back(t);
        }
    }
    std::vector<Model> out;
    for (auto& t : flat) {
        if (is_rat(t)) {
            rat_part += t->rat;
            have_rat = true;
        } else {
            out.push_back(t);
        }
    }
    if (have_rat && !rat_part.is_zero()) out.insert(out.begin(), rat(rat_part));
    if (out.empty()) return zero();
    if (out.size() == 1) return out[0];
    return make(Node{NodeKind::Sum, {}, {}, {}, {}, std::move(out), 0});
}

/// (c, m) when r = c x^m.
inline std::optional<std::pair<Rational, long>> monomial_of(const RationalFn& r) {
    const QPoly& n = r.num();
    const QPoly& d = r.den();
    if (n.is_zero() || n.valuation() != n.degree() || d.valuation() != d.degree()) return std::nullopt;
    return std::make_pair(Rational(n.leading() / d.leading()), static_cast<long>(n.degree() - d.degree()));
}

inline Model product(std::vector<Model> factors) {
    std::vector<Model> flat;
    for (auto& f : factors) {
        if (f->kind == NodeKind::Product) {
            for (const auto& c : f->children) flat.push_back(c);
        } else {
            flat.push_back(f);
        }
    }
    RationalFn rat_part(Rational(1));
    std::optional<std::pair<Coef, Coef>> pow_part;
    std::vector<Model> out;
    for (auto& f : flat) {
        if (is_rat(f)) {
            rat_part *= f->rat;
        } else if (f->kind == NodeKind::Power) {
            if (pow_part) pow_part = {pow_part->first * f->coef, pow_part->second + f->exponent};
            else pow_part = {f->coef, f->exponent};
        } else {
            out.push_back(f);
        }
    }
    if (rat_part.is_zero()) return zero();
    if (pow_part) {
        // Pull a rational monomial c x^m into the power term.
        if (auto mono = monomial_of(rat_part)) {
            pow_part->first = pow_part->first * Coef(mono->first);
            pow_part->second = pow_part->second + Coef(mono->second);
            rat_part = RationalFn(Rational(1));
        }
        Model p = power(pow_part->first, pow_part->second);
        if (is_rat(p)) rat_part *= p->rat;
        else out.insert(out.begin(), p);
    }
    if (rat_part.is_zero()) return zero();
    if (rat_part != RationalFn(Rational(1))) out.insert(out.begin(), rat(rat_part));
    if (out.empty()) return one();
    if (out.size() == 1) return out[0];
    return make(Node{NodeKind::Product, {}, {}, {}, {}, std::move(out), 0});
}

/// base^p.
inline Model scale(const Coef& p, const Model& base) {
    if (p.is_zero()) return one();
    if (p.is_one()) return base;
    if (is_rat(base) && p.is_integer()) return rat(base->rat.pow(static_cast<int>(p.as_long())));
    if (base->kind == NodeKind::Power && base->coef.sign() > 0)
        return power(coef_pow(base->coef, p), base->exponent * p);
    if (base->kind == NodeKind::Scale) return scale(base->coef * p, base->children[0]);
    if (base->kind == NodeKind::Exp) return exp_of(product({constant(p), base->children[0]}));
    return make(Node{NodeKind::Scale, {}, {}, p, {}, {base}, 0});
}

inline Model lazy_derivative(const Model& base, int order) {
    if (order < 0) throw std::domain_error("negative derivative order");
    if (order == 0) return base;
    if (base->kind == NodeKind::Derivative) return lazy_derivative(base->children[0], base->order + order);
    if (is_rat(base)) return rat(base->rat.derivative(order));
    return make(Node{NodeKind::Derivative, {}, {}, {}, {}, {base}, order});
}

}  // namespace model


// ---------------------------------------------------------------------------
// Numeric evaluation over T or Jet<T>.

template <class V>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet<T>> : std::true_type {};

template <class V>
V evaluate(const Model& m, const V& x);

namespace detail {

template <class V>
V power_term(const V& x, const Coef& beta) {
    using T = decltype(value_of(x));
    if (beta.is_integer()) return ipow(x, static_cast<int>(beta.as_long()));
    if constexpr (is_jet<V>::value) {
        return pow(x, beta.as<T>());
    } else {
        using std::pow;
        return pow(x, beta.as<T>());
    }
}

template <class V>
V exp_value(const V& a) {
    using std::exp;
    return exp(a);
}

template <class V>
V real_power(const V& b, const Coef& p) {
    using T = decltype(value_of(b));
    if (p.is_integer()) return ipow(b, static_cast<int>(p.as_long()));
    if (!(value_of(b) > T(0))) throw std::domain_error("real power of a non-positive value");
    if constexpr (is_jet<V>::value) {
        return pow(b, p.as<T>());
    } else {
        using std::pow;
        return pow(b, p.as<T>());
    }
}

/// order-th derivative of `base` evaluated at x (x may itself be a jet).
template <class V>
V derivative_value(const Model& base, int order, const V& x) {
    if constexpr (is_jet<V>::value) {
        using T = typename V::value_type;
        const int n = x.order();
        const Jet<T> r = evaluate(base, Jet<T>::variable(n + order, x[0]));
        Jet<T> d(n, T(0));
        for (int i = 0; i <= n; ++i) {
            T f(1);
            for (int j = i + 1; j <= i + order; ++j) f *= T(j);
            d[i] = r[i + order] * f;
        }
        return compose(d, x);
    } else {
        return evaluate(base, Jet<V>::variable(order, x)).derivative(order);
    }
}

}  // namespace detail

template <class V>
V evaluate(const Model& m, const V& x) {
    using T = decltype(value_of(x));
    switch (m->kind) {
        case NodeKind::Rat:
            return m->rat.eval(x);
        case NodeKind::Piecewise:
            return m->pw.eval(x);
        case NodeKind::Power:
            return detail::power_term(x, m->exponent) * m->coef.template as<T>();
        case NodeKind::Exp:
            return detail::exp_value(evaluate(m->children[0], x));
        case NodeKind::Sum: {
            V acc = evaluate(m->children[0], x);
            for (std::size_t i = 1; i < m->children.size(); ++i) acc = acc + evaluate(m->children[i], x);
            return acc;
        }
        case NodeKind::Product: {
            V acc = evaluate(m->children[0], x);
            for (std::size_t i = 1; i < m->children.size(); ++i) acc = acc * evaluate(m->children[i], x);
            return acc;
        }
        case NodeKind::Scale:
            return detail::real_power(evaluate(m->children[0], x), m->coef);
        case NodeKind::Derivative:
            return detail::derivative_value(m->children[0], m->order, x);
    }
    throw std::logic_error("unknown node kind");
}

/// order-th derivative at a point, through jets.
template <class T>
T derivative_at(const Model& m, int order, const T& x) {
    return evaluate(m, Jet<T>::variable(order, x)).derivative(order);
}

/// Values f^{(0..order)}(x).
template <class T>
std::vector<T> derivatives_at(const Model& m, int order, const T& x) {
    const Jet<T> j = evaluate(m, Jet<T>::variable(order, x));
    std::vector<T> out;
    for (int i = 0; i <= order; ++i) out.push_back(j.derivative(i));
    return out;
}

// ---------------------------------------------------------------------------
// Exact views of the rational sublanguage.

inline std::optional<PiecewiseRationalFn> as_piecewise(const Model& m) {
    switch (m->kind) {
        case NodeKind::Rat:
            return PiecewiseRationalFn(m->rat);
        case NodeKind::Piecewise:
            return m->pw;
        case NodeKind::Power:
            return std::nullopt;  // exact integer powers are already Rat
        case NodeKind::Exp:
            return std::nullopt;
        case NodeKind::Sum:
        case NodeKind::Product: {
            std::optional<PiecewiseRationalFn> acc;
            for (const auto& c : m->children) {
                auto p = as_piecewise(c);
                if (!p) return std::nullopt;
                if (!acc) acc = *p;
                else acc = m->kind == NodeKind::Sum ? *acc + *p : *acc * *p;
            }
            return acc;
        }
        case NodeKind::Scale: {
            if (!m->coef.is_integer()) return std::nullopt;
            auto p = as_piecewise(m->children[0]);
            if (!p) return std::nullopt;
            const long e = m->coef.as_long();
            return p->map([e](const RationalFn& r) { return r.pow(static_cast<int>(e)); });
        }
        case NodeKind::Derivative: {
            auto p = as_piecewise(m->children[0]);
            if (!p) return std::nullopt;
            return p->derivative_pieces(m->order);
        }
    }
    return std::nullopt;
}

inline std::optional<RationalFn> as_rational(const Model& m) {
    auto p = as_piecewise(m);
    if (!p) return std::nullopt;
    const auto s = p->simplified();
    if (!s.breakpoints().empty()) return std::nullopt;
    return s.pieces()[0];
}

// ---------------------------------------------------------------------------
// Symbolic derivative.

namespace detail {

inline Model d1(const Model& m) {
    using namespace model;
    switch (m->kind) {
        case NodeKind::Rat:
            return rat(m->rat.derivative());
        case NodeKind::Piecewise:
            return piecewise(m->pw.derivative_pieces(1));
        case NodeKind::Power:
            if (m->exponent.is_zero()) return zero();
            return power(m->coef * m->exponent, m->exponent - Coef(1));
        case NodeKind::Exp:
            return product({m, d1(m->children[0])});
        case NodeKind::Sum: {
            std::vector<Model> terms;
            for (const auto& c : m->children) terms.push_back(d1(c));
            return sum(std::move(terms));
        }
        case NodeKind::Product: {
            std::vector<Model> terms;
            for (std::size_t i = 0; i < m->children.size(); ++i) {
                std::vector<Model> f = m->children;
                f[i] = d1(m->children[i]);
                terms.push_back(product(std::move(f)));
            }
            return sum(std::move(terms));
        }
        case NodeKind::Scale: {
            const Model& b = m->children[0];
            return product({constant(m->coef), scale(m->coef - Coef(1), b), d1(b)});
        }
        case NodeKind::Derivative:
            return lazy_derivative(m->children[0], m->order + 1);
    }
    throw std::logic_error("unknown node kind");
}

}  // namespace detail

/// Exact symbolic derivative (lazy Derivative nodes stay lazy).
inline Model derivative(const Model& m, int order = 1, std::size_t node_cap = kDefaultNodeCap) {
    if (order < 0) throw std::domain_error("negative derivative order");
    Model r = m;
    for (int i = 0; i < order; ++i) {
        r = detail::d1(r);
        if (node_count(r, node_cap) > node_cap)
            throw NodeCapExceeded("derivative: expression exceeds " + std::to_string(node_cap) + " nodes");
    }
    return r;
}

// ---------------------------------------------------------------------------
// psi_f = -x (log f)'.

class ZeroFactorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline void require_no_zero_on(const RationalFn& r, const Rational& lo, const std::optional<Rational>& hi) {
    if (r.is_zero() || r.has_zero_or_pole_in(lo, hi))
        throw ZeroFactorError("log-derivative: factor " + r.str() + " vanishes or blows up inside (0,inf)");
}

}  // namespace detail

inline Model log_derivative_psi(const Model& f) {
    using namespace model;
    const Model minus_x = rat(-RationalFn::x());
    switch (f->kind) {
        case NodeKind::Rat: {
            detail::require_no_zero_on(f->rat, Rational(0), std::nullopt);
            return rat(-RationalFn::x() * f->rat.derivative() / f->rat);
        }
        case NodeKind::Piecewise: {
            const auto& p = f->pw;
            for (std::size_t i = 0; i < p.size(); ++i) detail::require_no_zero_on(p.pieces()[i], p.lower(i), p.upper(i));
            for (std::size_t i = 0; i + 1 < p.size(); ++i)
                if (p.left_limit(i) == 0 || p.right_limit(i) == 0)
                    throw ZeroFactorError("log-derivative: piecewise factor vanishes at a breakpoint");
            return piecewise(p.map([](const RationalFn& r) { return -RationalFn::x() * r.derivative() / r; }));
        }
        case NodeKind::Power:
            if (f->coef.sign() <= 0) throw ZeroFactorError("log-derivative: power term with non-positive coefficient");
            return constant(-f->exponent);
        case NodeKind::Exp:
            return product({minus_x, derivative(f->children[0])});
        case NodeKind::Product: {
            std::vector<Model> terms;
            for (const auto& c : f->children) terms.push_back(log_derivative_psi(c));
            return sum(std::move(terms));
        }
        case NodeKind::Scale:
            return product({constant(f->coef), log_derivative_psi(f->children[0])});
        case NodeKind::Sum:
        case NodeKind::Derivative:
            return product({minus_x, derivative(f), scale(Coef(-1), f)});
    }
    throw std::logic_error("unknown node kind");
}

// ---------------------------------------------------------------------------
// Leading behaviour at 0+ and +inf.

struct Asymptotic {
    enum class Kind { Zero, Power, ExpSmall, ExpLarge, Unknown };
    Kind kind = Kind::Unknown;
    HighReal coef = 0;
    HighReal exponent = 0;
};

namespace detail {

inline bool same_exponent(const HighReal& a, const HighReal& b) { return abs(a - b) <= HighReal(1e-30) * (1 + abs(a)); }

inline Asymptotic asym_power(HighReal c, HighReal e) {
    Asymptotic a;
    a.kind = c == 0 ? Asymptotic::Kind::Zero : Asymptotic::Kind::Power;
    a.coef = c;
    a.exponent = e;
    return a;
}

inline Asymptotic asym_rat(const RationalFn& r, bool at_inf) {
    if (r.is_zero()) return asym_power(0, 0);
    if (!at_inf) {
        const int vn = r.num().valuation(), vd = r.den().valuation();
        return asym_power(to_real<HighReal>(Rational(r.num().coeff(vn) / r.den().coeff(vd))), HighReal(vn - vd));
    }
    return asym_power(to_real<HighReal>(Rational(r.num().leading() / r.den().leading())),
                      HighReal(r.num().degree() - r.den().degree()));
}

/// True when `a` dominates `b` (is larger) at the end point.
inline bool dominates(const HighReal& ea, const HighReal& eb, bool at_inf) { return at_inf ? ea > eb : ea < eb; }

inline Asymptotic asymptotic(const Model& m, bool at_inf) {
    using K = Asymptotic::Kind;
    switch (m->kind) {
        case NodeKind::Rat:
            return asym_rat(m->rat, at_inf);
        case NodeKind::Piecewise:
            return asym_rat(at_inf ? m->pw.pieces().back() : m->pw.pieces().front(), at_inf);
        case NodeKind::Power:
            return asym_power(m->coef.value(), m->exponent.value());
        case NodeKind::Exp: {
            const Asymptotic a = asymptotic(m->children[0], at_inf);
            if (a.kind == K::Zero) return asym_power(1, 0);
            if (a.kind != K::Power) return {};
            const bool diverges = at_inf ? a.exponent > 0 : a.exponent < 0;
            if (diverges) return {a.coef < 0 ? K::ExpSmall : K::ExpLarge, 0, 0};
            if (a.exponent == 0) return asym_power(exp(a.coef), 0);
            return asym_power(1, 0);
        }
        case NodeKind::Product: {
            Asymptotic acc = asym_power(1, 0);
            for (const auto& c : m->children) {
                const Asymptotic a = asymptotic(c, at_inf);
                if (a.kind == K::Zero || acc.kind == K::Zero) {
                    acc = asym_power(0, 0);
                    continue;
                }
                if (a.kind == K::Unknown || acc.kind == K::Unknown) return {};
                if (a.kind == K::Power && acc.kind == K::Power) {
                    acc = asym_power(acc.coef * a.coef, acc.exponent + a.exponent);
                } else if (a.kind == K::Power || acc.kind == K::Power) {
                    acc.kind = a.kind == K::Power ? acc.kind : a.kind;
                } else if (a.kind != acc.kind) {
                    return {};
                }
            }
            return acc;
        }
        case NodeKind::Scale: {
            const Asymptotic a = asymptotic(m->children[0], at_inf);
            const HighReal p = m->coef.value();
            if (a.kind == K::Zero) return p > 0 ? a : Asymptotic{};
            if (a.kind == K::Power) {
                if (m->coef.is_integer()) return asym_power(pow(a.coef, p), a.exponent * p);
                if (a.coef <= 0) return {};
                return asym_power(pow(a.coef, p), a.exponent * p);
            }
            if (a.kind == K::ExpSmall) return {p > 0 ? K::ExpSmall : K::ExpLarge, 0, 0};
            if (a.kind == K::ExpLarge) return {p > 0 ? K::ExpLarge : K::ExpSmall, 0, 0};
            return {};
        }
        case NodeKind::Sum: {
            std::vector<Asymptotic> parts;
            int large = 0;
            for (const auto& c : m->children) {
                const Asymptotic a = asymptotic(c, at_inf);
                if (a.kind == K::Unknown) return {};
                if (a.kind == K::ExpLarge) ++large;
                if (a.kind == K::Power) parts.push_back(a);
            }
            if (large == 1) return {K::ExpLarge, 0, 0};
            if (large > 1) return {};
            if (parts.empty()) {
                for (const auto& c : m->children)
                    if (asymptotic(c, at_inf).kind == K::ExpSmall) return {K::ExpSmall, 0, 0};
                return asym_power(0, 0);
            }
            HighReal lead = parts[0].exponent;
            for (const auto& p : parts)
                if (dominates(p.exponent, lead, at_inf)) lead = p.exponent;
            HighReal c = 0, scale_sum = 0;
            for (const auto& p : parts)
                if (same_exponent(p.exponent, lead)) {
                    c += p.coef;
                    scale_sum += abs(p.coef);
                }
            if (abs(c) <= HighReal(1e-28) * scale_sum) return {};  // cancellation: next order needed
            return asym_power(c, lead);
        }
        case NodeKind::Derivative: {
            const Asymptotic a = asymptotic(m->children[0], at_inf);
            if (a.kind == K::Zero) return a;
            if (a.kind == K::ExpSmall) return a;
            if (a.kind != K::Power) return {};
            HighReal c = a.coef;
            for (int j = 0; j < m->order; ++j) c *= a.exponent - j;
            if (abs(c) <= HighReal(1e-28) * abs(a.coef)) return {};
            return asym_power(c, a.exponent - m->order);
        }
    }
    return {};
}

}  // namespace detail

inline Asymptotic asymptotic_at_zero(const Model& m) { return detail::asymptotic(m, false); }
inline Asymptotic asymptotic_at_infinity(const Model& m) { return detail::asymptotic(m, true); }

// ---------------------------------------------------------------------------
// Limits and boundary data.

class DivergentLimit : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct LimitValue {
    HighReal value = 0;
    /// 0 for exact or asymptotically certain limits; an error estimate for extrapolated ones.
    HighReal uncertainty = 0;
    std::optional<Rational> exact;
    std::string method;  // "exact" | "asymptotic" | "extrapolated"
};

namespace detail {

/// Numeric limit along x = 2^{-4n} (or 2^{4n}) with a geometric tail estimate.
inline LimitValue extrapolated_limit(const Model& m, bool at_inf) {
    std::vector<HighReal> s;
    for (int n = 1; n <= 25; ++n) {
        const HighReal x = ldexp(HighReal(1), at_inf ? 4 * n : -4 * n);
        HighReal v;
        try {
            v = evaluate(m, x);
        } catch (const std::exception&) {
            break;
        }
        if (!isfinite(v)) break;
        s.push_back(v);
    }
    if (s.size() < 4) throw DivergentLimit("limit: model not evaluable near the end point");
    const std::size_t n = s.size();
    const HighReal d1 = s[n - 1] - s[n - 2], d0 = s[n - 2] - s[n - 3];
    const HighReal scale = 1 + abs(s[n - 1]);
    if (abs(d1) <= HighReal(1e-30) * scale) return {s[n - 1], abs(d1), std::nullopt, "extrapolated"};
    const HighReal r = d0 == 0 ? HighReal(2) : d1 / d0;
    if (!(abs(r) < HighReal(0.98))) throw DivergentLimit("limit: values do not settle near the end point");
    const HighReal tail = d1 * r / (1 - r);
    return {s[n - 1] + tail, abs(tail) + HighReal(1e-30) * scale, std::nullopt, "extrapolated"};
}

inline LimitValue limit(const Model& m, bool at_inf) {
    if (auto p = as_piecewise(m)) {
        const RationalFn& r = at_inf ? p->pieces().back() : p->pieces().front();
        auto v = at_inf ? r.limit_at_infinity() : r.limit_at_zero();
        if (!v) throw DivergentLimit(std::string("limit at ") + (at_inf ? "infinity" : "0+") + " diverges");
        return {to_real<HighReal>(*v), 0, *v, "exact"};
    }
    using K = Asymptotic::Kind;
    const Asymptotic a = asymptotic(m, at_inf);
    const char* where = at_inf ? "infinity" : "0+";
    switch (a.kind) {
        case K::Zero:
        case K::ExpSmall:
            return {0, 0, Rational(0), "asymptotic"};
        case K::ExpLarge:
            throw DivergentLimit(std::string("limit at ") + where + " diverges (exponential growth)");
        case K::Power: {
            const bool vanishes = at_inf ? a.exponent < 0 : a.exponent > 0;
            if (vanishes) return {0, 0, Rational(0), "asymptotic"};
            if (a.exponent == 0) return {a.coef, 0, std::nullopt, "asymptotic"};
            throw DivergentLimit(std::string("limit at ") + where + " diverges");
        }
        case K::Unknown:
            break;
    }
    return extrapolated_limit(m, at_inf);
}

}  // namespace detail

inline LimitValue limit_at_zero(const Model& m) { return detail::limit(m, false); }
inline LimitValue limit_at_infinity(const Model& m) { return detail::limit(m, true); }

struct BoundaryData {
    LimitValue g0plus;       // g(0+), g = x f
    LimitValue gprime_inf;   // g'(inf)
    std::vector<LimitValue> phi_derivs_at_0;  // phi_k^{(j)}(0+), j = 0..k-2
};

/// g = x f.
inline Model g_of(const Model& f) { return model::product({model::x(), f}); }

/// phi_k = x^{2k-1} g^{(k)}.
inline Model phi_of(const Model& f, int k) {
    if (auto p = as_piecewise(f)) {
        const PiecewiseRationalFn g = *p * PiecewiseRationalFn(RationalFn::x());
        return model::piecewise(g.derivative_pieces(k) *
                                PiecewiseRationalFn(RationalFn::monomial(Rational(1), 2 * k - 1)));
    }
    return model::product({model::power(Coef(1), Coef(2 * k - 1)), model::lazy_derivative(g_of(f), k)});
}

inline BoundaryData boundary_data(const Model& f, int k) {
    if (k < 1) throw std::domain_error("boundary_data needs k >= 1");
    BoundaryData bd;
    const Model g = g_of(f);
    bd.g0plus = limit_at_zero(g);
    bd.gprime_inf = limit_at_infinity(model::lazy_derivative(g, 1));
    const Model phi = phi_of(f, k);
    for (int j = 0; j <= k - 2; ++j) bd.phi_derivs_at_0.push_back(limit_at_zero(model::lazy_derivative(phi, j)));
    return bd;
}

// ---------------------------------------------------------------------------
// Printing.

inline std::string to_string(const Model& m) {
    auto join = [](const std::vector<Model>& c) {
        std::string s;
        for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ";" : "") + to_string(c[i]);
        return s;
    };
    auto rat_str = [](const RationalFn& r) {
        return "rat(" + format_poly(r.num()) + ";" + format_poly(r.den()) + ")";
    };
    switch (m->kind) {
        case NodeKind::Rat:
            return rat_str(m->rat);
        case NodeKind::Piecewise: {
            std::string s = "pw(";
            const auto& b = m->pw.breakpoints();
            for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + b[i].get_str();
            for (const auto& r : m->pw.pieces()) s += ";" + rat_str(r);
            return s + ")";
        }
        case NodeKind::Power:
            return "pow(" + m->coef.str() + ";" + m->exponent.str() + ")";
        case NodeKind::Exp:
            return "exp(" + to_string(m->children[0]) + ")";
        case NodeKind::Sum:
            return "sum(" + join(m->children) + ")";
        case NodeKind::Product:
            return "prod(" + join(m->children) + ")";
        case NodeKind::Scale:
            return "scale(" + m->coef.str() + ";" + to_string(m->children[0]) + ")";
        case NodeKind::Derivative:
            return "diff(" + std::to_string(m->order) + ";" + to_string(m->children[0]) + ")";
    }
    return "?";
}

}  // namespace stieltjesk
