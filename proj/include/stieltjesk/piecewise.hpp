#pragma once

// Piecewise rational functions on (0, inf). Piece i lives on
// [breakpoints[i-1], breakpoints[i]) with breakpoints[-1] = 0 and
// breakpoints[n] = inf; evaluation at a breakpoint uses the right piece.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stieltjesk/jet.hpp"
#include "stieltjesk/ratfn.hpp"

namespace stieltjesk {

/// A gap f(b+) - f(b-) at a breakpoint b.
struct Jump {
    Rational location;
    Rational size;
};

class PiecewiseRationalFn;

struct PiecewiseDerivative;

class PiecewiseRationalFn {
public:
    PiecewiseRationalFn() : pieces_{RationalFn()} {}
    PiecewiseRationalFn(const RationalFn& r) : pieces_{r} {}  // NOLINT
    PiecewiseRationalFn(std::vector<Rational> breakpoints, std::vector<RationalFn> pieces)
        : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
        if (pieces_.size() != bp_.size() + 1) throw std::invalid_argument("piecewise: need one more piece than breakpoints");
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            if (bp_[i] <= 0) throw std::invalid_argument("piecewise: breakpoints must be positive");
            if (i > 0 && bp_[i] <= bp_[i - 1]) throw std::invalid_argument("piecewise: breakpoints must increase");
        }
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            // One-sided limits must be finite.
            if (pieces_[i].has_pole_at(bp_[i]) || pieces_[i + 1].has_pole_at(bp_[i]))
                throw std::domain_error("piecewise: pole at breakpoint " + bp_[i].get_str());
        }
    }

    const std::vector<Rational>& breakpoints() const { return bp_; }
    const std::vector<RationalFn>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }

    /// Interval ends of piece i; upper is nullopt for the last piece.
    Rational lower(std::size_t i) const { return i == 0 ? Rational(0) : bp_[i - 1]; }
    std::optional<Rational> upper(std::size_t i) const {
        return i < bp_.size() ? std::optional<Rational>(bp_[i]) : std::nullopt;
    }

    std::size_t piece_index(const Rational& x) const {
        return static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
    }
    template <class T>
    std::size_t piece_index_real(const T& x) const {
        std::size_t i = 0;
        while (i < bp_.size() && !(x < to_real<T>(bp_[i]))) ++i;
        return i;
    }

    Rational operator()(const Rational& x) const { return pieces_[piece_index(x)](x); }

    template <class V>
    V eval(const V& x) const {
        return pieces_[piece_index_real(value_of(x))].eval(x);
    }

    Rational left_limit(std::size_t breakpoint) const { return pieces_[breakpoint](bp_[breakpoint]); }
    Rational right_limit(std::size_t breakpoint) const { return pieces_[breakpoint + 1](bp_[breakpoint]); }

    /// Nonzero gaps f(b+) - f(b-).
    std::vector<Jump> jumps() const {
        std::vector<Jump> out;
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            Rational gap = right_limit(i) - left_limit(i);
            if (gap != 0) out.push_back({bp_[i], gap});
        }
        return out;
    }

    bool continuous() const { return jumps().empty(); }

    /// Classical derivative on each piece.
    PiecewiseRationalFn derivative_pieces(int order = 1) const {
        std::vector<RationalFn> d;
        d.reserve(pieces_.size());
        for (const auto& p : pieces_) d.push_back(p.derivative(order));
        return PiecewiseRationalFn(bp_, std::move(d), Unchecked{});
    }

    /// Derivative with jump bookkeeping; see PiecewiseDerivative.
    PiecewiseDerivative derivative(int order = 1) const;

    PiecewiseRationalFn map(auto fn) const {
        std::vector<RationalFn> out;
        out.reserve(pieces_.size());
        for (const auto& p : pieces_) out.push_back(fn(p));
        return PiecewiseRationalFn(bp_, std::move(out));
    }

    /// Same function on a finer breakpoint set (must contain this one).
    PiecewiseRationalFn refined(const std::vector<Rational>& finer) const {
        std::vector<RationalFn> out;
        out.reserve(finer.size() + 1);
        for (std::size_t i = 0; i <= finer.size(); ++i) {
            const Rational probe = i < finer.size() ? finer[i] : (finer.empty() ? Rational(1) : finer.back() + 1);
            // Piece covering the open interval that ends at `probe`.
            const Rational lo = i == 0 ? Rational(0) : finer[i - 1];
            out.push_back(pieces_[piece_index((lo + probe) / 2)]);
        }
        return PiecewiseRationalFn(finer, std::move(out), Unchecked{});
    }

    friend PiecewiseRationalFn combine(const PiecewiseRationalFn& a, const PiecewiseRationalFn& b, auto op) {
        std::vector<Rational> merged;
        std::set_union(a.bp_.begin(), a.bp_.end(), b.bp_.begin(), b.bp_.end(), std::back_inserter(merged));
        const auto ra = a.refined(merged);
        const auto rb = b.refined(merged);
        std::vector<RationalFn> out;
        out.reserve(ra.pieces_.size());
        for (std::size_t i = 0; i < ra.pieces_.size(); ++i) out.push_back(op(ra.pieces_[i], rb.pieces_[i]));
        return PiecewiseRationalFn(std::move(merged), std::move(out)).simplified();
    }

    friend PiecewiseRationalFn operator+(const PiecewiseRationalFn& a, const PiecewiseRationalFn& b) {
        return combine(a, b, [](const RationalFn& p, const RationalFn& q) { return p + q; });
    }
    friend PiecewiseRationalFn operator-(const PiecewiseRationalFn& a, const PiecewiseRationalFn& b) {
        return combine(a, b, [](const RationalFn& p, const RationalFn& q) { return p - q; });
    }
    friend PiecewiseRationalFn operator*(const PiecewiseRationalFn& a, const PiecewiseRationalFn& b) {
        return combine(a, b, [](const RationalFn& p, const RationalFn& q) { return p * q; });
    }
    friend PiecewiseRationalFn operator-(const PiecewiseRationalFn& a) {
        return a.map([](const RationalFn& p) { return -p; });
    }
    friend bool operator==(const PiecewiseRationalFn& a, const PiecewiseRationalFn& b) {
        return a.bp_ == b.bp_ && a.pieces_ == b.pieces_;
    }

    /// x -> f(x / s) for s > 0: breakpoints scale by s.
    PiecewiseRationalFn argument_divided_by(const Rational& s) const {
        if (s <= 0) throw std::domain_error("argument scale must be positive");
        std::vector<Rational> b;
        for (const auto& v : bp_) b.push_back(v * s);
        std::vector<RationalFn> p;
        for (const auto& r : pieces_) p.push_back(r.scaled_argument(Rational(1) / s));
        return PiecewiseRationalFn(std::move(b), std::move(p), Unchecked{});
    }

    /// Drops breakpoints where neighbouring pieces coincide.
    PiecewiseRationalFn simplified() const {
        std::vector<Rational> b;
        std::vector<RationalFn> p{pieces_[0]};
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            if (pieces_[i + 1] == p.back()) continue;
            b.push_back(bp_[i]);
            p.push_back(pieces_[i + 1]);
        }
        return PiecewiseRationalFn(std::move(b), std::move(p), Unchecked{});
    }

    std::string str(const std::string& var = "x") const {
        std::string s;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (i) s += "; ";
            s += "[" + lower(i).get_str() + "," + (upper(i) ? upper(i)->get_str() : std::string("inf")) + "): ";
            s += pieces_[i].str(var);
        }
        return s;
    }

private:
    struct Unchecked {};
    PiecewiseRationalFn(std::vector<Rational> b, std::vector<RationalFn> p, Unchecked)
        : bp_(std::move(b)), pieces_(std::move(p)) {}

    std::vector<Rational> bp_;
    std::vector<RationalFn> pieces_;
};

/// f' on each piece plus the gaps of f itself: in the measure sense
/// Df = f' + sum jump.size * delta_{jump.location}.
struct PiecewiseDerivative {
    PiecewiseRationalFn function;
    /// jumps[j] lists the nonzero gaps of f^{(j)}, j = 0..order-1.
    std::vector<std::vector<Jump>> jumps;
};

inline PiecewiseDerivative PiecewiseRationalFn::derivative(int order) const {
    if (order < 0) throw std::domain_error("negative derivative order");
    PiecewiseDerivative out{*this, {}};
    for (int j = 0; j < order; ++j) {
        out.jumps.push_back(out.function.jumps());
        out.function = out.function.derivative_pieces(1);
    }
    return out;
}

}  // namespace stieltjesk
