#pragma once

// Functions R0(x) + R1(x) log x + sum_p Rp(x) log p with rational R's and
// integers p > 1, the closed forms of kernel transforms of polynomial
// densities. Log constants are split over primes (trial division), so equal
// functions have equal representations.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stieltjesk/piecewise.hpp"

namespace stieltjesk {

namespace detail {

inline void factor_into(BigInt n, const Rational& weight, std::map<BigInt, Rational>& out) {
    if (n < 0) n = -n;
    for (BigInt p = 2; p * p <= n && p < 1000000; ++p) {
        while (n % p == 0) {
            out[p] += weight;
            n /= p;
        }
    }
    if (n > 1) out[n] += weight;
}

inline void drop_zeros(std::map<BigInt, Rational>& m) {
    for (auto it = m.begin(); it != m.end();) it = it->second == 0 ? m.erase(it) : std::next(it);
}

}  // namespace detail

/// q + sum_p c_p log p.
struct LogConst {
    Rational rational{0};
    std::map<BigInt, Rational> logs;

    LogConst() = default;
    LogConst(const Rational& q) : rational(q) {}  // NOLINT

    /// log q for rational q > 0.
    static LogConst log_of(const Rational& q) {
        if (q <= 0) throw std::domain_error("log of a non-positive rational");
        LogConst c;
        detail::factor_into(q.get_num(), Rational(1), c.logs);
        detail::factor_into(q.get_den(), Rational(-1), c.logs);
        detail::drop_zeros(c.logs);
        return c;
    }

    bool is_rational() const { return logs.empty(); }

    template <class T>
    T as() const {
        using std::log;
        T v = to_real<T>(rational);
        for (const auto& [p, c] : logs) v += to_real<T>(c) * log(to_real<T>(Rational(p)));
        return v;
    }

    friend LogConst operator+(LogConst a, const LogConst& b) {
        a.rational += b.rational;
        for (const auto& [p, c] : b.logs) a.logs[p] += c;
        detail::drop_zeros(a.logs);
        return a;
    }
    friend LogConst operator*(LogConst a, const Rational& s) {
        a.rational *= s;
        for (auto& [p, c] : a.logs) c *= s;
        detail::drop_zeros(a.logs);
        return a;
    }
    friend LogConst operator-(const LogConst& a) { return a * Rational(-1); }
    friend LogConst operator-(const LogConst& a, const LogConst& b) { return a + (-b); }
    friend bool operator==(const LogConst& a, const LogConst& b) { return a.rational == b.rational && a.logs == b.logs; }

    std::string str() const {
        std::ostringstream os;
        os << rational.get_str();
        for (const auto& [p, c] : logs) os << (c < 0 ? " - " : " + ") << Rational(abs(c)).get_str() << "*log(" << p.get_str() << ")";
        return os.str();
    }
};

class LogRationalFn {
public:
    LogRationalFn() = default;
    LogRationalFn(const RationalFn& r) : rat_(r) {}  // NOLINT

    static LogRationalFn log_x_times(const RationalFn& c) {
        LogRationalFn f;
        f.logx_ = c;
        return f;
    }
    /// c(x) * log q for rational q > 0.
    static LogRationalFn log_const_times(const Rational& q, const RationalFn& c) {
        LogRationalFn f;
        for (const auto& [p, w] : LogConst::log_of(q).logs) f.logc_[p] = c * RationalFn(w);
        f.normalize();
        return f;
    }

    const RationalFn& rational_part() const { return rat_; }
    const RationalFn& log_x_part() const { return logx_; }
    const std::map<BigInt, RationalFn>& log_const_parts() const { return logc_; }
    bool is_rational() const { return logx_.is_zero() && logc_.empty(); }
    bool is_zero() const { return rat_.is_zero() && is_rational(); }

    friend LogRationalFn operator+(LogRationalFn a, const LogRationalFn& b) {
        a.rat_ += b.rat_;
        a.logx_ += b.logx_;
        for (const auto& [p, c] : b.logc_) a.logc_[p] += c;
        a.normalize();
        return a;
    }
    friend LogRationalFn operator*(LogRationalFn a, const RationalFn& s) {
        a.rat_ *= s;
        a.logx_ *= s;
        for (auto& [p, c] : a.logc_) c *= s;
        a.normalize();
        return a;
    }
    friend LogRationalFn operator*(const RationalFn& s, LogRationalFn a) { return std::move(a) * s; }
    friend LogRationalFn operator-(const LogRationalFn& a) { return a * RationalFn(Rational(-1)); }
    friend LogRationalFn operator-(const LogRationalFn& a, const LogRationalFn& b) { return a + (-b); }
    friend bool operator==(const LogRationalFn& a, const LogRationalFn& b) {
        return a.rat_ == b.rat_ && a.logx_ == b.logx_ && a.logc_ == b.logc_;
    }

    LogRationalFn derivative(int order = 1) const {
        LogRationalFn f = *this;
        for (int i = 0; i < order; ++i) {
            LogRationalFn d;
            // (R1 log x)' = R1' log x + R1 / x
            d.rat_ = f.rat_.derivative() + f.logx_ * RationalFn::monomial(Rational(1), -1);
            d.logx_ = f.logx_.derivative();
            for (const auto& [p, c] : f.logc_) d.logc_[p] = c.derivative();
            d.normalize();
            f = std::move(d);
        }
        return f;
    }

    /// Exact value at rational x > 0.
    LogConst at(const Rational& x) const {
        LogConst v(rat_(x));
        if (!logx_.is_zero()) v = v + LogConst::log_of(x) * logx_(x);
        for (const auto& [p, c] : logc_) {
            LogConst t;
            t.logs[p] = c(x);
            detail::drop_zeros(t.logs);
            v = v + t;
        }
        return v;
    }

    template <class V>
    V eval(const V& x) const {
        using T = decltype(value_of(x));
        using std::log;
        V v = rat_.eval(x);
        if (!logx_.is_zero()) v = v + logx_.eval(x) * log(x);
        for (const auto& [p, c] : logc_) v = v + c.eval(x) * log(to_real<T>(Rational(p)));
        return v;
    }

    std::optional<LogConst> limit_at_zero() const { return limit(false); }
    std::optional<LogConst> limit_at_infinity() const { return limit(true); }

    std::string str(const std::string& var = "x") const {
        std::string s = rat_.str(var);
        if (!logx_.is_zero()) s += " + (" + logx_.str(var) + ")*log(" + var + ")";
        for (const auto& [p, c] : logc_) s += " + (" + c.str(var) + ")*log(" + p.get_str() + ")";
        return s;
    }

private:
    RationalFn rat_;
    RationalFn logx_;
    std::map<BigInt, RationalFn> logc_;

    void normalize() {
        for (auto it = logc_.begin(); it != logc_.end();) it = it->second.is_zero() ? logc_.erase(it) : std::next(it);
    }

    std::optional<LogConst> limit(bool at_inf) const {
        // log x is transcendental over the rationals and the log p are independent,
        // so every component has to converge on its own.
        auto lim = [at_inf](const RationalFn& r) { return at_inf ? r.limit_at_infinity() : r.limit_at_zero(); };
        if (!logx_.is_zero()) {
            const int order = at_inf ? logx_.order_at_infinity() : logx_.order_at_zero();
            if (at_inf ? order >= 0 : order <= 0) return std::nullopt;
        }
        auto r0 = lim(rat_);
        if (!r0) return std::nullopt;
        LogConst v(*r0);
        for (const auto& [p, c] : logc_) {
            auto l = lim(c);
            if (!l) return std::nullopt;
            LogConst t;
            t.logs[p] = *l;
            detail::drop_zeros(t.logs);
            v = v + t;
        }
        return v;
    }
};

/// Piecewise log-rational function on (0, inf); piece i covers [bp[i-1], bp[i]).
class PiecewiseLogRational {
public:
    PiecewiseLogRational() : pieces_{LogRationalFn()} {}
    PiecewiseLogRational(const LogRationalFn& f) : pieces_{f} {}  // NOLINT
    PiecewiseLogRational(std::vector<Rational> bp, std::vector<LogRationalFn> pieces)
        : bp_(std::move(bp)), pieces_(std::move(pieces)) {
        if (pieces_.size() != bp_.size() + 1) throw std::invalid_argument("piecewise: need one more piece than breakpoints");
        for (std::size_t i = 0; i < bp_.size(); ++i)
            if (bp_[i] <= 0 || (i > 0 && bp_[i] <= bp_[i - 1]))
                throw std::invalid_argument("piecewise: breakpoints must be positive and increasing");
    }
    static PiecewiseLogRational from(const PiecewiseRationalFn& p) {
        std::vector<LogRationalFn> pieces(p.pieces().begin(), p.pieces().end());
        return PiecewiseLogRational(p.breakpoints(), std::move(pieces));
    }

    const std::vector<Rational>& breakpoints() const { return bp_; }
    const std::vector<LogRationalFn>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }
    Rational lower(std::size_t i) const { return i == 0 ? Rational(0) : bp_[i - 1]; }
    std::optional<Rational> upper(std::size_t i) const {
        return i < bp_.size() ? std::optional<Rational>(bp_[i]) : std::nullopt;
    }

    std::size_t piece_index(const Rational& x) const {
        return static_cast<std::size_t>(std::upper_bound(bp_.begin(), bp_.end(), x) - bp_.begin());
    }
    LogConst at(const Rational& x) const { return pieces_[piece_index(x)].at(x); }
    template <class V>
    V eval(const V& x) const {
        using T = decltype(value_of(x));
        std::size_t i = 0;
        while (i < bp_.size() && !(value_of(x) < to_real<T>(bp_[i]))) ++i;
        return pieces_[i].eval(x);
    }
    LogConst left_limit(std::size_t i) const { return pieces_[i].at(bp_[i]); }
    LogConst right_limit(std::size_t i) const { return pieces_[i + 1].at(bp_[i]); }

    PiecewiseLogRational map(auto fn) const {
        std::vector<LogRationalFn> out;
        for (const auto& p : pieces_) out.push_back(fn(p));
        return PiecewiseLogRational(bp_, std::move(out));
    }
    PiecewiseLogRational derivative_pieces(int order = 1) const {
        return map([order](const LogRationalFn& p) { return p.derivative(order); });
    }

    friend PiecewiseLogRational operator+(const PiecewiseLogRational& a, const PiecewiseLogRational& b) {
        std::vector<Rational> merged;
        std::set_union(a.bp_.begin(), a.bp_.end(), b.bp_.begin(), b.bp_.end(), std::back_inserter(merged));
        std::vector<LogRationalFn> out;
        for (std::size_t i = 0; i <= merged.size(); ++i) {
            const Rational lo = i == 0 ? Rational(0) : merged[i - 1];
            const Rational hi = i < merged.size() ? merged[i] : lo + 2;
            const Rational mid = (lo + hi) / 2;
            out.push_back(a.pieces_[a.piece_index(mid)] + b.pieces_[b.piece_index(mid)]);
        }
        return PiecewiseLogRational(std::move(merged), std::move(out)).simplified();
    }
    friend PiecewiseLogRational operator*(const PiecewiseLogRational& a, const RationalFn& s) {
        return a.map([&s](const LogRationalFn& p) { return p * s; });
    }
    friend PiecewiseLogRational operator-(const PiecewiseLogRational& a) {
        return a.map([](const LogRationalFn& p) { return -p; });
    }

    /// Drops breakpoints where neighbouring pieces coincide.
    PiecewiseLogRational simplified() const {
        std::vector<Rational> bp;
        std::vector<LogRationalFn> pieces{pieces_[0]};
        for (std::size_t i = 0; i < bp_.size(); ++i) {
            if (pieces_[i + 1] == pieces.back()) continue;
            bp.push_back(bp_[i]);
            pieces.push_back(pieces_[i + 1]);
        }
        return PiecewiseLogRational(std::move(bp), std::move(pieces));
    }

    friend bool operator==(const PiecewiseLogRational& a, const PiecewiseLogRational& b) {
        const auto sa = a.simplified(), sb = b.simplified();
        return sa.bp_ == sb.bp_ && sa.pieces_ == sb.pieces_;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            s += "[" + lower(i).get_str() + ", " + (upper(i) ? upper(i)->get_str() : std::string("inf")) + "): ";
            s += pieces_[i].str() + "\n";
        }
        return s;
    }

private:
    std::vector<Rational> bp_;
    std::vector<LogRationalFn> pieces_;
};

}  // namespace stieltjesk
