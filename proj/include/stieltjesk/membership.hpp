#pragma once

// Grid testers for S_k, M_k, HM_k and the power-regular class, with exact
// sign certificates whenever the objects are (piecewise) rational.
//
// Tolerance policy: a value v on a grid passes if v >= -eps (1 + max|values|);
// a failure needs a witness below -100 eps (1 + max|values|); anything in
// between, or a convexity test whose three step sizes disagree, is
// inconclusive.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stieltjesk/funcmodel.hpp"
#include "stieltjesk/hyperbolic_fn.hpp"
#include "stieltjesk/parallel.hpp"
#include "stieltjesk/sign.hpp"

namespace stieltjesk {

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass:
            return "pass";
        case Verdict::Fail:
            return "fail";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "?";
}

inline std::ostream& operator<<(std::ostream& os, Verdict v) { return os << to_string(v); }

inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
    return Verdict::Pass;
}

inline constexpr double kFailFactor = 100;

/// Log-spaced grid on [x_min, x_max].
struct GridConfig {
    double x_min = 1e-4;
    double x_max = 1e4;
    int points = 2000;
    double sign_tolerance = 1e-9;

    void validate() const {
        if (!(x_min > 0) || !(x_min < x_max)) throw std::invalid_argument("grid needs 0 < x_min < x_max");
        if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
        if (!(sign_tolerance > 0)) throw std::invalid_argument("sign tolerance must be positive");
    }
    std::vector<double> nodes() const {
        validate();
        std::vector<double> out(static_cast<std::size_t>(points));
        const double a = std::log(x_min), b = std::log(x_max);
        for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
        out.front() = x_min;
        out.back() = x_max;
        return out;
    }
    std::string describe() const {
        std::ostringstream os;
        os << "x in [" << x_min << ", " << x_max << "], " << points << " log-spaced points, eps " << sign_tolerance;
        return os.str();
    }
};

/// u: log-spaced; w: 2 + geometric offsets from w_gap_min up to w_max - 2.
struct HyperbolicGrid {
    double u_min = 1e-2;
    double u_max = 1e2;
    int u_points = 25;
    double w_max = 50;
    int w_points = 400;
    double w_gap_min = 1e-4;
    double sign_tolerance = 1e-9;

    void validate() const {
        if (!(u_min > 0) || !(u_min <= u_max) || u_points < 1) throw std::invalid_argument("bad u grid");
        if (!(w_max > 2) || w_points < 2 || !(w_gap_min > 0) || !(w_gap_min < w_max - 2))
            throw std::invalid_argument("bad w grid");
        if (!(sign_tolerance > 0)) throw std::invalid_argument("sign tolerance must be positive");
    }
    std::vector<double> u_nodes() const {
        validate();
        if (u_points == 1) return {u_min};
        std::vector<double> out;
        const double a = std::log10(u_min), b = std::log10(u_max);
        for (int i = 0; i < u_points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (u_points - 1)));
        return out;
    }
    std::vector<double> w_nodes() const {
        validate();
        std::vector<double> out;
        const double a = std::log(w_gap_min), b = std::log(w_max - 2);
        for (int i = 0; i < w_points; ++i) out.push_back(2 + std::exp(a + (b - a) * i / (w_points - 1)));
        out.back() = w_max;
        return out;
    }
    std::string describe() const {
        std::ostringstream os;
        os << "u in [" << u_min << ", " << u_max << "] (" << u_points << " log-spaced), w in (2, " << w_max << "] ("
           << w_points << " points, geometric from 2+" << w_gap_min << "), eps " << sign_tolerance;
        return os.str();
    }
};

struct OrderVerdict {
    int order = 0;
    std::string condition;
    Verdict verdict = Verdict::Pass;
    double worst_margin = 0;  // most negative normalized value (or the smallest one when none is negative)
    double location = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> u;  // hyperbolic tests
    std::string method;       // symbolic-exact | grid-float
};

struct MembershipReport {
    std::string test;
    int k = 0;
    std::vector<OrderVerdict> orders;
    Verdict verdict = Verdict::Pass;
    double worst_margin = std::numeric_limits<double>::infinity();
    double location = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> u;
    std::string method;
    std::string grid;
    double sign_tolerance = 1e-9;

    bool passed() const { return verdict == Verdict::Pass; }

    void finalize() {
        verdict = Verdict::Pass;
        worst_margin = std::numeric_limits<double>::infinity();
        bool any_exact = false, any_grid = false;
        for (const auto& o : orders) {
            verdict = combine(verdict, o.verdict);
            if (o.worst_margin < worst_margin) {
                worst_margin = o.worst_margin;
                location = o.location;
                u = o.u;
            }
            (o.method == "symbolic-exact" ? any_exact : any_grid) = true;
        }
        // A failing order decides the reported witness.
        for (const auto& o : orders)
            if (o.verdict == Verdict::Fail) {
                worst_margin = o.worst_margin;
                location = o.location;
                u = o.u;
                break;
            }
        method = any_grid ? "grid-float" : "symbolic-exact";
        if (any_exact && any_grid) method = "symbolic-exact+grid-float";
    }
};

namespace detail {

/// Samples of one condition; `values` holds one entry, or one per step size for difference tests.
struct Sample {
    std::vector<double> values;
    double at = 0;
};

inline OrderVerdict summarize(int order, std::string condition, const std::vector<Sample>& samples, double eps) {
    OrderVerdict out;
    out.order = order;
    out.condition = std::move(condition);
    out.method = "grid-float";
    double scale = 0;
    bool finite = true;
    for (const auto& s : samples)
        for (double v : s.values) {
            if (!std::isfinite(v)) finite = false;
            else scale = std::max(scale, std::abs(v));
        }
    const double norm = 1 + scale;
    bool ambiguous = false, failing = false;
    double worst = std::numeric_limits<double>::infinity();
    double fail_value = 0;
    for (const auto& s : samples) {
        int negatives = 0;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double v : s.values) {
            const double n = v / norm;
            if (n < -eps) ++negatives;
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        if (lo < worst) {
            worst = lo;
            out.location = s.at;
        }
        if (negatives > 0 && negatives < static_cast<int>(s.values.size())) ambiguous = true;
        if (negatives == static_cast<int>(s.values.size()) && hi < -kFailFactor * eps && hi < fail_value) {
            failing = true;
            fail_value = hi;
            out.location = s.at;
            worst = std::min(worst, lo);
        }
    }
    out.worst_margin = samples.empty() ? 0 : worst;
    if (!finite) {
        out.verdict = Verdict::Inconclusive;
    } else if (failing) {
        out.verdict = Verdict::Fail;
    } else if (worst >= -eps && !ambiguous) {
        out.verdict = Verdict::Pass;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

inline constexpr double kDifferenceSteps[3] = {2e-2, 5e-3, 1.25e-3};

/// (x^n f)^{(m)}(x) through jets.
inline HighReal xpow_derivative(const Model& f, int n, int m, const HighReal& x) {
    const Jet<HighReal> X = Jet<HighReal>::variable(m, x);
    const Jet<HighReal> J = evaluate(f, X) * ipow(X, n);
    return J.derivative(m);
}

/// Exact measure-sense sign test of s * G^{(m)} >= 0 for piecewise rational G:
/// lower derivatives must be continuous, the order m-1 jumps must carry sign s,
/// and each piece must satisfy the inequality. Returns a witness when violated.
inline std::optional<Rational> measure_sign_witness(const PiecewiseRationalFn& G, int m, int s) {
    const PiecewiseDerivative d = G.derivative(m);
    for (int j = 0; j + 1 < m; ++j)
        if (!d.jumps[static_cast<std::size_t>(j)].empty()) return d.jumps[static_cast<std::size_t>(j)].front().location;
    if (m >= 1)
        for (const Jump& jp : d.jumps[static_cast<std::size_t>(m - 1)])
            if (s * sgn(jp.size) < 0) return jp.location;
    const PiecewiseRationalFn& F = d.function;
    for (std::size_t i = 0; i < F.size(); ++i) {
        const RationalFn piece = s > 0 ? F.pieces()[i] : -F.pieces()[i];
        if (auto w = negative_point(piece, F.lower(i), F.upper(i))) return *w;
    }
    return std::nullopt;
}

inline PiecewiseRationalFn times_xpow(const PiecewiseRationalFn& f, int n) {
    const RationalFn xn = RationalFn::monomial(Rational(1), n);
    return f.map([&](const RationalFn& p) { return p * xn; });
}

inline OrderVerdict exact_verdict(int order, std::string condition, const std::optional<Rational>& witness,
                                  const OrderVerdict& grid) {
    OrderVerdict out = grid;
    out.order = order;
    out.condition = std::move(condition);
    out.method = "symbolic-exact";
    if (witness) {
        out.verdict = Verdict::Fail;
        out.location = to_real<double>(*witness);
        out.worst_margin = std::min(grid.worst_margin, 0.0);
    } else {
        out.verdict = Verdict::Pass;
    }
    return out;
}

/// Conditions s_n (x^n g)^{(2n-1)} >= 0, n = 1..k, s_n = (-1)^{n-1}.
/// top_convexity: the n = k condition is tested as convexity (or, for k = 1,
/// monotonicity of x g) by differences at three step sizes.
inline std::vector<OrderVerdict> sk_conditions(const Model& g, int k, const GridConfig& grid, bool top_convexity) {
    const std::vector<double> xs = grid.nodes();
    const double eps = grid.sign_tolerance;
    std::vector<OrderVerdict> out;
    const auto pw = as_piecewise(g);
    for (int n = 1; n <= k; ++n) {
        const int s = n % 2 ? 1 : -1;
        const std::string cond = "(-1)^" + std::to_string(n - 1) + " (x^" + std::to_string(n) + " f)^(" +
                                 std::to_string(2 * n - 1) + ") >= 0";
        const bool difference = top_convexity && n == k;
        std::vector<Sample> samples = parallel_map<Sample>(xs.size(), [&](std::size_t i) {
            const HighReal x(xs[i]);
            Sample smp;
            smp.at = xs[i];
            if (!difference) {
                smp.values.push_back(static_cast<double>(s * xpow_derivative(g, n, 2 * n - 1, x)));
                return smp;
            }
            // G = s (x^k g)^{(2k-3)}; k = 1 uses G = x g and first differences.
            auto G = [&](const HighReal& y) {
                return k == 1 ? HighReal(y * evaluate(g, y)) : HighReal(s * xpow_derivative(g, k, 2 * k - 3, y));
            };
            const HighReal g0 = G(x);
            for (double sigma : kDifferenceSteps) {
                const HighReal h = x * HighReal(sigma);
                const HighReal v = k == 1 ? (G(x + h) - G(x - h)) / (2 * h) : (G(x + h) - 2 * g0 + G(x - h)) / (h * h);
                smp.values.push_back(static_cast<double>(v));
            }
            return smp;
        });
        OrderVerdict gv = summarize(n, cond, samples, eps);
        if (pw) {
            // Exact: measure-sense sign of (x^n g)^{(2n-1)} over (0, inf).
            gv = exact_verdict(n, cond, measure_sign_witness(times_xpow(*pw, n), 2 * n - 1, s), gv);
        }
        out.push_back(gv);
    }
    return out;
}

/// f >= 0 on the grid (exactly when f is piecewise rational).
inline OrderVerdict nonnegativity(const Model& f, const GridConfig& grid) {
    const std::vector<double> xs = grid.nodes();
    std::vector<Sample> samples = parallel_map<Sample>(xs.size(), [&](std::size_t i) {
        return Sample{{static_cast<double>(evaluate(f, HighReal(xs[i])))}, xs[i]};
    });
    OrderVerdict v = summarize(0, "f >= 0", samples, grid.sign_tolerance);
    if (auto pw = as_piecewise(f)) v = exact_verdict(0, "f >= 0", measure_sign_witness(*pw, 0, 1), v);
    return v;
}

}  // namespace detail

/// f in S_k: f >= 0 and (-1)^{n-1}(x^n f)^{(2n-1)} >= 0, n = 1..k, the top order in the measure sense.
inline MembershipReport check_Sk(const Model& f, int k, const GridConfig& grid = {}) {
    if (k < 1) throw std::invalid_argument("check_Sk needs k >= 1");
    MembershipReport r;
    r.test = "S_k";
    r.k = k;
    r.grid = grid.describe();
    r.sign_tolerance = grid.sign_tolerance;
    r.orders.push_back(detail::nonnegativity(f, grid));
    for (auto& o : detail::sk_conditions(f, k, grid, true)) r.orders.push_back(o);
    r.finalize();
    return r;
}

// ---------------------------------------------------------------------------
// k-monotone functions of w on (2, inf).

/// A function of w: derivatives through `eval(w, j)` for j <= max_order; an
/// exact v-chart form when known.
struct WFunction {
    std::function<HighReal(const HighReal&, int)> eval;
    int max_order = 0;
    std::optional<HyperbolicFn> exact;
};

/// Wraps a HyperbolicFn (exact derivatives in the v-field).
inline WFunction w_function(const HyperbolicFn& h, int max_order) {
    auto derivs = std::make_shared<std::vector<HyperbolicFn>>();
    derivs->push_back(h);
    for (int j = 1; j <= max_order; ++j) derivs->push_back(derivs->back().d_dw());
    WFunction out;
    out.eval = [derivs](const HighReal& w, int j) { return (*derivs)[static_cast<std::size_t>(j)].at_w(w); };
    out.max_order = max_order;
    out.exact = h;
    return out;
}

namespace detail {

/// j! times the divided difference of order m of the values y over nodes x[i..i+m].
inline HighReal scaled_divided_difference(const std::vector<HighReal>& x, const std::vector<HighReal>& y, std::size_t i,
                                          int m) {
    std::vector<HighReal> d(y.begin() + static_cast<long>(i), y.begin() + static_cast<long>(i) + m + 1);
    for (int level = 1; level <= m; ++level)
        for (int t = 0; t + level <= m; ++t)
            d[static_cast<std::size_t>(t)] =
                (d[static_cast<std::size_t>(t) + 1] - d[static_cast<std::size_t>(t)]) /
                (x[i + static_cast<std::size_t>(t + level)] - x[i + static_cast<std::size_t>(t)]);
    HighReal f = 1;
    for (int j = 2; j <= m; ++j) f *= j;
    return d[0] * f;
}

/// Exact M_k test for a smooth v-chart function: (-1)^j h^{(j)} >= 0 on v > 1, j = 0..k.
/// nullopt when a pole on v > 1 prevents the certificate.
inline std::optional<std::vector<std::optional<Rational>>> exact_mk_witnesses(const HyperbolicFn& h, int k) {
    std::vector<std::optional<Rational>> out;
    HyperbolicFn d = h;
    for (int j = 0; j <= k; ++j) {
        const RationalFn& r = d.in_v();
        if (r.den().degree() > 0 && count_roots_open(r.den(), Rational(1), Rational(1), true) > 0) return std::nullopt;
        const RationalFn signed_r = j % 2 ? -r : r;
        out.push_back(negative_point(signed_r, Rational(1), std::nullopt));
        if (j < k) d = d.d_dw();
    }
    return out;
}

}  // namespace detail

/// h in M_k on (2, inf): (-1)^j h^{(j)} >= 0 for j <= k-1 and (-1)^{k-2} h^{(k-2)} convex
/// (k = 1: h non-increasing; k = 0: h >= 0).
inline MembershipReport check_Mk(const WFunction& h, int k, const HyperbolicGrid& grid = {}) {
    if (k < 0) throw std::invalid_argument("check_Mk needs k >= 0");
    MembershipReport r;
    r.test = "M_k";
    r.k = k;
    r.grid = grid.describe();
    r.sign_tolerance = grid.sign_tolerance;
    const double eps = grid.sign_tolerance;
    const std::vector<double> ws = grid.w_nodes();
    const int m = h.max_order;
    const std::size_t nw = ws.size();
    std::vector<HighReal> wq(nw);
    for (std::size_t i = 0; i < nw; ++i) wq[i] = HighReal(ws[i]);
    // Values of h^{(j)} for j <= min(m, k-1).
    const int top_sym = std::min(m, std::max(k - 1, 0));
    std::vector<std::vector<HighReal>> vals(static_cast<std::size_t>(top_sym) + 1, std::vector<HighReal>(nw));
    for (int j = 0; j <= top_sym; ++j)
        for (std::size_t i = 0; i < nw; ++i) vals[static_cast<std::size_t>(j)][i] = h.eval(wq[i], j);

    auto sign_order = [&](int j) {
        std::vector<detail::Sample> samples;
        const int sgn_j = j % 2 ? -1 : 1;
        if (j <= m) {
            for (std::size_t i = 0; i < nw; ++i)
                samples.push_back({{static_cast<double>(sgn_j * vals[static_cast<std::size_t>(j)][i])}, ws[i]});
        } else {
            const int base = std::min(m, top_sym);
            const int extra = j - base;
            for (std::size_t i = 0; i + static_cast<std::size_t>(extra) < nw; ++i) {
                const HighReal dd = detail::scaled_divided_difference(wq, vals[static_cast<std::size_t>(base)], i, extra);
                samples.push_back({{static_cast<double>(sgn_j * dd)}, ws[i]});
            }
        }
        std::string cond = "(-1)^" + std::to_string(j) + " h^(" + std::to_string(j) + ") >= 0";
        if (j > m) cond += " (divided differences)";
        return detail::summarize(j, cond, samples, eps);
    };

    for (int j = 0; j <= std::max(k - 1, 0); ++j) r.orders.push_back(sign_order(j));
    if (k >= 1) {
        const int t = std::max(k - 2, 0);
        if (t <= m) {
            const int sgn_t = t % 2 ? -1 : 1;
            std::vector<detail::Sample> samples(nw);
            for (std::size_t i = 0; i < nw; ++i) {
                const HighReal w = wq[i];
                const HighReal g0 = sgn_t * h.eval(w, t);
                samples[i].at = ws[i];
                for (double sigma : detail::kDifferenceSteps) {
                    const HighReal step = (w - 2) * HighReal(sigma);
                    const HighReal gp = sgn_t * h.eval(w + step, t), gm = sgn_t * h.eval(w - step, t);
                    const HighReal v = k == 1 ? HighReal(-(gp - gm) / (2 * step)) : HighReal((gp - 2 * g0 + gm) / (step * step));
                    samples[i].values.push_back(static_cast<double>(v));
                }
            }
            const std::string cond = k == 1 ? "h non-increasing" : "(-1)^" + std::to_string(t) + " h^(" + std::to_string(t) + ") convex";
            r.orders.push_back(detail::summarize(k, cond, samples, eps));
        } else {
            r.orders.push_back(sign_order(k));
        }
    }
    if (h.exact) {
        if (auto wit = detail::exact_mk_witnesses(*h.exact, k)) {
            // Smooth on v > 1: order-j sign conditions, the top one in place of convexity.
            for (auto& o : r.orders) {
                const auto& w = (*wit)[static_cast<std::size_t>(o.order)];
                o = detail::exact_verdict(o.order, o.condition, w, o);
                if (w) o.location = to_real<double>(*w + 1 / *w);  // report w = v + 1/v
            }
        }
    }
    r.finalize();
    return r;
}

namespace detail {

/// Rational close to a positive double (continued fractions, denominator <= max_den).
inline Rational rational_near(double x, long max_den = 1000) {
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(r);
        const long ai = static_cast<long>(a);
        const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (r - a < 1e-12) break;
        r = 1 / (r - a);
    }
    return make_rational(p1, q1);
}

/// Per-u reports merged order by order (worst margin, combined verdict).
inline MembershipReport merge_over_u(std::string test, int k, const std::vector<double>& us,
                                     const std::vector<MembershipReport>& per_u, const HyperbolicGrid& grid) {
    MembershipReport r;
    r.test = std::move(test);
    r.k = k;
    r.grid = grid.describe();
    r.sign_tolerance = grid.sign_tolerance;
    for (std::size_t i = 0; i < per_u.size(); ++i) {
        for (const auto& o : per_u[i].orders) {
            auto it = std::find_if(r.orders.begin(), r.orders.end(), [&](const OrderVerdict& x) { return x.order == o.order; });
            OrderVerdict c = o;
            c.u = us[i];
            if (it == r.orders.end()) {
                r.orders.push_back(c);
                continue;
            }
            const bool take = (c.verdict == Verdict::Fail && it->verdict != Verdict::Fail) ||
                              (c.verdict == it->verdict && c.worst_margin < it->worst_margin) ||
                              (it->verdict == Verdict::Pass && c.verdict == Verdict::Inconclusive);
            const Verdict v = combine(it->verdict, c.verdict);
            if (c.method != it->method) c.method = it->method = "symbolic-exact+grid-float";
            if (take) *it = c;
            it->verdict = v;
        }
    }
    r.finalize();
    return r;
}

/// psi_f for membership tests, or nullopt when f has a zero.
inline std::optional<Model> psi_or_zero(const Model& f) {
    try {
        return log_derivative_psi(f);
    } catch (const ZeroFactorError&) {
        return std::nullopt;
    }
}

inline MembershipReport zero_factor_report(std::string test, int k) {
    MembershipReport r;
    r.test = std::move(test);
    r.k = k;
    OrderVerdict o;
    o.order = 0;
    o.condition = "f > 0 everywhere";
    o.verdict = k >= 2 ? Verdict::Fail : Verdict::Inconclusive;
    o.worst_margin = 0;
    o.method = "symbolic-exact";
    r.orders.push_back(o);
    r.finalize();
    return r;
}

}  // namespace detail

/// f in HM_k: F_u(w) = f(uv) f(u/v) is k-monotone in w for every u on the grid.
inline MembershipReport check_HMk(const Model& f, int k, const HyperbolicGrid& grid = {}) {
    if (k < 1) throw std::invalid_argument("check_HMk needs k >= 1");
    const std::vector<double> us = grid.u_nodes();
    const auto rat = as_rational(f);
    std::vector<MembershipReport> per_u = parallel_map<MembershipReport>(us.size(), [&](std::size_t i) {
        const HighReal u(us[i]);
        WFunction F;
        F.max_order = std::max(k - 1, 0);
        F.eval = [&f, u](const HighReal& w, int j) {
            const Jet<HighReal> W = Jet<HighReal>::variable(j, w);
            const Jet<HighReal> v = (W + sqrt(W * W - HighReal(4))) / HighReal(2);
            const Jet<HighReal> val = evaluate(f, v * u) * evaluate(f, u / v);
            return val.derivative(j);
        };
        if (rat) {
            const Rational uq = detail::rational_near(us[i]);
            const RationalFn Fv = rat->compose(RationalFn::monomial(uq, 1)) * rat->compose(RationalFn::monomial(uq, -1));
            F.exact = HyperbolicFn(Fv);
            const HighReal ue = to_real<HighReal>(uq);
            F.eval = [&f, ue](const HighReal& w, int j) {
                const Jet<HighReal> W = Jet<HighReal>::variable(j, w);
                const Jet<HighReal> v = (W + sqrt(W * W - HighReal(4))) / HighReal(2);
                return (evaluate(f, v * ue) * evaluate(f, ue / v)).derivative(j);
            };
        }
        return check_Mk(F, k, grid);
    });
    std::vector<double> us_used = us;
    if (rat)
        for (auto& u : us_used) u = to_real<double>(detail::rational_near(u));
    return detail::merge_over_u("HM_k", k, us_used, per_u, grid);
}

/// Power-regular HM_k: (-1)^j (x^j (log f)')^{(2j-1)} >= 0 for j = 1..k.
inline MembershipReport check_HMk_hat(const Model& f, int k, const GridConfig& grid = {}) {
    if (k < 1) throw std::invalid_argument("check_HMk_hat needs k >= 1");
    const auto psi = detail::psi_or_zero(f);
    if (!psi) return detail::zero_factor_report("HM_k_hat", k);
    // g = -(log f)' = psi / x; the conditions are those of S_k for g.
    const Model g = model::product({*psi, model::rat(RationalFn::monomial(Rational(1), -1))});
    MembershipReport r;
    r.test = "HM_k_hat";
    r.k = k;
    r.grid = grid.describe();
    r.sign_tolerance = grid.sign_tolerance;
    r.orders = detail::sk_conditions(g, k, grid, false);
    for (auto& o : r.orders) o.condition = "(-1)^" + std::to_string(o.order) + " (x^" + std::to_string(o.order) +
                                            " (log f)')^(" + std::to_string(2 * o.order - 1) + ") >= 0";
    r.finalize();
    return r;
}

/// Delta_u(f)(w) = (psi_f(uv) - psi_f(u/v)) / (v - 1/v) as a w-function.
inline WFunction delta_u_function(const Model& psi, const HighReal& u, int max_order) {
    WFunction D;
    D.max_order = max_order;
    D.eval = [psi, u](const HighReal& w, int j) {
        const Jet<HighReal> W = Jet<HighReal>::variable(j, w);
        const Jet<HighReal> v = (W + sqrt(W * W - HighReal(4))) / HighReal(2);
        const Jet<HighReal> num = evaluate(psi, v * u) - evaluate(psi, u / v);
        return (num / (v - HighReal(1) / v)).derivative(j);
    };
    return D;
}

/// Delta_u(f) in M_{k-1} for every u on the grid.
inline MembershipReport check_delta_route(const Model& f, int k, const HyperbolicGrid& grid = {}) {
    if (k < 1) throw std::invalid_argument("check_delta_route needs k >= 1");
    const auto psi = detail::psi_or_zero(f);
    if (!psi) return detail::zero_factor_report("delta_route", k);
    const auto psi_rat = as_rational(*psi);
    const std::vector<double> us = grid.u_nodes();
    std::vector<double> us_used = us;
    if (psi_rat)
        for (auto& u : us_used) u = to_real<double>(detail::rational_near(u));
    std::vector<MembershipReport> per_u = parallel_map<MembershipReport>(us.size(), [&](std::size_t i) {
        WFunction D = delta_u_function(*psi, HighReal(us_used[i]), std::max(k - 2, 0));
        if (psi_rat) {
            const Rational uq = detail::rational_near(us[i]);
            const RationalFn num = psi_rat->compose(RationalFn::monomial(uq, 1)) - psi_rat->compose(RationalFn::monomial(uq, -1));
            D.exact = HyperbolicFn(num / RationalFn(QPoly{Rational(-1), Rational(0), Rational(1)}, QPoly::x()));
        }
        return check_Mk(D, k - 1, grid);
    });
    return detail::merge_over_u("delta_route", k, us_used, per_u, grid);
}

}  // namespace stieltjesk
