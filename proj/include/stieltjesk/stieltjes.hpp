#pragma once

// Measures on [0, inf), the finite-order transform
//     f(x) = a + int Phi_{k-1}(x, t) mu(dt),
// its inversion from f, and an exact round trip for polynomial densities.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stieltjesk/funcmodel.hpp"
#include "stieltjesk/kernels.hpp"
#include "stieltjesk/logrational.hpp"
#include "stieltjesk/quadrature.hpp"
#include "stieltjesk/sign.hpp"

namespace stieltjesk {

class InvalidMeasure : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PointMass {
    Rational location;
    Rational mass;
};

struct DensityPiece {
    Rational a;
    std::optional<Rational> b;  // nullopt: unbounded
    Model density;
};

struct MeasureSpec {
    std::vector<PointMass> atoms;
    std::vector<DensityPiece> pieces;
    std::optional<double> tail_exponent;  // density ~ c t^{-s} beyond the last breakpoint

    bool empty() const { return atoms.empty() && pieces.empty(); }

    /// All breakpoints of the density pieces.
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        for (const auto& p : pieces) {
            out.push_back(to_real<double>(p.a));
            if (p.b) out.push_back(to_real<double>(*p.b));
        }
        return out;
    }
};

/// int (1 + t)^{-1} mu(dt).
template <class Real = double>
QuadResult<Real> integrability_integral(const MeasureSpec& mu, const QuadOptions& o = {}) {
    QuadResult<Real> total;
    for (const auto& a : mu.atoms) total.value += to_real<Real>(a.mass) / (1 + to_real<Real>(a.location));
    for (const auto& p : mu.pieces) {
        const Model& d = p.density;
        auto f = [&d](Real t) { return evaluate(d, t) / (1 + t); };
        const Real hi = p.b ? to_real<Real>(*p.b) : std::numeric_limits<Real>::infinity();
        total += integrate_segments<Real>(f, to_real<Real>(p.a), hi, {}, o);
    }
    return total;
}

namespace detail {

inline bool is_finite_real(const Asymptotic& a) { return a.kind != Asymptotic::Kind::Unknown; }

}  // namespace detail

/// Checks ranges, nonnegativity and integrability of (1+t)^{-1}; throws InvalidMeasure.
inline void validate(const MeasureSpec& mu, const QuadOptions& o = {}) {
    for (const auto& a : mu.atoms) {
        if (a.location < 0) throw InvalidMeasure("atom location must be >= 0");
        if (a.mass <= 0) throw InvalidMeasure("atom mass must be > 0");
    }
    for (std::size_t i = 0; i < mu.pieces.size(); ++i) {
        const auto& p = mu.pieces[i];
        if (p.a < 0) throw InvalidMeasure("density piece must lie in [0, inf)");
        if (p.b && *p.b <= p.a) throw InvalidMeasure("density piece needs a < b");
        if (!p.b && i + 1 != mu.pieces.size()) throw InvalidMeasure("only the last density piece may be unbounded");
        if (i > 0 && (!mu.pieces[i - 1].b || *mu.pieces[i - 1].b > p.a))
            throw InvalidMeasure("density pieces must be sorted and disjoint");
        if (auto r = as_rational(p.density)) {
            if (auto w = negative_point(*r, p.a, p.b))
                throw InvalidMeasure("density is negative at t=" + w->get_str());
            if (r->den().degree() > 0 && count_roots_open(r->den(), p.a, p.b ? *p.b : p.a, !p.b) > 0)
                throw InvalidMeasure("density has a pole inside its interval");
        } else {
            const double lo = std::max(to_real<double>(p.a), 1e-6);
            const double hi = p.b ? to_real<double>(*p.b) : std::max(lo * 1e6, 1e6);
            double worst = 0, scale = 0;
            for (int j = 0; j <= 256; ++j) {
                const double t = lo * std::pow(hi / lo, j / 256.0);
                const double v = evaluate(p.density, t);
                if (!std::isfinite(v)) throw InvalidMeasure("density is not finite at t=" + std::to_string(t));
                worst = std::min(worst, v);
                scale = std::max(scale, std::abs(v));
            }
            if (worst < -1e-12 * (1 + scale)) throw InvalidMeasure("density takes negative values");
        }
        if (p.a == 0) {
            const Asymptotic z = asymptotic_at_zero(p.density);
            if (z.kind == Asymptotic::Kind::ExpLarge || (z.kind == Asymptotic::Kind::Power && z.exponent <= -1))
                throw InvalidMeasure("density is not integrable at 0");
        }
        if (!p.b) {
            double s = 0;
            if (mu.tail_exponent) {
                s = *mu.tail_exponent;
            } else {
                const Asymptotic inf = asymptotic_at_infinity(p.density);
                if (inf.kind == Asymptotic::Kind::Zero || inf.kind == Asymptotic::Kind::ExpSmall) s = 1e300;
                else if (inf.kind == Asymptotic::Kind::Power) s = -static_cast<double>(inf.exponent);
                else if (!detail::is_finite_real(inf)) s = 0;
                else s = -1;
            }
            if (!(s > 0)) throw InvalidMeasure("tail of the density does not integrate (1+t)^{-1}");
        }
    }
    const auto I = integrability_integral<double>(mu, o);
    if (!std::isfinite(I.value) || !I.converged)
        throw InvalidMeasure("integral of (1+t)^{-1} against the measure did not converge (error " +
                             std::to_string(I.error) + ")");
}

// ---------------------------------------------------------------------------
// Exact transforms of atoms and polynomial pieces.

namespace detail {

inline LogRationalFn times(const LogConst& c, const RationalFn& r) {
    LogRationalFn f(r * RationalFn(c.rational));
    for (const auto& [p, w] : c.logs) f = f + LogRationalFn::log_const_times(Rational(p), r * RationalFn(w));
    return f;
}

/// int_a^b t^e dt, exact (logs for e = -1).
inline LogConst power_integral(int e, const Rational& a, const Rational& b) {
    if (e == -1) return LogConst::log_of(b) - LogConst::log_of(a);
    return LogConst((rpow(b, e + 1) - rpow(a, e + 1)) / (e + 1));
}

}  // namespace detail

/// x -> mass * Phi_K(x, loc).
inline PiecewiseLogRational kernel_transform_of_atom(int K, const Rational& loc, const Rational& mass) {
    const KernelFamily& fam = build_kernel_family(K);
    if (loc == 0) return LogRationalFn(RationalFn::monomial(mass * fam.P.coeff(0), -1));
    RationalFn high, low;
    for (int n = 0; n <= K; ++n) {
        const Rational c = fam.P.coeff(n) * mass;
        high += RationalFn::monomial(c * rpow(loc, n), -n - 1);
        if (n >= 1) low -= RationalFn::monomial(c * rpow(loc, -n), n - 1);
    }
    return PiecewiseLogRational({loc}, {LogRationalFn(low), LogRationalFn(high)});
}

/// x -> int_a^b Phi_K(x, t) p(t) dt for a polynomial p on a bounded [a, b].
inline PiecewiseLogRational kernel_transform_of_polynomial(int K, const QPoly& p, const Rational& a, const Rational& b) {
    if (a < 0 || b <= a) throw InvalidMeasure("polynomial piece needs 0 <= a < b");
    const KernelFamily& fam = build_kernel_family(K);
    auto xm = [](int e) { return RationalFn::monomial(Rational(1), e); };
    LogRationalFn below, middle, above;
    for (int n = 0; n <= K; ++n) {
        const Rational c = fam.P.coeff(n);
        if (c == 0) continue;
        for (int m = 0; m <= p.degree(); ++m) {
            const Rational pm = p.coeff(m);
            if (pm == 0) continue;
            const Rational cp = c * pm;
            // t <= x: (c/x) (t/x)^n, integrated over t in [a, b] or [a, x].
            above = above + detail::times(detail::power_integral(m + n, a, b) * cp, xm(-n - 1));
            {
                const int j = m + n + 1;
                // (x^j - a^j)/j * x^{-n-1}
                middle = middle + LogRationalFn((RationalFn::monomial(Rational(1), j) - RationalFn(rpow(a, j))) *
                                                RationalFn(cp / j) * xm(-n - 1));
            }
            if (n == 0) continue;
            // t > x: -(c/x) (x/t)^n over t in [a, b] or [x, b].
            if (a > 0) below = below - detail::times(detail::power_integral(m - n, a, b) * cp, xm(n - 1));
            const int e = m - n;
            if (e == -1) {
                // int_x^b t^{-1} dt = log b - log x
                middle = middle - detail::times(LogConst::log_of(b) * cp, xm(n - 1));
                middle = middle + LogRationalFn::log_x_times(RationalFn(cp) * xm(n - 1));
            } else {
                middle = middle - LogRationalFn((RationalFn(rpow(b, e + 1)) - RationalFn::monomial(Rational(1), e + 1)) *
                                                RationalFn(cp / (e + 1)) * xm(n - 1));
            }
        }
    }
    if (a == 0) return PiecewiseLogRational({b}, {middle, above});
    return PiecewiseLogRational({a, b}, {below, middle, above});
}

// ---------------------------------------------------------------------------
// Forward transform.

struct TransformResult {
    int k = 2;
    Rational drift{0};
    MeasureSpec measure;
    QuadOptions options;
    std::optional<PiecewiseLogRational> exact_form;

    /// f(x) with a quadrature error estimate.
    template <class Real = double>
    QuadResult<Real> evaluate(Real x) const {
        if (!(x > 0)) throw std::domain_error("transform evaluated at x <= 0");
        QuadResult<Real> r;
        r.value = to_real<Real>(drift);
        const int K = k - 1;
        for (const auto& a : measure.atoms) r.value += to_real<Real>(a.mass) * eval_Phi(K, x, to_real<Real>(a.location));
        for (const auto& p : measure.pieces) {
            const Model& d = p.density;
            auto f = [&](Real t) { return eval_Phi(K, x, t) * stieltjesk::evaluate(d, t); };
            const Real hi = p.b ? to_real<Real>(*p.b) : std::numeric_limits<Real>::infinity();
            r += integrate_segments<Real>(f, to_real<Real>(p.a), hi, {x}, options);
        }
        return r;
    }

    /// f(x); throws QuadratureError when the quadrature did not converge.
    double operator()(double x) const {
        const auto r = evaluate<double>(x);
        if (!r.converged) throw QuadratureError("transform quadrature did not converge", r.error);
        return r.value;
    }
};

inline TransformResult forward_transform(int k, const Rational& drift, const MeasureSpec& mu, const QuadOptions& o = {}) {
    if (k < 2) throw std::domain_error("forward_transform needs k >= 2");
    if (drift < 0) throw std::domain_error("drift must be >= 0");
    validate(mu, o);
    TransformResult r{k, drift, mu, o, std::nullopt};
    // Exact form when every density piece is a polynomial on a bounded interval.
    PiecewiseLogRational exact{LogRationalFn(RationalFn(drift))};
    bool ok = true;
    for (const auto& p : mu.pieces) {
        auto q = as_rational(p.density);
        if (!p.b || !q || !q->is_polynomial()) {
            ok = false;
            break;
        }
        exact = exact + kernel_transform_of_polynomial(k - 1, q->num() * (Rational(1) / q->den().leading()), p.a, *p.b);
    }
    if (ok) {
        for (const auto& a : mu.atoms) exact = exact + kernel_transform_of_atom(k - 1, a.location, a.mass);
        r.exact_form = exact;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Inversion.

class NegativeDensityError : public std::domain_error {
public:
    NegativeDensityError(const std::string& what, double t, double value)
        : std::domain_error(what), location(t), value(value) {}
    double location;
    double value;
};

/// Exact inversion data for a piecewise log-rational f.
struct ExactInversion {
    int k = 2;
    LogConst drift;          // a_k = g'(inf)
    LogConst atom_at_zero;   // g(0+) / binom(2k-2, k-1)
    LogConst b_k;            // (-1)^{k-1} phi_k^{(k-2)}(0+) / (k-2)!
    std::vector<std::pair<Rational, LogConst>> atoms;  // positive locations
    PiecewiseLogRational density;
    bool lower_order_jumps_vanish = true;  // false: the measure would need derivatives of Dirac masses
};

inline ExactInversion invert_exact(const PiecewiseLogRational& f, int k) {
    if (k < 2) throw std::domain_error("inversion needs k >= 2");
    ExactInversion out;
    out.k = k;
    const PiecewiseLogRational g = f * RationalFn::x();
    const auto gp = g.derivative_pieces(1).pieces().back().limit_at_infinity();
    if (!gp) throw DivergentLimit("g'(inf) diverges");
    out.drift = *gp;
    const auto g0 = g.pieces().front().limit_at_zero();
    if (!g0) throw DivergentLimit("g(0+) diverges");
    out.atom_at_zero = *g0 * (Rational(1) / Rational(binomial(2 * k - 2, k - 1)));
    const PiecewiseLogRational phi = g.derivative_pieces(k) * RationalFn::monomial(Rational(1), 2 * k - 1);
    const Rational sign(k % 2 == 1 ? 1 : -1);  // (-1)^{k-1}
    const Rational norm = sign / Rational(factorial(2 * k - 2));
    // Jumps: order k-2 gives atoms, lower orders must be continuous.
    for (int j = 0; j <= k - 2; ++j) {
        const PiecewiseLogRational d = phi.derivative_pieces(j);
        for (std::size_t i = 0; i < d.breakpoints().size(); ++i) {
            const LogConst jump = d.right_limit(i) - d.left_limit(i);
            if (jump == LogConst()) continue;
            if (j < k - 2) {
                out.lower_order_jumps_vanish = false;
            } else {
                const Rational t = d.breakpoints()[i];
                out.atoms.emplace_back(t, jump * (norm / t));
            }
        }
    }
    const auto phi0 = phi.derivative_pieces(k - 2).pieces().front().limit_at_zero();
    if (!phi0) throw DivergentLimit("phi_k^{(k-2)}(0+) diverges");
    out.b_k = *phi0 * (sign / Rational(factorial(k - 2)));
    out.density = (phi.derivative_pieces(k - 1) * RationalFn::monomial(norm, -1)).simplified();
    return out;
}

struct InversionResult {
    int k = 2;
    LimitValue drift;
    LimitValue atom_at_zero;
    LimitValue b_k;
    std::vector<PointMass> atoms;  // positive locations (exact path only)
    Model density;                 // on (0, inf)
    std::optional<ExactInversion> exact;
    MeasureSpec measure;
    std::optional<std::pair<double, double>> negative_witness;  // (t, density value)
};

struct InvertOptions {
    bool throw_on_negative = true;
    double grid_min = 1e-4, grid_max = 1e4;
    int grid_points = 400;
    double tolerance = 1e-9;
    std::size_t node_cap = kDefaultNodeCap;
};

namespace detail {

inline LimitValue exact_limit(const LogConst& c) {
    LimitValue v;
    v.value = c.as<HighReal>();
    if (c.is_rational()) v.exact = c.rational;
    v.method = "exact";
    return v;
}

inline InversionResult invert_rational(const PiecewiseRationalFn& f, int k, const InvertOptions&) {
    InversionResult r;
    r.k = k;
    const ExactInversion ex = invert_exact(PiecewiseLogRational::from(f), k);
    if (!ex.lower_order_jumps_vanish)
        throw std::domain_error("f is not smooth enough: the measure would need derivatives of Dirac masses");
    r.drift = exact_limit(ex.drift);
    r.atom_at_zero = exact_limit(ex.atom_at_zero);
    r.b_k = exact_limit(ex.b_k);
    std::vector<RationalFn> pieces;
    for (const auto& p : ex.density.pieces()) pieces.push_back(p.rational_part());
    const PiecewiseRationalFn dens(ex.density.breakpoints(), pieces);
    r.density = model::piecewise(dens);
    if (r.atom_at_zero.exact && *r.atom_at_zero.exact != 0) r.measure.atoms.push_back({Rational(0), *r.atom_at_zero.exact});
    for (const auto& [t, m] : ex.atoms) {
        r.atoms.push_back({t, m.rational});
        r.measure.atoms.push_back({t, m.rational});
    }
    for (std::size_t i = 0; i < dens.size(); ++i) {
        const RationalFn& piece = dens.pieces()[i];
        if (!r.negative_witness) {
            if (auto w = negative_point(piece, dens.lower(i), dens.upper(i)))
                r.negative_witness = std::make_pair(to_real<double>(*w), to_real<double>(piece(*w)));
        }
        if (piece.is_zero()) continue;
        r.measure.pieces.push_back({dens.lower(i), dens.upper(i), model::rat(piece)});
        if (!dens.upper(i)) r.measure.tail_exponent = -piece.order_at_infinity();
    }
    for (const auto& a : r.measure.atoms)
        if (a.mass < 0 && !r.negative_witness) r.negative_witness = std::make_pair(to_real<double>(a.location), to_real<double>(a.mass));
    r.exact = ex;
    return r;
}

}  // namespace detail

/// phi_k^{(k-1)} density model of f: (-1)^{k-1} ((2k-2)! t)^{-1} phi_k^{(k-1)}(t), symbolic when the tree stays small.
inline Model inversion_density_model(const Model& f, int k, std::size_t node_cap = kDefaultNodeCap) {
    const Rational norm = Rational(k % 2 == 1 ? 1 : -1) / Rational(factorial(2 * k - 2));
    const Model inv_t = model::rat(RationalFn::monomial(norm, -1));
    try {
        const Model g = g_of(f);
        const Model phi = model::product({model::rat(RationalFn::monomial(Rational(1), 2 * k - 1)), derivative(g, k, node_cap)});
        return model::product({inv_t, derivative(phi, k - 1, node_cap)});
    } catch (const NodeCapExceeded&) {
        return model::product({inv_t, model::lazy_derivative(phi_of(f, k), k - 1)});
    }
}

/// Recovers (a_k, mu_k) from f.
inline InversionResult invert(const Model& f, int k, const InvertOptions& o = {}) {
    if (k < 2) throw std::domain_error("inversion needs k >= 2");
    InversionResult r;
    if (auto p = as_piecewise(f)) {
        r = detail::invert_rational(*p, k, o);
    } else {
        r.k = k;
        const Model g = g_of(f);
        r.drift = limit_at_infinity(model::lazy_derivative(g, 1));
        LimitValue g0 = limit_at_zero(g);
        const HighReal c(to_real<HighReal>(Rational(binomial(2 * k - 2, k - 1))));
        r.atom_at_zero = g0;
        r.atom_at_zero.value = g0.value / c;
        r.atom_at_zero.uncertainty = g0.uncertainty / c;
        if (g0.exact) r.atom_at_zero.exact = *g0.exact / Rational(binomial(2 * k - 2, k - 1));
        const BoundaryData bd = boundary_data(f, k);
        r.b_k = bd.phi_derivs_at_0.back();
        const HighReal s = HighReal(k % 2 == 1 ? 1 : -1) / to_real<HighReal>(Rational(factorial(k - 2)));
        r.b_k.value *= s;
        r.b_k.uncertainty *= abs(s);
        if (r.b_k.exact) r.b_k.exact = *r.b_k.exact * (Rational(k % 2 == 1 ? 1 : -1) / Rational(factorial(k - 2)));
        r.density = inversion_density_model(f, k, o.node_cap);
        const double a0 = static_cast<double>(r.atom_at_zero.value);
        if (std::abs(a0) > o.tolerance) {
            if (r.atom_at_zero.exact) r.measure.atoms.push_back({Rational(0), *r.atom_at_zero.exact});
            else r.measure.atoms.push_back({Rational(0), rational_from_real(r.atom_at_zero.value)});
        }
        r.measure.pieces.push_back({Rational(0), std::nullopt, r.density});
        // Sign scan on a log grid.
        double worst = 0, worst_t = 0, scale = 0;
        for (int i = 0; i < o.grid_points; ++i) {
            const double t = o.grid_min * std::pow(o.grid_max / o.grid_min, i / double(o.grid_points - 1));
            const double v = static_cast<double>(evaluate(r.density, HighReal(t)));
            scale = std::max(scale, std::abs(v));
            if (v < worst) {
                worst = v;
                worst_t = t;
            }
        }
        if (worst < -o.tolerance * (1 + scale)) r.negative_witness = std::make_pair(worst_t, worst);
        if (a0 < -o.tolerance && !r.negative_witness) r.negative_witness = std::make_pair(0.0, a0);
    }
    if (o.throw_on_negative && r.negative_witness)
        throw NegativeDensityError("inverted density is negative at t=" + std::to_string(r.negative_witness->first) +
                                       " (value " + std::to_string(r.negative_witness->second) + "): f is not in S_k",
                                   r.negative_witness->first, r.negative_witness->second);
    return r;
}

// ---------------------------------------------------------------------------
// Round trip on polynomial-density measures.

struct RoundTripReport {
    bool drift_match = false;
    bool atom_at_zero_match = false;
    bool atoms_match = false;
    bool density_match = false;
    bool b_k_zero = false;
    ExactInversion recovered;

    bool all() const { return drift_match && atom_at_zero_match && atoms_match && density_match && b_k_zero; }
};

inline RoundTripReport roundtrip_check(int k, const Rational& drift, const MeasureSpec& mu) {
    const TransformResult fwd = forward_transform(k, drift, mu);
    if (!fwd.exact_form) throw InvalidMeasure("round trip needs polynomial densities on bounded intervals");
    RoundTripReport rep;
    rep.recovered = invert_exact(*fwd.exact_form, k);
    const ExactInversion& inv = rep.recovered;
    rep.drift_match = inv.drift == LogConst(drift);
    Rational m0(0);
    std::vector<std::pair<Rational, Rational>> expected;
    for (const auto& a : mu.atoms) {
        if (a.location == 0) m0 += a.mass;
        else expected.emplace_back(a.location, a.mass);
    }
    rep.atom_at_zero_match = inv.atom_at_zero == LogConst(m0);
    std::sort(expected.begin(), expected.end());
    std::vector<std::pair<Rational, Rational>> got;
    bool rational_atoms = true;
    for (const auto& [t, m] : inv.atoms) {
        if (!m.is_rational()) rational_atoms = false;
        got.emplace_back(t, m.rational);
    }
    std::sort(got.begin(), got.end());
    rep.atoms_match = rational_atoms && got == expected;
    // Expected density: the pieces, zero elsewhere.
    PiecewiseLogRational want;
    for (const auto& p : mu.pieces) {
        const RationalFn q = *as_rational(p.density);
        if (p.a == 0) want = want + PiecewiseLogRational({*p.b}, {LogRationalFn(q), LogRationalFn()});
        else want = want + PiecewiseLogRational({p.a, *p.b}, {LogRationalFn(), LogRationalFn(q), LogRationalFn()});
    }
    rep.density_match = want == inv.density;
    rep.b_k_zero = inv.b_k == LogConst();
    return rep;
}

}  // namespace stieltjesk
