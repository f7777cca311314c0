#pragma once

// Worked examples: the Cauchy-type family 1/(1 + 2 cos(pi a) x + x^2), the
// power-function (GIG) decomposition, kernel recursions, and the Levy
// measures built from psi_k.

#include <boost/math/special_functions/gegenbauer.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stieltjesk/kernels.hpp"
#include "stieltjesk/membership.hpp"
#include "stieltjesk/quadrature.hpp"

namespace stieltjesk {

// ---------------------------------------------------------------------------
// Cauchy-type family.

/// T_j(c): cos(j theta) from c = cos(theta), exact for rational c.
inline Rational chebyshev_t(int j, const Rational& c) {
    Rational a(1), b = c;
    if (j == 0) return a;
    for (int i = 1; i < j; ++i) {
        Rational next = 2 * c * b - a;
        a = b;
        b = next;
    }
    return b;
}

template <class Real>
Real chebyshev_t(int j, const Real& c) {
    Real a = 1, b = c;
    if (j == 0) return a;
    for (int i = 1; i < j; ++i) {
        Real next = 2 * c * b - a;
        a = b;
        b = next;
    }
    return b;
}

struct CauchyFamily {
    std::optional<Rational> alpha;  // unset for a free cosine parameter
    Coef cos_pi_alpha;
    Model f;  // 1/(1 + 2c x + x^2)
    Model g;  // -(log f)' = 2(c + x) f

    bool exact() const { return cos_pi_alpha.is_exact(); }
    HighReal c() const { return cos_pi_alpha.value(); }

    /// f^p.
    Model power(const Coef& p) const { return p.is_one() ? f : model::scale(p, f); }
};

/// The family with a given cosine (exact rational or inexact).
inline CauchyFamily cauchy_family_from_cos(const Coef& c) {
    if (c.is_exact() && !(c.exact() > -1 && c.exact() <= 1)) throw std::domain_error("cosine must lie in (-1, 1]");
    if (!c.is_exact() && !(c.value() > -1 && c.value() <= 1)) throw std::domain_error("cosine must lie in (-1, 1]");
    CauchyFamily fam;
    fam.cos_pi_alpha = c;
    if (c.is_exact()) {
        const Rational& q = c.exact();
        const QPoly den{Rational(1), Rational(2 * q), Rational(1)};
        fam.f = model::rat(RationalFn(QPoly::constant(Rational(1)), den));
        fam.g = model::rat(RationalFn(QPoly{Rational(2 * q), Rational(2)}, den));
    } else {
        fam.f = model::scale(Coef(Rational(-1)), model::sum({model::rat(RationalFn(QPoly{Rational(1), Rational(0), Rational(1)})),
                                                             model::power(Coef::real(2 * c.value()), Coef(Rational(1)))}));
        fam.g = model::product({model::sum({model::constant(Coef::real(c.value())), model::x()}), model::constant(Rational(2)),
                                fam.f});
    }
    return fam;
}

inline CauchyFamily cauchy_family(const Rational& alpha) {
    if (alpha < 0 || alpha >= 1) throw std::domain_error("alpha must lie in [0, 1)");
    CauchyFamily fam = cauchy_family_from_cos(cospi_coef(alpha));
    fam.alpha = alpha;
    return fam;
}

/// 2 (2n-1)! f^{2n} sum_m binom(2n, m) x^m cos((n-m) pi a), the closed sign expression.
inline HighReal cauchy_sign_expression(const CauchyFamily& fam, int n, const HighReal& x) {
    if (n < 1 || !(x > 0)) throw std::domain_error("cauchy_sign_expression needs n >= 1, x > 0");
    const HighReal c = fam.c();
    HighReal s = 0, xm = 1;
    for (int m = 0; m <= 2 * n; ++m) {
        s += to_real<HighReal>(Rational(binomial(2 * n, m))) * xm * chebyshev_t(std::abs(n - m), c);
        xm *= x;
    }
    const HighReal f = 1 / (1 + 2 * c * x + x * x);
    return 2 * to_real<HighReal>(Rational(factorial(2 * n - 1))) * pow(f, 2 * n) * s;
}

/// (-1)^{n-1} (x^n g)^{(2n-1)} through jets.
inline HighReal cauchy_sign_expression_direct(const CauchyFamily& fam, int n, const HighReal& x) {
    const HighReal d = detail::xpow_derivative(fam.g, n, 2 * n - 1, x);
    return n % 2 ? d : HighReal(-d);
}

/// Density of the measure representing g against Phi_{k-1}:
/// (4k-2) t^{k-1} (1 + 2ct + t^2)^{-2k} sum_n binom(2k, n) cos((n-k) pi a) t^n.
inline HighReal cauchy_density(const CauchyFamily& fam, int k, const HighReal& t) {
    if (k < 1 || t < 0) throw std::domain_error("cauchy_density needs k >= 1, t >= 0");
    const HighReal c = fam.c();
    HighReal s = 0, tn = 1;
    for (int n = 0; n <= 2 * k; ++n) {
        s += to_real<HighReal>(Rational(binomial(2 * k, n))) * chebyshev_t(std::abs(n - k), c) * tn;
        tn *= t;
    }
    return (4 * k - 2) * pow(t, k - 1) * s / pow(1 + 2 * c * t + t * t, 2 * k);
}

/// The same density as an exact rational function (rational cosine only).
inline RationalFn cauchy_density_exact(const CauchyFamily& fam, int k) {
    if (!fam.exact()) throw std::domain_error("cauchy_density_exact needs a rational cosine");
    const Rational& c = fam.cos_pi_alpha.exact();
    std::vector<Rational> num(static_cast<std::size_t>(3 * k), Rational(0));
    for (int n = 0; n <= 2 * k; ++n)
        num[static_cast<std::size_t>(n + k - 1)] = Rational(4 * k - 2) * Rational(binomial(2 * k, n)) * chebyshev_t(std::abs(n - k), c);
    const QPoly base{Rational(1), Rational(2 * c), Rational(1)};
    return RationalFn(QPoly(num), base.pow(2 * k));
}

struct ScanRow {
    Rational alpha;
    Verdict verdict = Verdict::Pass;
    double worst_margin = 0;
    double location = 0;
    std::optional<double> u;
    std::string method;
};

/// Last pass followed by first fail in a scan sorted by alpha; nullopt when the
/// pattern is not pass...pass fail...fail (inconclusive rows break it too).
struct Transition {
    Rational last_pass;
    Rational first_fail;
};

inline std::optional<Transition> find_transition(const std::vector<ScanRow>& rows) {
    std::size_t i = 0;
    while (i < rows.size() && rows[i].verdict == Verdict::Pass) ++i;
    if (i == 0 || i == rows.size()) return std::nullopt;
    for (std::size_t j = i; j < rows.size(); ++j)
        if (rows[j].verdict != Verdict::Fail) return std::nullopt;
    return Transition{rows[i - 1].alpha, rows[i].alpha};
}

/// a_j = lo + j step up to hi (inclusive), as exact rationals.
inline std::vector<Rational> alpha_grid(const Rational& lo, const Rational& hi, const Rational& step) {
    if (step <= 0 || hi < lo) throw std::invalid_argument("bad alpha grid");
    std::vector<Rational> out;
    for (Rational a = lo; a <= hi; a += step) out.push_back(a);
    return out;
}

inline ScanRow scan_row(const Rational& alpha, const MembershipReport& r) {
    return ScanRow{alpha, r.verdict, r.worst_margin, r.location, r.u, r.method};
}

/// check_HMk_hat(f_a, k) for each a.
inline std::vector<ScanRow> cauchy_threshold_scan(int k, const std::vector<Rational>& alphas, const GridConfig& grid = {}) {
    std::vector<ScanRow> rows;
    for (const Rational& a : alphas) rows.push_back(scan_row(a, check_HMk_hat(cauchy_family(a).f, k, grid)));
    return rows;
}

/// check_HMk(f_a^p, k) for each a.
inline std::vector<ScanRow> hm_power_threshold_scan(int k, const Coef& p, const std::vector<Rational>& alphas,
                                                    const HyperbolicGrid& grid = {}) {
    if (!(p.value() > 0)) throw std::domain_error("power must be positive");
    std::vector<ScanRow> rows;
    for (const Rational& a : alphas) rows.push_back(scan_row(a, check_HMk(cauchy_family(a).power(p), k, grid)));
    return rows;
}

/// Stated cosine thresholds for f_a^p in HM_k (k = 1, 2, 3).
inline double hm_power_cos_threshold(int k, double p) {
    switch (k) {
        case 1:
            return 0;
        case 2:
            return 1 / std::sqrt(2 * (p + 1));
        case 3:
            return std::sqrt(3 / (2 * (p + 2)));
    }
    throw std::domain_error("cosine thresholds are stated for k = 1, 2, 3 only");
}

inline double alpha_from_cos(double c) { return std::acos(c) / M_PI; }

/// Largest positive root of the Gegenbauer polynomial C_k^lambda (lambda > 0, k >= 1).
inline double gegenbauer_largest_root(int k, double lambda) {
    if (k < 1 || !(lambda > 0)) throw std::domain_error("gegenbauer_largest_root needs k >= 1, lambda > 0");
    if (k == 1) return 0;
    auto C = [&](double x) { return boost::math::gegenbauer(static_cast<unsigned>(k), lambda, x); };
    // Roots lie in (-1, 1); walk down from 1 to the first sign change.
    const int steps = 20000;
    double hi = 1, fhi = C(hi);
    for (int i = 1; i <= steps; ++i) {
        const double lo = 1 - static_cast<double>(i) / steps;
        const double flo = C(lo);
        if (flo == 0) return lo;
        if ((flo < 0) != (fhi < 0)) {
            boost::uintmax_t it = 200;
            const auto r = boost::math::tools::toms748_solve(C, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), it);
            return (r.first + r.second) / 2;
        }
        hi = lo;
        fhi = flo;
    }
    throw std::runtime_error("no positive Gegenbauer root found");
}

// ---------------------------------------------------------------------------
// Power functions: a x^{a-1} against Phi_{k-1}.

/// ((2k-2)!)^{-1} a^2 prod_{i<k} (i^2 - a^2), the coefficient of t^{a-1}.
inline Rational gig_coefficient(int k, const Rational& a) {
    if (k < 2) throw std::domain_error("gig_coefficient needs k >= 2");
    Rational c = a * a / Rational(factorial(2 * k - 2));
    for (int i = 1; i < k; ++i) c *= Rational(i * i) - a * a;
    return c;
}

struct GigPoint {
    double x = 0;
    double integral = 0;
    double target = 0;
    double residual = 0;
    double quad_error = 0;
};

/// |int Phi_{k-1}(x, t) c t^{a-1} dt - a x^{a-1}| at each x.
inline std::vector<GigPoint> gig_identity_check(int k, const Rational& a, const std::vector<double>& xs,
                                                const QuadOptions& o = {}) {
    if (!(a > 0 && a < 1)) throw std::domain_error("gig identity needs 0 < alpha < 1");
    const double c = to_real<double>(gig_coefficient(k, a));
    const double ad = to_real<double>(a);
    std::vector<GigPoint> out;
    for (double x : xs) {
        if (!(x > 0)) throw std::domain_error("x must be positive");
        // t = s^{1/a} removes the t^{a-1} singularity: dt = t^{1-a} ds / a.
        auto integrand = [&](double s) {
            const double t = std::pow(s, 1 / ad);
            if (!std::isfinite(t)) return 0.0;
            return eval_Phi(k - 1, x, t) * c / ad;
        };
        const auto r = integrate_segments<double>(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                                  {std::pow(x, ad)}, o);
        GigPoint p;
        p.x = x;
        p.integral = r.value;
        p.target = ad * std::pow(x, ad - 1);
        p.residual = std::abs(r.value - p.target);
        p.quad_error = r.error;
        out.push_back(p);
    }
    return out;
}

/// binom(2k-2, k-1) c_k(a) / (a sin(pi a) / pi), which tends to 1 as k grows.
inline double gig_product_ratio(int k, const Rational& a) {
    const HighReal ad = to_real<HighReal>(a);
    const HighReal lhs = to_real<HighReal>(Rational(Rational(binomial(2 * k - 2, k - 1)) * gig_coefficient(k, a)));
    return static_cast<double>(lhs / (ad * sin(pi_value<HighReal>() * ad) / pi_value<HighReal>()));
}

// ---------------------------------------------------------------------------
// Kernel recursions.

/// f_{n,k}(u) = (-1)^n u^{n+1} (u^n psi_k(u))^{(2n+1)} on (0, 1), a polynomial.
inline RationalFn recursion_weight(int n, int k) {
    if (n < 1 || n >= k) throw std::domain_error("recursion_weight needs 1 <= n < k");
    const RationalFn low = build_kernel_family(k).psi.pieces()[0];
    const RationalFn d = (low * RationalFn::monomial(Rational(1), n)).derivative(2 * n + 1);
    const RationalFn w = d * RationalFn::monomial(Rational(1), n + 1);
    return n % 2 ? -w : w;
}

struct IdentityPoint {
    std::string identity;
    int k = 0;
    int n = 0;
    double x = 0;
    double lhs = 0;
    double rhs = 0;
    double residual = 0;
};

/// 1/(1+x) = (2n+1) int Phi_n(x,t) t^n (1+t)^{-2n-2} dt.
inline IdentityPoint curious_formula_point(int n, double x, const QuadOptions& o = {}) {
    auto f = [&](double t) { return eval_Phi(n, x, t) * std::pow(t / (1 + t), n) / std::pow(1 + t, n + 2); };
    const auto r = integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {x, 1.0}, o);
    IdentityPoint p{"curious", 0, n, x, 1 / (1 + x), (2 * n + 1) * r.value, 0};
    p.residual = std::abs(p.lhs - p.rhs);
    return p;
}

/// Phi_k(x,1) = (2k-1) int Phi_{k-1}(x,t) t^{-1} min(t^k, t^{-k}) dt.
inline IdentityPoint kernel_recursion_point(int k, double x, const QuadOptions& o = {}) {
    if (k < 2) throw std::domain_error("kernel recursion needs k >= 2");
    auto f = [&](double t) { return eval_Phi(k - 1, x, t) * (t < 1 ? std::pow(t, k - 1) : std::pow(t, -k - 1)); };
    const auto r = integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {x, 1.0}, o);
    IdentityPoint p{"recursion", k, k - 1, x, eval_Phi(k, x, 1.0), (2 * k - 1) * r.value, 0};
    p.residual = std::abs(p.lhs - p.rhs);
    return p;
}

/// Phi_k(x,1) = ((2n)!)^{-1} int Phi_n(x,t) t^{-1} f_{n,k}(min(t, 1/t)) dt.
inline IdentityPoint general_recursion_point(int k, int n, double x, const QuadOptions& o = {}) {
    const RationalFn w = recursion_weight(n, k);
    const double scale = to_real<double>(Rational(Rational(1) / Rational(factorial(2 * n))));
    auto f = [&](double t) {
        const double u = t < 1 ? t : 1 / t;
        return eval_Phi(n, x, t) * w.eval(u) / t;
    };
    const auto r = integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {x, 1.0}, o);
    IdentityPoint p{"general-recursion", k, n, x, eval_Phi(k, x, 1.0), scale * r.value, 0};
    p.residual = std::abs(p.lhs - p.rhs);
    return p;
}

inline std::vector<IdentityPoint> recursion_check(int k, int n, const std::vector<double>& xs, const QuadOptions& o = {}) {
    std::vector<IdentityPoint> out;
    for (double x : xs) {
        out.push_back(curious_formula_point(n, x, o));
        if (k >= 2) out.push_back(kernel_recursion_point(k, x, o));
        if (n >= 1 && n < k) out.push_back(general_recursion_point(k, n, x, o));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Levy measures nu_k(dx) = x^{-1} psi_k(1/x) dx.

namespace detail {

/// Exact integral of a Laurent polynomial over (lo, hi) (hi = nullopt: +inf).
inline Rational laurent_integral(const RationalFn& r, const Rational& lo, const std::optional<Rational>& hi) {
    const QPoly& den = r.den();
    const int m = den.degree();
    for (int i = 0; i < m; ++i)
        if (den.coeff(i) != 0) throw std::domain_error("laurent_integral needs a monomial denominator");
    const Rational dc = den.leading();
    Rational total(0);
    for (int i = 0; i <= r.num().degree(); ++i) {
        const Rational c = r.num().coeff(i) / dc;
        if (c == 0) continue;
        const int e = i - m;  // c x^e
        if (e == -1) throw std::domain_error("logarithmic term in Laurent integral");
        if (lo == 0 && e < -1) throw std::domain_error("divergent at 0");
        if (!hi && e > -1) throw std::domain_error("divergent at infinity");
        auto prim = [&](const Rational& x) {
            Rational xp(1);
            for (int j = 0; j < std::abs(e + 1); ++j) xp *= x;
            if (e + 1 < 0) xp = 1 / xp;
            return Rational(c * xp / Rational(e + 1));
        };
        const Rational upper = hi ? prim(*hi) : Rational(0);
        const Rational lower = lo == 0 ? Rational(0) : prim(lo);
        total += upper - lower;
    }
    return total;
}

}  // namespace detail

struct LevySpec {
    int k = 1;
    PiecewiseRationalFn density;      // x^{-1} psi_k(1/x)
    Rational min_one_x_integral;      // int (1 ^ x) nu_k(dx)
    PiecewiseRationalFn psi_inverse;  // psi_k(1/x)
};

inline LevySpec levy_objects(int k) {
    if (k < 1) throw std::domain_error("levy_objects needs k >= 1");
    const KernelFamily& fam = build_kernel_family(k);
    const RationalFn inv = RationalFn::monomial(Rational(1), -1);
    // psi_k(1/x): the piece of psi_k above 1 serves x < 1 and vice versa.
    const RationalFn below = fam.psi.pieces()[1].compose(inv);
    const RationalFn above = fam.psi.pieces()[0].compose(inv);
    LevySpec s;
    s.k = k;
    s.psi_inverse = PiecewiseRationalFn({Rational(1)}, {below, above});
    s.density = PiecewiseRationalFn({Rational(1)}, {below * inv, above * inv});
    s.min_one_x_integral = detail::laurent_integral(below, Rational(0), Rational(1)) +
                           detail::laurent_integral(above * inv, Rational(1), std::nullopt);
    return s;
}

/// phi_k'(lambda) = int e^{-lambda x} psi_k(1/x) dx.
inline QuadResult<double> levy_exponent_derivative_direct(int k, double lambda, const QuadOptions& o = {}) {
    if (!(lambda > 0)) throw std::domain_error("lambda must be positive");
    const KernelFamily& fam = build_kernel_family(k);
    auto f = [&](double x) { return std::exp(-lambda * x) * psi_value(fam, 1 / x); };
    return integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {1.0}, o);
}

/// phi_k'(lambda) = int Phi_k(lambda, t) e^{-t} dt.
inline QuadResult<double> levy_exponent_derivative_dual(int k, double lambda, const QuadOptions& o = {}) {
    if (!(lambda > 0)) throw std::domain_error("lambda must be positive");
    auto f = [&](double t) { return eval_Phi(k, lambda, t) * std::exp(-t); };
    return integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {lambda}, o);
}

/// phi_k(lambda) = int (1 - e^{-lambda x}) nu_k(dx).
inline QuadResult<double> levy_exponent(int k, double lambda, const QuadOptions& o = {}) {
    if (!(lambda > 0)) throw std::domain_error("lambda must be positive");
    const KernelFamily& fam = build_kernel_family(k);
    auto f = [&](double x) { return -std::expm1(-lambda * x) * psi_value(fam, 1 / x) / x; };
    return integrate_segments<double>(f, 0.0, std::numeric_limits<double>::infinity(), {1.0}, o);
}

/// Largest increase of psi_k(1/x) between consecutive grid points (<= 0 when non-increasing).
inline double levy_monotonicity_defect(int k, const GridConfig& grid = {}) {
    const KernelFamily& fam = build_kernel_family(k);
    const auto xs = grid.nodes();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xs.size(); ++i)
        worst = std::max(worst, static_cast<double>(psi_value(fam, HighReal(1 / xs[i])) - psi_value(fam, HighReal(1 / xs[i - 1]))));
    return worst;
}

// ---------------------------------------------------------------------------
// Laplace representation of f_a.

struct LaplacePoint {
    double lambda = 0;
    double direct = 0;  // f_a(lambda)
    double laplace = 0; // (1/sin(pi a)) int e^{-lambda x} e^{-cos(pi a) x} sin(sin(pi a) x) dx
    double residual = 0;
    double quad_error = 0;
};

struct LaplaceCheck {
    Rational alpha;
    std::vector<LaplacePoint> points;
    bool integrand_changes_sign = false;  // the inverse Laplace density is not nonnegative
    std::optional<int> power_regular_order;  // largest k with 2 a k <= 1
};

inline LaplaceCheck cauchy_laplace_identity(const Rational& alpha, const std::vector<double>& lambdas, const QuadOptions& o = {}) {
    if (!(alpha > 0 && alpha < Rational(1) / 2)) throw std::domain_error("alpha must lie in (0, 1/2)");
    const double a = to_real<double>(alpha);
    const double c = std::cos(M_PI * a), s = std::sin(M_PI * a);
    LaplaceCheck out;
    out.alpha = alpha;
    for (double lam : lambdas) {
        if (!(lam >= 0)) throw std::domain_error("lambda must be >= 0");
        auto f = [&](double x) { return std::exp(-(lam + c) * x) * std::sin(s * x); };
        const auto r = integrate_between_zeros<double>(f, [&](int j) { return j * M_PI / s; }, o);
        LaplacePoint p;
        p.lambda = lam;
        p.direct = 1 / (1 + 2 * c * lam + lam * lam);
        p.laplace = r.value / s;
        p.residual = std::abs(p.direct - p.laplace);
        p.quad_error = r.error / s;
        out.points.push_back(p);
    }
    // sin(s x) < 0 on (pi/s, 2 pi/s) while the exponential factor stays positive.
    out.integrand_changes_sign = std::sin(s * 1.5 * M_PI / s) < 0;
    const Rational kmax = Rational(1) / (2 * alpha);
    const BigInt kfloor = kmax.get_num() / kmax.get_den();
    const long k = kfloor.get_si();
    if (k >= 1) out.power_regular_order = static_cast<int>(k);
    return out;
}

}  // namespace stieltjesk
