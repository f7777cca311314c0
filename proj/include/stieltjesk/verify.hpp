#pragma once

// Identity suite behind `stieltjesk verify`. Every suite returns one row per
// checked case with its residual and the tolerance it is held to; exact
// suites use residual 0 (equal) or 1 (different) against tolerance 0.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stieltjesk/hyperbolic.hpp"
#include "stieltjesk/kernels.hpp"
#include "stieltjesk/showcase.hpp"
#include "stieltjesk/stieltjes.hpp"

namespace stieltjesk {

struct VerifyOptions {
    int n_max = 5;       // operator identities: n = 1..n_max
    int trials = 10;     // random cases per parameter
    std::uint64_t seed = 7;
    int k_max = 20;      // kernel exactness: k = 1..k_max
    QuadOptions quad{};
};

struct VerifyRow {
    std::string label;
    double residual = 0;
    double tolerance = 0;
    bool passed() const { return std::isfinite(residual) && residual <= tolerance; }
};

struct VerifyResult {
    std::string name;
    std::string identity;  // one-line statement for output headers
    std::vector<VerifyRow> rows;
    std::string error;     // set when the suite threw

    bool passed() const {
        if (!error.empty()) return false;
        for (const auto& r : rows)
            if (!r.passed()) return false;
        return true;
    }
    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.passed() ? 0 : 1;
        return n;
    }
    double max_residual() const {
        double m = 0;
        for (const auto& r : rows) m = std::max(m, std::isfinite(r.residual) ? r.residual : INFINITY);
        return m;
    }
};

namespace detail {

inline VerifyRow exact_row(std::string label, bool equal) { return {std::move(label), equal ? 0.0 : 1.0, 0.0}; }

inline Rational random_small_rational(std::mt19937_64& rng, int max_num, int max_den) {
    std::uniform_int_distribution<int> n(-max_num, max_num), d(1, max_den);
    return make_rational(n(rng), d(rng));
}

inline QPoly random_qpoly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    const int d = deg(rng);
    std::vector<Rational> c;
    for (int i = 0; i <= d; ++i) c.push_back(random_small_rational(rng, 9, 5));
    return QPoly(c);
}

inline RationalFn random_rational_function(std::mt19937_64& rng, int max_degree) {
    QPoly den;
    while (den.is_zero()) den = random_qpoly(rng, max_degree);
    return RationalFn(random_qpoly(rng, max_degree), den);
}

/// Polynomial density of degree <= 3 on [1, 2], nonnegative there, plus an atom at 0.
inline MeasureSpec random_polynomial_measure(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(0, 6), deg(0, 3), mass(1, 9);
    const int d = deg(rng);
    std::vector<Rational> c;
    // Nonnegative coefficients in (t - 1) keep the density nonnegative on [1, 2].
    for (int i = 0; i <= d; ++i) c.push_back(make_rational(coef(rng), 1 + coef(rng)));
    if (c.back() == 0) c.back() = 1;
    const RationalFn shifted = RationalFn(QPoly(c)).compose(RationalFn(QPoly{Rational(-1), Rational(1)}));
    MeasureSpec mu;
    mu.atoms.push_back({Rational(0), make_rational(mass(rng), 4)});
    mu.pieces.push_back({Rational(1), Rational(2), model::rat(shifted)});
    return mu;
}

inline double relative(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace detail

inline VerifyResult verify_kernel_exact(const VerifyOptions& o = {}) {
    VerifyResult r{"kernel-exact",
                   "P_k(0) = binom(2k,k), P_k(1) = binom(2k,k)/2, psi_k smooth through order 2k-1 at 1, "
                   "jump of order 2k at x=t equals (2k)! t^-k",
                   {},
                   {}};
    for (int k = 1; k <= o.k_max; ++k) {
        const KernelFamily& fam = build_kernel_family(k);
        const Rational c(fam.central_binomial());
        const std::string K = "k=" + std::to_string(k);
        r.rows.push_back(detail::exact_row(K + " P(0)", fam.P(Rational(0)) == c));
        r.rows.push_back(detail::exact_row(K + " P(1)", fam.P(Rational(1)) == c / 2));
        bool smooth = true;
        for (int i = 0; i <= 2 * k - 1; ++i)
            smooth = smooth && fam.psi.pieces()[0].derivative(i)(Rational(1)) == fam.psi.pieces()[1].derivative(i)(Rational(1));
        r.rows.push_back(detail::exact_row(K + " one-sided derivatives", smooth));
        for (const Rational& t : {make_rational(1, 2), Rational(1), Rational(3)})
            r.rows.push_back(detail::exact_row(K + " jump t=" + to_string(t),
                                               dirac_jump(k, t).mass == Rational(factorial(2 * k)) * rpow(t, -k)));
    }
    return r;
}

inline VerifyResult verify_lemma_form(const VerifyOptions& o = {}) {
    VerifyResult r{"lemma-form",
                   "x^n (x^{n-1} h)^{(2n-1)} = (x^{2n-1} h^{(n)})^{(n-1)} and equals its value for -h(1/x) at 1/x",
                   {},
                   {}};
    std::mt19937_64 rng(o.seed);
    for (int n = 1; n <= o.n_max; ++n)
        for (int trial = 0; trial < o.trials; ++trial) {
            const RationalFn h = detail::random_rational_function(rng, 3);
            const RationalFn lhs = theta_operator(h, n);
            const RationalFn rhs = (RationalFn::monomial(Rational(1), 2 * n - 1) * h.derivative(n)).derivative(n - 1);
            const std::string L = "n=" + std::to_string(n) + " h=" + h.str();
            r.rows.push_back(detail::exact_row(L + " derivative form", lhs == rhs));
            r.rows.push_back(detail::exact_row(L + " reflection", lhs == theta_operator(h.hat(), n).reciprocal_argument()));
        }
    return r;
}

inline VerifyResult verify_widder(const VerifyOptions& = {}) {
    VerifyResult r{"widder",
                   "(-1)^i W_{n,k}^{(i)}(0)/((2n-1)! i!) = binom(2k,k-n-i) binom(2n+i-1,2n-1), "
                   "W_{n,k} = (-1)^{n-1}(x^{n-1}psi_k)^{(2n-1)}",
                   {},
                   {}};
    for (int k = 1; k <= 6; ++k)
        for (int n = 1; n <= k; ++n) {
            const PiecewiseRationalFn w = widder_function(n, k);
            const RationalFn& low = w.pieces()[0];
            bool ok = true;
            for (int i = 0; i <= low.num().degree() + 1; ++i) {
                const Rational at0 = low.derivative(i)(Rational(0)) * Rational(i % 2 ? -1 : 1) /
                                     Rational(factorial(2 * n - 1) * factorial(i));
                ok = ok && at0 == Rational(binomial(2 * k, k - n - i) * binomial(2 * n + i - 1, 2 * n - 1));
            }
            r.rows.push_back(detail::exact_row("k=" + std::to_string(k) + " n=" + std::to_string(n), ok));
        }
    return r;
}

inline VerifyResult verify_roundtrip(const VerifyOptions& o = {}) {
    VerifyResult r{"roundtrip", "invert(transform(drift, atom at 0, polynomial density on [1,2])) recovers all three", {}, {}};
    std::mt19937_64 rng(o.seed + 1);
    for (int k = 2; k <= 4; ++k)
        for (int trial = 0; trial < o.trials; ++trial) {
            const MeasureSpec mu = detail::random_polynomial_measure(rng);
            const Rational drift = make_rational(static_cast<long>(rng() % 7), 3);
            r.rows.push_back(detail::exact_row("k=" + std::to_string(k) + " trial=" + std::to_string(trial),
                                               roundtrip_check(k, drift, mu).all()));
        }
    const auto inv = invert(model::rat(RationalFn(QPoly{Rational(1)}, QPoly{Rational(1), Rational(1)})), 2);
    const RationalFn want(QPoly{Rational(0), Rational(3)}, QPoly{Rational(1), Rational(1)}.pow(4));
    r.rows.push_back(detail::exact_row("1/(1+x) k=2 density 3t/(1+t)^4", model::is_rat(inv.density) && inv.density->rat == want));
    return r;
}

inline VerifyResult verify_delta_closed(const VerifyOptions& = {}) {
    VerifyResult r{"delta-closed",
                   "k-th w-derivative of Delta_{k,u} = (-1)^k (2k)! (w-u-1/u)^k / (k! (w^2-4)^{k+1/2}) at rational v",
                   {},
                   {}};
    for (int k = 1; k <= 5; ++k)
        for (const Rational& u : {Rational(1), make_rational(3, 2), Rational(2), Rational(3)}) {
            const DeltaKU d = build_delta(k, u);
            for (const Rational& v : {Rational(2), Rational(3), make_rational(5, 2)})
                r.rows.push_back(detail::exact_row("k=" + std::to_string(k) + " u=" + to_string(u) + " v=" + to_string(v),
                                                   delta_kth_derivative_exact(d, v) == delta_kth_derivative_closed_at_v(k, u, v)));
        }
    return r;
}

inline VerifyResult verify_taylor(const VerifyOptions& = {}) {
    VerifyResult r{"taylor",
                   "Delta_u(f)^{(j)}(2) = j!/(2j+1)! (u^{2j+1} psi_f^{(j+1)})^{(j)}(u), against the v-chart value at v = 1 + 2^-40",
                   {},
                   {}};
    const RationalFn x = RationalFn::x();
    const std::vector<std::pair<std::string, RationalFn>> psis = {
        {"x", x}, {"x^2", x * x}, {"x^3", x * x * x}, {"x/(1+x)", x / (x + RationalFn(Rational(1)))}};
    const Rational v = Rational(1) + Rational(1) / Rational(BigInt(1) << 40);
    for (const auto& [name, psi] : psis)
        for (const Rational& u : {Rational(1), make_rational(3, 2), Rational(3)}) {
            const std::vector<Rational> want = taylor_at_2(psi, u, 3);
            HyperbolicFn d = delta_of_rational_psi(psi, u);
            for (int j = 0; j <= 3; ++j) {
                const Rational got = d.at_v(v);
                const double res = detail::relative(to_real<double>(got), to_real<double>(want[static_cast<std::size_t>(j)]));
                r.rows.push_back({"psi=" + name + " u=" + to_string(u) + " j=" + std::to_string(j), res, 1e-9});
                d = d.d_dw();
            }
        }
    return r;
}

inline VerifyResult verify_kernel_limit(const VerifyOptions& = {}) {
    VerifyResult r{"kernel-limit", "|Phi_k(x,t)/binom(2k,k) - 1/(x+t)| decreases along k = 5, 10, 20, 40", {}, {}};
    for (const auto& [x, t] : {std::pair{Rational(1), Rational(1)}, std::pair{Rational(2), make_rational(1, 2)}}) {
        double prev = INFINITY;
        for (int k : {5, 10, 20, 40}) {
            const double err = std::abs(to_real<double>(Rational(kernel_limit_check(k, x, t) - 1 / (x + t))));
            // residual > 0 iff the error failed to decrease
            r.rows.push_back({"x=" + to_string(x) + " t=" + to_string(t) + " k=" + std::to_string(k),
                              err < prev ? 0.0 : err - prev, 0.0});
            prev = err;
        }
    }
    return r;
}

inline VerifyResult verify_gig(const VerifyOptions& o = {}) {
    VerifyResult r{"gig", "int Phi_{k-1}(x,t) c_k(a) t^{a-1} dt = a x^{a-1}; product ratio within 3% of 1 at k=10, a=1/2", {}, {}};
    for (int k : {2, 3, 5})
        for (const Rational& a : {make_rational(1, 4), make_rational(1, 2), make_rational(3, 4)})
            for (const auto& p : gig_identity_check(k, a, {0.5, 1.0, 4.0}, o.quad))
                r.rows.push_back({"k=" + std::to_string(k) + " a=" + to_string(a) + " x=" + std::to_string(p.x), p.residual, 1e-8});
    r.rows.push_back({"ratio k=10 a=1/2", std::abs(gig_product_ratio(10, make_rational(1, 2)) - 1), 0.03});
    for (const Rational& a : {make_rational(1, 4), make_rational(3, 4)}) {
        // residual > 0 iff the ratio moved away from 1 between k = 10 and 20
        const double e10 = std::abs(gig_product_ratio(10, a) - 1), e20 = std::abs(gig_product_ratio(20, a) - 1);
        r.rows.push_back({"ratio k=10..20 a=" + to_string(a), e20 < e10 ? 0.0 : e20 - e10, 0.0});
    }
    return r;
}

inline VerifyResult verify_recursion(const VerifyOptions& o = {}) {
    VerifyResult r{"recursion",
                   "1/(1+x) = (2n+1) int Phi_n(x,t) t^n/(1+t)^{2n+2} dt; Phi_k(x,1) = (2k-1) int Phi_{k-1}(x,t) t^-1 min(t^k,t^-k) dt",
                   {},
                   {}};
    for (int n = 1; n <= 4; ++n)
        for (double x : {0.5, 1.0, 3.0}) {
            const auto p = curious_formula_point(n, x, o.quad);
            r.rows.push_back({"curious n=" + std::to_string(n) + " x=" + std::to_string(x), p.residual, 1e-9});
        }
    for (int k = 2; k <= 4; ++k)
        for (double x : {0.5, 1.0, 3.0}) {
            const auto p = kernel_recursion_point(k, x, o.quad);
            r.rows.push_back({"kernel k=" + std::to_string(k) + " x=" + std::to_string(x), p.residual, 1e-9});
        }
    for (int k = 3; k <= 5; ++k)
        for (int n = 1; n < k - 1; ++n)
            for (const auto& p : recursion_check(k, n, {0.5, 1.0, 3.0}, o.quad))
                r.rows.push_back({p.identity + " k=" + std::to_string(k) + " n=" + std::to_string(n) + " x=" + std::to_string(p.x),
                                  p.residual, 1e-9});
    return r;
}

inline VerifyResult verify_levy(const VerifyOptions& o = {}) {
    VerifyResult r{"levy",
                   "int (1 ^ x) nu_1(dx) = 5/2; int e^{-lx} psi_k(1/x) dx = int Phi_k(l,t) e^{-t} dt; psi_k(1/x) non-increasing",
                   {},
                   {}};
    r.rows.push_back(detail::exact_row("k=1 int (1^x) nu", levy_objects(1).min_one_x_integral == make_rational(5, 2)));
    for (int k = 1; k <= 3; ++k)
        for (double lam : {0.5, 1.0, 2.0}) {
            const double a = levy_exponent_derivative_direct(k, lam, o.quad).value;
            const double b = levy_exponent_derivative_dual(k, lam, o.quad).value;
            r.rows.push_back({"k=" + std::to_string(k) + " lambda=" + std::to_string(lam), std::abs(a - b), 1e-9});
        }
    for (int k = 1; k <= 6; ++k)
        r.rows.push_back({"monotone k=" + std::to_string(k), std::max(0.0, levy_monotonicity_defect(k)), 0.0});
    return r;
}

inline VerifyResult verify_laplace(const VerifyOptions& o = {}) {
    VerifyResult r{"laplace",
                   "1/(1+2cos(pi a)l+l^2) = (1/sin(pi a)) int e^{-lx} e^{-cos(pi a)x} sin(sin(pi a)x) dx",
                   {},
                   {}};
    for (const Rational& a : {make_rational(1, 8), make_rational(1, 4)})
        for (const auto& p : cauchy_laplace_identity(a, {0.0, 0.5, 1.0, 2.0}, o.quad).points)
            r.rows.push_back({"a=" + to_string(a) + " lambda=" + std::to_string(p.lambda), p.residual, 1e-8});
    return r;
}

inline VerifyResult verify_hypergeometric(const VerifyOptions& = {}) {
    VerifyResult r{"hypergeometric", "Delta_{k,1} closed, 2F1 and Euler forms agree with the exact v-field; appendix sum matches Delta_{k,u}", {}, {}};
    for (int k = 1; k <= 4; ++k) {
        const DeltaKU d = build_delta(k, Rational(1));
        for (double w : {2.5, 3.0, 5.0, 10.0, 40.0}) {
            const double ref = d.at_w(w);
            const std::string L = "k=" + std::to_string(k) + " w=" + std::to_string(w);
            r.rows.push_back({L + " 2F1", detail::relative(delta_k1_hypergeometric(k, w), ref), 1e-12});
            r.rows.push_back({L + " euler", detail::relative(delta_k1_euler(k, w), ref), 1e-12});
        }
        for (const Rational& u : {make_rational(3, 2), Rational(2), make_rational(1, 3)}) {
            const double lo = to_real<double>(u + 1 / u);
            for (double dw : {0.0, 0.5, 4.0})
                r.rows.push_back({"appendix k=" + std::to_string(k) + " u=" + to_string(u) + " w=" + std::to_string(lo + dw),
                                  appendix_sum_check(k, u, lo + dw), 1e-10});
        }
    }
    return r;
}

inline VerifyResult verify_cauchy_density(const VerifyOptions& = {}) {
    VerifyResult r{"cauchy-density", "closed density of -(log f_a)' equals the inversion output, cos(pi a) rational", {}, {}};
    for (const Rational& c : {make_rational(1, 2), make_rational(3, 5), make_rational(9, 10)}) {
        const CauchyFamily fam = cauchy_family_from_cos(Coef(c));
        for (int k = 2; k <= 3; ++k) {
            InvertOptions io;
            io.throw_on_negative = false;
            const auto inv = invert(fam.g, k, io);
            r.rows.push_back(detail::exact_row("cos=" + to_string(c) + " k=" + std::to_string(k),
                                               model::is_rat(inv.density) && inv.density->rat == cauchy_density_exact(fam, k)));
        }
    }
    return r;
}

struct VerifySuite {
    std::string name;
    std::function<VerifyResult(const VerifyOptions&)> run;
};

inline const std::vector<VerifySuite>& verify_suites() {
    static const std::vector<VerifySuite> suites = {
        {"kernel-exact", verify_kernel_exact}, {"lemma-form", verify_lemma_form},
        {"widder", verify_widder},             {"roundtrip", verify_roundtrip},
        {"delta-closed", verify_delta_closed}, {"taylor", verify_taylor},
        {"kernel-limit", verify_kernel_limit}, {"gig", verify_gig},
        {"recursion", verify_recursion},       {"levy", verify_levy},
        {"laplace", verify_laplace},           {"hypergeometric", verify_hypergeometric},
        {"cauchy-density", verify_cauchy_density},
    };
    return suites;
}

/// Runs one suite, turning exceptions into a failed result.
inline VerifyResult run_verify(const VerifySuite& s, const VerifyOptions& o) {
    try {
        VerifyResult r = s.run(o);
        r.name = s.name;
        return r;
    } catch (const std::exception& e) {
        VerifyResult r;
        r.name = s.name;
        r.error = e.what();
        return r;
    }
}

}  // namespace stieltjesk
