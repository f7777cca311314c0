#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stieltjesk/expr_parse.hpp"
#include "stieltjesk/hyperbolic.hpp"
#include "stieltjesk/kernels.hpp"
#include "stieltjesk/membership.hpp"

using namespace stieltjesk;

namespace {

Rational R(long p, long q = 1) { return make_rational(p, q); }

// 1/(1 + 2 cos(pi a) x + x^2); exact when the cosine is rational.
Model cauchy(const Rational& alpha) {
    const Coef c = cospi_coef(alpha);
    if (c.is_exact())
        return model::rat(RationalFn(QPoly{Rational(1)}, QPoly{Rational(1), Rational(2 * c.exact()), Rational(1)}));
    return model::scale(Coef(R(-1)), model::sum({model::rat(RationalFn(QPoly{R(1), R(0), R(1)})),
                                                  model::power(Coef::real(2 * c.value()), Coef(R(1)))}));
}

// Phi_k(., t) as a piecewise rational model.
Model kernel(int k, const Rational& t) {
    const RationalFn inv_x = RationalFn::monomial(R(1), -1);
    return model::piecewise(build_kernel_family(k).psi.argument_divided_by(t).map(
        [&](const RationalFn& p) { return p * inv_x; }));
}

// Coarser grids keep the float paths fast in unit tests.
GridConfig small_x() {
    GridConfig g;
    g.points = 400;
    return g;
}
HyperbolicGrid small_w() {
    HyperbolicGrid g;
    g.u_points = 9;
    g.w_points = 160;
    return g;
}

WFunction w_fn(std::function<HighReal(const HighReal&, int)> f, int max_order) {
    WFunction h;
    h.eval = std::move(f);
    h.max_order = max_order;
    return h;
}

}  // namespace

TEST(Grids, Defaults) {
    const GridConfig g;
    const auto xs = g.nodes();
    ASSERT_EQ(xs.size(), 2000u);
    EXPECT_DOUBLE_EQ(xs.front(), 1e-4);
    EXPECT_DOUBLE_EQ(xs.back(), 1e4);
    const HyperbolicGrid h;
    const auto us = h.u_nodes();
    ASSERT_EQ(us.size(), 25u);
    EXPECT_NEAR(us[12], 1.0, 1e-15);
    const auto ws = h.w_nodes();
    ASSERT_EQ(ws.size(), 400u);
    EXPECT_NEAR(ws.front(), 2 + 1e-4, 1e-15);
    EXPECT_DOUBLE_EQ(ws.back(), 50);
    for (std::size_t i = 1; i < ws.size(); ++i) EXPECT_LT(ws[i - 1], ws[i]);
    GridConfig bad;
    bad.x_min = 0;
    EXPECT_THROW(bad.nodes(), std::invalid_argument);
}

TEST(CheckSk, Examples) {
    const Model stieltjes = parse_model("rat(1;1+x)");
    for (int k = 1; k <= 5; ++k) {
        const auto r = check_Sk(stieltjes, k, small_x());
        EXPECT_EQ(r.verdict, Verdict::Pass) << k;
        EXPECT_EQ(r.method, "symbolic-exact");
    }
    // Phi_1(., 1): (x^3 f)'' jumps down at x = 1.
    const Model phi1 = kernel(1, R(1));
    EXPECT_EQ(check_Sk(phi1, 1, small_x()).verdict, Verdict::Pass);
    EXPECT_EQ(check_Sk(phi1, 2, small_x()).verdict, Verdict::Pass);
    const auto r3 = check_Sk(phi1, 3, small_x());
    EXPECT_EQ(r3.verdict, Verdict::Fail);
    EXPECT_DOUBLE_EQ(r3.location, 1.0);
    // Phi_k has its first jump at order 2k: it passes order k + 1 and fails k + 2.
    for (int k = 1; k <= 4; ++k) {
        EXPECT_EQ(check_Sk(kernel(k, R(2)), k, small_x()).verdict, Verdict::Pass) << k;
        EXPECT_EQ(check_Sk(kernel(k, R(2)), k + 1, small_x()).verdict, Verdict::Pass) << k;
        const auto r = check_Sk(kernel(k, R(2)), k + 2, small_x());
        EXPECT_EQ(r.verdict, Verdict::Fail) << k;
        EXPECT_DOUBLE_EQ(r.location, 2.0);
    }
    // Non-rational model: x^{-1/2} is a Stieltjes function; grid path.
    const Model root = model::power(Coef(R(1)), Coef(R(-1, 2)));
    for (int k = 1; k <= 4; ++k) {
        const auto r = check_Sk(root, k, small_x());
        EXPECT_EQ(r.verdict, Verdict::Pass) << k << " margin " << r.worst_margin;
        EXPECT_EQ(r.method, "grid-float");
    }
    // e^{-x}: (x f)' = (1 - x) e^{-x} changes sign.
    const auto e = check_Sk(parse_model("exp(rat(-x;1))"), 1, small_x());
    EXPECT_EQ(e.verdict, Verdict::Fail);
    EXPECT_GT(e.location, 1.0);
    EXPECT_THROW(check_Sk(stieltjes, 0), std::invalid_argument);
}

TEST(CheckMk, Examples) {
    const HyperbolicGrid g = small_w();
    // 1/w is completely monotone.
    const WFunction inv = w_fn(
        [](const HighReal& w, int j) {
            HighReal v = 1 / w;
            for (int i = 1; i <= j; ++i) v *= -i / w;
            return v;
        },
        6);
    EXPECT_EQ(check_Mk(inv, 3, g).verdict, Verdict::Pass);
    // w is increasing.
    const WFunction lin = w_fn([](const HighReal& w, int j) { return j == 0 ? w : HighReal(j == 1 ? 1 : 0); }, 6);
    EXPECT_EQ(check_Mk(lin, 1, g).verdict, Verdict::Fail);
    EXPECT_EQ(check_Mk(lin, 0, g).verdict, Verdict::Pass);
    // (6 - w)_+^2 is 3-monotone: h >= 0, -h' >= 0, h convex.
    const WFunction spline = w_fn(
        [](const HighReal& w, int j) {
            const HighReal d = w < 6 ? HighReal(6 - w) : HighReal(0);
            if (j == 0) return d * d;
            if (j == 1) return HighReal(-2 * d);
            return HighReal(w < 6 ? 2 : 0);
        },
        1);
    EXPECT_EQ(check_Mk(spline, 3, g).verdict, Verdict::Pass);
    // ... but not 4-monotone: the third difference picks up the kink.
    EXPECT_EQ(check_Mk(spline, 4, g).verdict, Verdict::Fail);
    // Exact v-chart certificate: 1/w = v/(v^2+1).
    const HyperbolicFn inv_exact(RationalFn(QPoly{R(0), R(1)}, QPoly{R(1), R(0), R(1)}));
    const auto ex = check_Mk(w_function(inv_exact, 4), 4, g);
    EXPECT_EQ(ex.verdict, Verdict::Pass);
    EXPECT_EQ(ex.method, "symbolic-exact");
    const HyperbolicFn lin_exact = HyperbolicFn::from_w_poly(QPoly::x());
    const auto lf = check_Mk(w_function(lin_exact, 2), 1, g);
    EXPECT_EQ(lf.verdict, Verdict::Fail);
    EXPECT_EQ(lf.method, "symbolic-exact");
}

TEST(CheckMk, BorderlineIsInconclusive) {
    // A dip of relative size 1e-8 sits between eps and 100 eps.
    const WFunction dip = w_fn([](const HighReal& w, int) { return HighReal(w < 10 ? 1 : -1e-8); }, 0);
    EXPECT_EQ(check_Mk(dip, 0, small_w()).verdict, Verdict::Inconclusive);
    const WFunction deep = w_fn([](const HighReal& w, int) { return HighReal(w < 10 ? 1 : -1e-3); }, 0);
    EXPECT_EQ(check_Mk(deep, 0, small_w()).verdict, Verdict::Fail);
}

TEST(CheckHMk, Examples) {
    const HyperbolicGrid g = small_w();
    EXPECT_EQ(check_HMk(cauchy(R(1, 3)), 2, g).verdict, Verdict::Pass);
    const auto f40 = check_HMk(cauchy(R(2, 5)), 2, g);
    EXPECT_EQ(f40.verdict, Verdict::Fail);
    ASSERT_TRUE(f40.u.has_value());
    // Irrational cosine: grid path.
    const auto f30 = check_HMk(cauchy(R(3, 10)), 2, g);
    EXPECT_EQ(f30.verdict, Verdict::Pass) << f30.worst_margin;
    EXPECT_EQ(f30.method, "grid-float");
    EXPECT_EQ(check_HMk(cauchy(R(9, 25)), 2, g).verdict, Verdict::Fail);
    // (t - x)_+^{k-1} with t = 4.
    for (int k = 1; k <= 3; ++k) {
        QPoly p = QPoly::constant(R(1));
        for (int i = 1; i < k; ++i) p = p * QPoly{R(4), R(-1)};
        const Model spline = model::piecewise(PiecewiseRationalFn({R(4)}, {RationalFn(p), RationalFn()}));
        EXPECT_EQ(check_HMk(spline, k, g).verdict, Verdict::Pass) << k;
    }
}

TEST(CheckHMkHat, Examples) {
    const GridConfig g = small_x();
    for (int k = 1; k <= 4; ++k) {
        const Rational edge = R(1, 2 * k);
        EXPECT_EQ(check_HMk_hat(cauchy(edge), k, g).verdict, Verdict::Pass) << k;
    }
    EXPECT_EQ(check_HMk_hat(cauchy(R(1, 2)), 2, g).verdict, Verdict::Fail);
    // Irrational cosine (grid path) on both sides of 1/4.
    EXPECT_EQ(check_HMk_hat(cauchy(R(6, 25)), 2, g).verdict, Verdict::Pass);
    EXPECT_EQ(check_HMk_hat(cauchy(R(13, 50)), 2, g).verdict, Verdict::Fail);
    // Generalized inverse Gaussian shape with alpha = 1/2.
    const Model gig = parse_model("prod(pow(3;-1/3);exp(sum(pow(-1;1/2);pow(-1;-1/2))))");
    for (int k = 1; k <= 4; ++k) {
        const auto r = check_HMk_hat(gig, k, g);
        EXPECT_EQ(r.verdict, Verdict::Pass) << k << " margin " << r.worst_margin;
    }
    // A zero of f.
    const Model spline = model::piecewise(PiecewiseRationalFn({R(4)}, {RationalFn(QPoly{R(4), R(-1)}), RationalFn()}));
    EXPECT_EQ(check_HMk_hat(spline, 2, g).verdict, Verdict::Fail);
    EXPECT_EQ(check_HMk_hat(spline, 1, g).verdict, Verdict::Inconclusive);
}

TEST(CheckDeltaRoute, Examples) {
    const HyperbolicGrid g = small_w();
    for (int k = 1; k <= 4; ++k) EXPECT_EQ(check_delta_route(parse_model("exp(rat(-x;1))"), k, g).verdict, Verdict::Pass);
    // psi = x^2: Delta = u^2 w.
    const Model gauss = parse_model("exp(rat(-1/2*x^2;1))");
    EXPECT_EQ(check_delta_route(gauss, 1, g).verdict, Verdict::Pass);
    const auto r = check_delta_route(gauss, 2, g);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_EQ(r.method, "symbolic-exact");
    EXPECT_EQ(check_delta_route(cauchy(R(1, 4)), 2, g).verdict, Verdict::Pass);
    EXPECT_EQ(check_delta_route(cauchy(R(1, 3)), 2, g).verdict, Verdict::Fail);
}

TEST(Membership, RoutesAgree) {
    const GridConfig gx = small_x();
    const HyperbolicGrid gw = small_w();
    std::vector<Model> examples{
        cauchy(R(0)),       cauchy(R(1, 6)),  cauchy(R(1, 4)),  cauchy(R(1, 3)),
        cauchy(R(1, 2)),    cauchy(R(1, 5)),  cauchy(R(3, 10)), parse_model("exp(rat(-x;1))"),
        parse_model("pow(1;-3/4)"), parse_model("exp(rat(-1/2*x^2;1))"),
        parse_model("prod(pow(3;-1/3);exp(sum(pow(-1;1/2);pow(-1;-1/2))))"),
    };
    for (std::size_t i = 0; i < examples.size(); ++i)
        for (int k = 1; k <= 3; ++k) {
            const Verdict a = check_HMk_hat(examples[i], k, gx).verdict;
            const Verdict b = check_delta_route(examples[i], k, gw).verdict;
            EXPECT_EQ(a, b) << "example " << i << " k " << k;
        }
}

TEST(Membership, Nesting) {
    const GridConfig gx = small_x();
    const HyperbolicGrid gw = small_w();
    const std::vector<Model> fs{cauchy(R(1, 5)), cauchy(R(1, 3)), cauchy(R(3, 10)), kernel(2, R(1)),
                                parse_model("rat(1;1+x)")};
    for (const Model& f : fs) {
        for (int k = 2; k <= 4; ++k) {
            if (check_Sk(f, k, gx).verdict == Verdict::Pass) {
                for (int j = 1; j < k; ++j) EXPECT_EQ(check_Sk(f, j, gx).verdict, Verdict::Pass);
            }
            if (check_HMk_hat(f, k, gx).verdict == Verdict::Pass) {
                for (int j = 1; j < k; ++j) EXPECT_EQ(check_HMk_hat(f, j, gx).verdict, Verdict::Pass);
            }
        }
        for (int k = 2; k <= 3; ++k)
            if (check_HMk(f, k, gw).verdict == Verdict::Pass) {
                EXPECT_EQ(check_HMk(f, k - 1, gw).verdict, Verdict::Pass);
            }
    }
}

TEST(Membership, ClosureUnderProductsAndInversion) {
    const GridConfig gx = small_x();
    const std::vector<Rational> alphas{R(0), R(1, 8), R(1, 6), R(1, 4), R(3, 10)};
    for (int k = 1; k <= 3; ++k) {
        for (const Rational& a : alphas)
            for (const Rational& b : alphas) {
                const Model f = cauchy(a), g = cauchy(b);
                if (check_HMk_hat(f, k, gx).verdict != Verdict::Pass || check_HMk_hat(g, k, gx).verdict != Verdict::Pass)
                    continue;
                EXPECT_EQ(check_HMk_hat(model::product({f, g}), k, gx).verdict, Verdict::Pass);
            }
        // f(1/x): f_alpha(1/x) = x^2 f_alpha(x), exp(-x) -> exp(-1/x).
        for (const Rational& a : alphas) {
            const Model f = cauchy(a);
            const Model flipped = model::product({model::rat(RationalFn::monomial(R(1), 2)), f});
            EXPECT_EQ(check_HMk_hat(f, k, gx).verdict, check_HMk_hat(flipped, k, gx).verdict) << k;
        }
        EXPECT_EQ(check_HMk_hat(parse_model("exp(rat(-x;1))"), k, gx).verdict,
                  check_HMk_hat(parse_model("exp(rat(-1;x))"), k, gx).verdict);
    }
}

namespace {

// Delta of a single-kernel psi: psi(x) = psi_m(x/t), so Delta_u = Delta_{m,u/t}.
WFunction delta_w(const DeltaKU& d, int max_order) {
    auto shared = std::make_shared<DeltaKU>(d);
    return w_fn([shared](const HighReal& w, int j) { return shared->at_w(w, j); }, max_order);
}

// (-1)^i Delta^{(i)}(2) >= 0 for i < k, from the low-region polynomial.
bool initial_signs_ok(const DeltaKU& d, int k) {
    QPoly p = *d.region_low;
    for (int i = 0; i < k; ++i) {
        const Rational v = p(R(2));
        if ((i % 2 ? Rational(-v) : v) < 0) return false;
        p = p.derivative();
    }
    return true;
}

}  // namespace

TEST(Membership, InitialDataDecideKernelDeltas) {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<int> kd(1, 4), num(1, 30), den(1, 10);
    HyperbolicGrid g = small_w();
    g.u_points = 1;
    int checked = 0;
    while (checked < 20) {
        const int k = kd(rng);
        const Rational u = make_rational(num(rng), den(rng)), t = make_rational(num(rng), den(rng));
        if (u == t) continue;
        const DeltaKU d = build_delta(k, Rational(u / t));
        const bool predicted = initial_signs_ok(d, k);
        const Verdict v = check_Mk(delta_w(d, k), k - 1, g).verdict;
        EXPECT_EQ(predicted ? Verdict::Pass : Verdict::Fail, v) << "k " << k << " u " << u << " t " << t;
        ++checked;
    }
}

TEST(Membership, InitialDataDoNotDecideHigherOrders) {
    // Delta_{1,2} is the constant 1/2 near w = 2, so every initial sign holds,
    // yet its derivative drops below zero past w = 5/2 and M_2 fails.
    const DeltaKU d = build_delta(1, R(2));
    EXPECT_TRUE(initial_signs_ok(d, 3));
    EXPECT_EQ(check_Mk(delta_w(d, 2), 2, small_w()).verdict, Verdict::Fail);
}
