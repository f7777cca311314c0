#include <gtest/gtest.h>

#include <random>

#include "stieltjesk/hyperbolic_fn.hpp"
#include "stieltjesk/piecewise.hpp"
#include "stieltjesk/ratfn.hpp"
#include "test_support.hpp"

using namespace stieltjesk;

namespace {

QPoly P(std::initializer_list<long> c) {
    std::vector<Rational> v;
    for (long x : c) v.push_back(Rational(x));
    return QPoly(v);
}

}  // namespace

TEST(Scalar, CanonicalAndParse) {
    EXPECT_EQ(make_rational(3, 6), Rational(1, 2));
    EXPECT_EQ(make_rational(3, -6).get_den(), 2);
    EXPECT_THROW(make_rational(1, 0), std::domain_error);
    EXPECT_EQ(parse_rational("1.25"), make_rational(5, 4));
    EXPECT_EQ(parse_rational("-3e-2"), make_rational(-3, 100));
    EXPECT_EQ(parse_rational(" 7/21 "), make_rational(1, 3));
    EXPECT_EQ(parse_rational("2.5e1"), Rational(25));
    EXPECT_THROW(parse_rational("1..2"), std::invalid_argument);
    EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
    EXPECT_EQ(binomial(40, 20), BigInt("137846528820"));
    EXPECT_EQ(binomial(3, 5), 0);
}

TEST(Scalar, ToRealKeepsPrecisionForHugeParts) {
    const Rational q = make_rational(binomial(400, 200), binomial(400, 200) * 3);
    EXPECT_DOUBLE_EQ(to_real<double>(q), 1.0 / 3.0);
    EXPECT_NEAR(static_cast<double>(to_real<HighReal>(make_rational(1, 7)) * 7 - 1), 0.0, 1e-30);
}

TEST(Poly, DerivativeExamples) {
    EXPECT_EQ(P({2, -1}).derivative(1), P({-1}));
    EXPECT_EQ(P({0, 0, 1}).derivative(2), P({2}));
    EXPECT_TRUE(P({6, -4, 1}).derivative(3).is_zero());
    EXPECT_EQ(P({6, -4, 1}).derivative(0), P({6, -4, 1}));
}

TEST(Poly, DivisionGcdAndRoots) {
    const QPoly a = P({-1, 0, 1});  // (x-1)(x+1)
    const QPoly b = P({-1, 1});
    auto [q, r] = divmod(a, b);
    EXPECT_EQ(q, P({1, 1}));
    EXPECT_TRUE(r.is_zero());
    EXPECT_EQ(gcd(a * P({2, 1}), b * P({2, 1})), P({-2, 1, 1}));
    // (x-1)(x-2)(x-3)
    const QPoly c = P({-1, 1}) * P({-2, 1}) * P({-3, 1});
    EXPECT_EQ(count_roots_open(c, Rational(0), Rational(0), true), 3);
    EXPECT_EQ(count_roots_open(c, Rational(0), Rational(2)), 1);
    EXPECT_EQ(count_roots_open(c, Rational(1), Rational(3)), 1);
    EXPECT_EQ(count_roots_open(P({1, 0, 1}), Rational(-10), Rational(10)), 0);
    EXPECT_EQ(format_poly(P({6, -4, 1})), "x^2-4*x+6");
}

TEST(RationalFn, DerivativeExamples) {
    const RationalFn r(P({0, 1}), P({1, 1}));
    EXPECT_EQ(r.derivative(1), RationalFn(P({1}), P({1, 1}).pow(2)));
    EXPECT_EQ(r.derivative(2), RationalFn(P({-2}), P({1, 1}).pow(3)));
    const RationalFn s(P({1}), P({1, 0, 1}));
    EXPECT_EQ(s.derivative(1), RationalFn(P({0, -2}), P({1, 0, 1}).pow(2)));
}

TEST(RationalFn, HatTransformExamples) {
    EXPECT_EQ(RationalFn::x().hat(), RationalFn(P({-1}), P({0, 1})));
    EXPECT_EQ(RationalFn(P({1}), P({1, 1})).hat(), RationalFn(P({0, -1}), P({1, 1})));
    EXPECT_EQ(RationalFn(Rational(7, 3)).hat(), RationalFn(Rational(-7, 3)));
}

TEST(RationalFn, NormalFormAndLimits) {
    const RationalFn r(P({-2, 2}), P({-3, 3}));
    EXPECT_TRUE(r.is_constant());
    EXPECT_EQ(r.constant_value(), Rational(2, 3));
    const RationalFn g(P({0, 1}), P({1, 1}));
    EXPECT_EQ(*g.limit_at_zero(), 0);
    EXPECT_EQ(*g.limit_at_infinity(), 1);
    EXPECT_FALSE(RationalFn(P({1}), P({0, 1})).limit_at_zero().has_value());
    EXPECT_THROW(g(Rational(-1)), std::domain_error);
    EXPECT_NEAR(g.eval(3.0), 0.75, 1e-15);
}

TEST(RationalFn, FieldAxiomsOnRandomTriples) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const RationalFn a = test_support::random_ratfn(rng, 3);
        const RationalFn b = test_support::random_ratfn(rng, 3);
        const RationalFn c = test_support::random_ratfn(rng, 3);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a - a, RationalFn());
        if (!b.is_zero()) {
            EXPECT_EQ((a / b) * b, a);
        }
        // Leibniz rule.
        EXPECT_EQ((a * b).derivative(), a.derivative() * b + a * b.derivative());
    }
}

TEST(RationalFn, ThetaOperatorIdentities) {
    std::mt19937_64 rng(2024);
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 6; ++trial) {
            const RationalFn h = test_support::random_ratfn(rng, 3);
            const RationalFn lhs = theta_operator(h, n);
            const RationalFn rhs =
                (RationalFn::monomial(Rational(1), 2 * n - 1) * h.derivative(n)).derivative(n - 1);
            EXPECT_EQ(lhs, rhs) << "n=" << n << " h=" << h.str();
            EXPECT_EQ(lhs, theta_operator(h.hat(), n).reciprocal_argument()) << "n=" << n << " h=" << h.str();
        }
    }
}

TEST(Piecewise, JumpBookkeeping) {
    // |x - 1| as a piecewise function.
    const PiecewiseRationalFn f({Rational(1)}, {RationalFn(P({1, -1})), RationalFn(P({-1, 1}))});
    EXPECT_TRUE(f.continuous());
    const auto d = f.derivative(2);
    ASSERT_EQ(d.jumps.size(), 2u);
    EXPECT_TRUE(d.jumps[0].empty());
    ASSERT_EQ(d.jumps[1].size(), 1u);
    EXPECT_EQ(d.jumps[1][0].location, 1);
    EXPECT_EQ(d.jumps[1][0].size, 2);
    EXPECT_TRUE(d.function.pieces()[0].is_zero());
    EXPECT_EQ(f(Rational(3)), 2);
    EXPECT_NEAR(f.eval(0.25), 0.75, 1e-15);
    const auto g = f.argument_divided_by(Rational(2));  // |x/2 - 1|
    EXPECT_EQ(g.breakpoints()[0], 2);
    EXPECT_EQ(g(Rational(6)), 2);
    const auto h = f * PiecewiseRationalFn(RationalFn(Rational(3)));
    EXPECT_EQ(h(Rational(0)), 3);
    EXPECT_THROW(PiecewiseRationalFn({Rational(1)}, {RationalFn(P({1}), P({-1, 1})), RationalFn()}),
                 std::domain_error);
}

TEST(Hyperbolic, DdwExamples) {
    const HyperbolicFn w = HyperbolicFn::from_w_poly(P({0, 1}));
    EXPECT_EQ(w.d_dw(), HyperbolicFn(RationalFn(Rational(1))));
    const HyperbolicFn w2 = HyperbolicFn::from_w_poly(P({0, 0, 1}));
    EXPECT_EQ(w2.d_dw(), HyperbolicFn(HyperbolicFn::w_in_v() * RationalFn(Rational(2))));
    const Rational u(3, 2);
    // psi_f = x^2: (u^2 v^2 - u^2 v^-2)/(v - v^-1) = u^2 w.
    const RationalFn v = RationalFn::x();
    const HyperbolicFn delta((RationalFn(u * u) * v * v - RationalFn(u * u) / (v * v)) /
                             (v - RationalFn(Rational(1)) / v));
    ASSERT_TRUE(delta.as_w_poly().has_value());
    EXPECT_EQ(*delta.as_w_poly(), QPoly({Rational(0), u * u}));
    EXPECT_EQ(delta.d_dw(), HyperbolicFn(RationalFn(u * u)));
}

TEST(Hyperbolic, DdwMatchesPolynomialDerivative) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-9, 9);
    for (int deg = 0; deg <= 10; ++deg) {
        std::vector<Rational> c;
        for (int i = 0; i <= deg; ++i) c.push_back(make_rational(coef(rng), 1 + (i % 3)));
        const QPoly p(c);
        const HyperbolicFn h = HyperbolicFn::from_w_poly(p);
        EXPECT_EQ(h.d_dw(), HyperbolicFn::from_w_poly(p.derivative()));
        auto back = h.as_w_poly();
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, p);
    }
    EXPECT_FALSE(HyperbolicFn(RationalFn::x()).as_w_poly().has_value());
    // Real evaluation at w = 5/2 (v = 2).
    const HyperbolicFn v_itself(RationalFn::x());
    EXPECT_NEAR(v_itself.at_w(2.5), 2.0, 1e-15);
}
