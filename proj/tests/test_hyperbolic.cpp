#include <gtest/gtest.h>

#include <cmath>

#include "stieltjesk/hyperbolic.hpp"
#include "test_support.hpp"

using namespace stieltjesk;

namespace {

Rational R(long p, long q = 1) { return make_rational(p, q); }
const std::vector<Rational> kUs{R(1), R(3, 2), R(2), R(3), R(1, 3), R(2, 5)};

// Delta_{k,1} through x = 1/(2-w): x^{1-k}(sum_{n<k} binom(2n,n) x^n - (1-4x)^{-1/2}).
// Evaluated in 113-bit arithmetic: the bracket cancels heavily for large w.
double delta_k1_closed(int k, double w) {
    const HighReal x = 1 / (2 - HighReal(w));
    HighReal s = 0;
    for (int n = 0; n < k; ++n) s += to_real<HighReal>(Rational(binomial(2 * n, n))) * pow(x, n);
    return static_cast<double>(pow(x, 1 - k) * (s - 1 / sqrt(1 - 4 * x)));
}

}  // namespace

TEST(Delta, Examples) {
    const DeltaKU d11 = build_delta(1, R(1));
    EXPECT_FALSE(d11.region_low.has_value());
    EXPECT_NEAR(d11.at_w(6.0), 1 - std::sqrt(0.5), 1e-15);
    EXPECT_EQ(d11.at_v(R(2)), R(2, 3));  // 1 - sqrt((1/2)/(9/2))

    const DeltaKU d12 = build_delta(1, R(2));
    ASSERT_TRUE(d12.region_low.has_value());
    EXPECT_EQ(*d12.region_low, QPoly::constant(R(1, 2)));

    const DeltaKU d21 = build_delta(2, R(1));
    EXPECT_NEAR(1e8 * d21.at_w(1e8), 6.0, 1e-6);
}

TEST(Delta, RegionsMatchAndLowIsPolynomial) {
    for (int k = 1; k <= 6; ++k) {
        for (const Rational& u : kUs) {
            const DeltaKU d = build_delta(k, u);  // throws on mismatch
            if (u == 1) continue;
            ASSERT_TRUE(d.region_low.has_value());
            EXPECT_LE(d.region_low->degree(), k - 1);
            // Direct values of psi_k at u v and u/v in the low region.
            const Rational vb = u > 1 ? u : Rational(1 / u);
            const Rational v = (1 + vb) / 2;
            const KernelFamily& fam = build_kernel_family(k);
            const Rational direct = (fam.psi(u * v) - fam.psi(u / v)) / (v - 1 / v);
            EXPECT_EQ(d.at_v(v), direct);
        }
    }
}

TEST(Delta, ClosedKthDerivative) {
    // k = 1, u = 1: d/dw [1 - sqrt((w-2)/(w+2))] at w = 6.
    const double w = 6;
    const double symbolic = -0.5 / std::sqrt((w - 2) / (w + 2)) * 4 / ((w + 2) * (w + 2));
    EXPECT_NEAR(delta_kth_derivative_closed(1, 1.0, w), symbolic, 1e-16);
    for (int k = 1; k <= 5; ++k) {
        EXPECT_THROW(delta_kth_derivative_closed(k, 1.0, 2.0), std::domain_error);
        for (double u : {1.5, 2.0, 3.0, 0.25}) {
            EXPECT_EQ(delta_kth_derivative_closed(k, u, u + 1 / u), 0.0);
            for (double x : {0.1, 1.0, 7.0, 100.0}) {
                const double val = delta_kth_derivative_closed(k, u, u + 1 / u + x);
                EXPECT_GE((k % 2 ? -1 : 1) * val, 0.0);
            }
        }
        EXPECT_THROW(delta_kth_derivative_closed(k, 2.0, 2.4), std::domain_error);
    }
}

TEST(Delta, KthDerivativeExactEqualsClosedForm) {
    for (int k = 1; k <= 5; ++k)
        for (const Rational& u : {R(1), R(3, 2), R(2), R(3)}) {
            const DeltaKU d = build_delta(k, u);
            for (const Rational& v : {R(2), R(3), R(5, 2), R(7, 2), R(11)})
                EXPECT_EQ(delta_kth_derivative_exact(d, v), delta_kth_derivative_closed_at_v(k, u, v))
                    << k << " " << u << " " << v;
        }
}

TEST(Delta, VanishesAtInfinity) {
    for (int k = 1; k <= 4; ++k)
        for (const Rational& u : kUs) {
            const DeltaKU d = build_delta(k, u);
            // Delta itself decays like binom(2k,k)/w, so its 10 -> 1e6 ratio sits just above 1e-5.
            const double central = to_real<double>(Rational(binomial(2 * k, k)));
            EXPECT_NEAR(1e6 * d.at_w(1e6), central, 1e-5 * central) << k << " " << u;
            for (int j = 1; j <= k; ++j)
                EXPECT_LT(std::abs(d.at_w(1e6, j)), 1e-5 * std::abs(d.at_w(10.0, j))) << k << " " << u << " " << j;
        }
}

TEST(Delta, EndpointSignsAndKMonotonicity) {
    for (int k = 1; k <= 6; ++k)
        for (const Rational& u : kUs) {
            const DeltaKU d = build_delta(k, u);
            const Rational vb = u >= 1 ? u : Rational(1 / u);
            for (int j = 0; j <= k - 1; ++j) {
                if (vb > 1) {
                    EXPECT_GE((j % 2 ? -1 : 1) * d.at_v(vb, j), 0) << k << " " << u << " " << j;
                }
                // (-1)^j Delta^{(j)} >= 0 throughout (2, inf).
                for (const Rational& v : std::vector<Rational>{R(101, 100), Rational((1 + vb) / 2), Rational(vb + R(1, 7)), Rational(2 * vb), Rational(9 * vb)})
                    if (v > 1) {
                        EXPECT_GE((j % 2 ? -1 : 1) * d.at_v(v, j), 0) << k << " " << u << " " << j << " " << v;
                    }
            }
        }
}

TEST(Delta, CompletelyMonotoneAtUOne) {
    for (int k = 1; k <= 5; ++k) {
        const DeltaKU d = build_delta(k, R(1));
        for (int j = 0; j <= k + 2; ++j)
            for (int i = 1; i <= 60; ++i) {
                const Rational v = 1 + R(i * i, 40);
                EXPECT_GE((j % 2 ? -1 : 1) * d.at_v(v, j), 0) << k << " " << j << " " << v;
            }
    }
}

TEST(Taylor, Examples) {
    const RationalFn x = RationalFn::x();
    for (const Rational& u : {R(1, 2), R(1), R(3)}) {
        EXPECT_EQ(taylor_at_2(x, u, 0)[0], u);
        EXPECT_EQ(taylor_at_2(x * x, u, 1)[1], u * u);
        EXPECT_EQ(taylor_at_2(x * x, u, 1)[0], 2 * u * u);
    }
    // Kernel case: Taylor data at 2 equal the low-region polynomial's derivatives, alternating in sign.
    for (int k = 1; k <= 5; ++k)
        for (const Rational& u : {R(3, 2), R(2), R(1, 3)}) {
            const DeltaKU d = build_delta(k, u);
            const KernelFamily& fam = build_kernel_family(k);
            const RationalFn& piece = fam.psi.pieces()[u > 1 ? 1 : 0];
            const auto c = taylor_at_2(piece, u, k - 1);
            for (int j = 0; j <= k - 1; ++j) {
                EXPECT_EQ(c[static_cast<std::size_t>(j)], d.region_low->derivative(j)(Rational(2)));
                EXPECT_GE((j % 2 ? -1 : 1) * c[static_cast<std::size_t>(j)], 0);
            }
        }
}

TEST(Taylor, MatchesVChartSeries) {
    const RationalFn x = RationalFn::x();
    const std::vector<RationalFn> psis{x, x * x, x * x * x, x / (x + RationalFn(R(1)))};
    for (const RationalFn& psi : psis)
        for (const Rational& u : {R(1), R(1, 2), R(5, 3)}) {
            const auto oracle = test_support::w_taylor_via_v_series(delta_of_rational_psi(psi, u).in_v(), 3);
            ASSERT_TRUE(oracle.has_value());
            EXPECT_EQ(taylor_at_2(psi, u, 3), *oracle) << psi << " " << u;
        }
}

TEST(Taylor, ModelPathAgreesWithExact) {
    // f = 1/(1+x): psi = x/(1+x).  f = exp(-x^3/3): psi = x^3.  Non-rational u goes through jets.
    const Model f1 = model::rat(RationalFn(QPoly{R(1)}, QPoly{R(1), R(1)}));
    const auto exact = taylor_at_2(RationalFn::x() / (RationalFn::x() + RationalFn(R(1))), R(3, 2), 3);
    const auto via_model = taylor_at_2(f1, HighReal(1.5), 3);
    for (int j = 0; j <= 3; ++j) EXPECT_EQ(via_model[j], to_real<HighReal>(exact[j]));
    const HighReal u = sqrt(HighReal(2));
    const auto num = taylor_at_2(f1, u, 3);
    // Oracle: j = 0 gives u psi'(u) = u/(1+u)^2.
    EXPECT_LT(abs(num[0] - u / ((1 + u) * (1 + u))), HighReal(1e-30));
    // j = 1: (1/6)(u^3 psi''(u))' with psi'' = -2/(1+u)^3.
    const HighReal d1 = (-6 * u * u * (1 + u) + 6 * u * u * u) / pow(1 + u, 4) / 6;
    EXPECT_LT(abs(num[1] - d1), HighReal(1e-30));
}

TEST(Hypergeometric, BasicValues) {
    EXPECT_EQ(hyp2f1(0.3, 1.7, 2.2, 0.0), 1.0);
    for (int k = 1; k <= 8; ++k) {
        const double h = hyp2f1(double(-k), 1.0, double(k + 1), 1.0);
        EXPECT_NEAR(h, 0.5, 1e-14);
        // P_k(1) = binom(2k,k) 2F1(-k,1;k+1;1).
        EXPECT_NEAR(to_real<double>(build_kernel_family(k).P(Rational(1))),
                    to_real<double>(Rational(binomial(2 * k, k))) * h, 1e-9);
    }
    EXPECT_THROW(hyp2f1(1.0, 1.0, -2.0, -0.5), Hyp2F1Error);
}

TEST(Hypergeometric, SeriesAndEulerAgreeOnOverlap) {
    for (double z : {-0.2, -0.5, -0.9, -0.94})
        for (int k = 1; k <= 4; ++k) {
            const double a = 1 + k % 2, b = k + 0.5, c = k + 2.0;
            const double s = detail::hyp2f1_series(a, b, c, z, 1e-15);
            const double e = hyp2f1_euler(a, b, c, z);
            EXPECT_NEAR(s, e, 1e-13 * std::abs(s)) << z << " " << k;
        }
}

TEST(Hypergeometric, DeltaAtUOne) {
    for (int k = 1; k <= 4; ++k) {
        const DeltaKU d = build_delta(k, R(1));
        EXPECT_NEAR(delta_k1_hypergeometric(k, 10.0), d.at_w(10.0), 1e-12);
        for (double w : {2.5, 3.0, 5.0, 10.0, 40.0}) {
            const double ref = d.at_w(w);
            EXPECT_NEAR(delta_k1_closed(k, w), ref, 1e-12 * std::max(1.0, std::abs(ref))) << k << " " << w;
            EXPECT_NEAR(delta_k1_hypergeometric(k, w), ref, 1e-12 * std::max(1.0, std::abs(ref))) << k << " " << w;
            EXPECT_NEAR(delta_k1_euler(k, w), ref, 1e-12 * std::max(1.0, std::abs(ref))) << k << " " << w;
        }
    }
}

TEST(Hypergeometric, AppendixSum) {
    EXPECT_LT(appendix_sum_check(1, R(1), 10.0), 1e-12);
    EXPECT_LT(appendix_sum_check(1, R(1), 3.0), 1e-12);
    EXPECT_LT(appendix_sum_check(2, R(2), 10.0), 1e-10);
    EXPECT_LT(appendix_sum_check(3, R(3, 2), 8.0), 1e-10);
    for (int k = 1; k <= 4; ++k)
        for (const Rational& u : {R(3, 2), R(2), R(1, 3)}) {
            const double lo = to_real<double>(u + 1 / u);
            for (double dw : {0.0, 0.5, 4.0}) EXPECT_LT(appendix_sum_check(k, u, lo + dw), 1e-10) << k << " " << u << " " << dw;
        }
    EXPECT_THROW(appendix_sum_check(2, R(2), 2.4), std::domain_error);
}
