#include <gtest/gtest.h>

#include <cmath>

#include "magflow/spectrum.hpp"

using namespace magflow;

TEST(Landau, Examples) {
    const auto l4 = landau_levels(4, 0.5, 2);
    ASSERT_EQ(l4.size(), 2u);
    EXPECT_EQ(l4[0].value, 1.0);
    EXPECT_EQ(l4[1].value, 2.0);
    const auto l10 = landau_levels(10, 0.5, 2);
    ASSERT_EQ(l10.size(), 5u);
    ASSERT_TRUE(l10[0].multiplicity.has_value());
    EXPECT_EQ(*l10[0].multiplicity, 9);
    EXPECT_FALSE(l10[4].multiplicity.has_value());
    EXPECT_TRUE(landau_levels(1, 0.5, 2).empty());
    EXPECT_THROW(landau_levels(3, 0.3, 2), IntegralityError);
}

TEST(Landau, MonotoneAndPositiveMultiplicities) {
    for (double B : {0.5, 1.0, 1.5})
        for (int k = 1; k <= 200; ++k) {
            const auto lv = landau_levels(k, B, 2);
            for (std::size_t m = 0; m < lv.size(); ++m) {
                const double kB = k * B;
                EXPECT_NEAR(lv[m].value, kB * (m + 0.5) - 0.5 * m * (m + 1.0), 1e-12 * lv[m].value);
                EXPECT_NEAR(lv[m].scaled, lv[m].value / (static_cast<double>(k) * k), 1e-15);
                if (m > 0) {
                    EXPECT_GT(lv[m].value, lv[m - 1].value);
                }
                if (m + 2 <= lv.size()) {
                    ASSERT_TRUE(lv[m].multiplicity.has_value());
                    EXPECT_GT(*lv[m].multiplicity, 0);
                    EXPECT_EQ(static_cast<double>(*lv[m].multiplicity), 2.0 * (kB - 0.5 - m));
                }
            }
        }
}

TEST(Landau, FloatingPathAgrees) {
    for (int k : {7, 33, 150}) {
        const auto exact = landau_levels(k, 1.5, 2, true), approx = landau_levels(k, 1.5, 2, false);
        ASSERT_EQ(exact.size(), approx.size());
        for (std::size_t m = 0; m < exact.size(); ++m) EXPECT_NEAR(exact[m].value, approx[m].value, 1e-9);
    }
}

TEST(Maps, InversionIdentities) {
    for (double B : {0.5, 1.0, 1.5}) {
        const QuantizationMaps q{B, 10};
        for (int i = 0; i <= 1000; ++i) {
            // alpha(beta(s)) = B - |B - s| loses half the digits as s -> B
            const double s = 0.999 * B * i / 1000.0;
            EXPECT_NEAR(q.alpha(q.beta(s)), s, 1e-12);
            const double y = 0.5 * B * B * i / 1000.0;
            EXPECT_NEAR(q.beta(q.alpha(y)), y, 1e-12);
        }
    }
}

TEST(Maps, SlopeIsClassicalPeriod) {
    for (double B : {0.5, 1.0, 1.5}) {
        const QuantizationMaps q{B, 1};
        const double Ec = 0.5 * B * B;
        for (int i = 0; i <= 1000; ++i) {
            const double E = (Ec - 1e-6) * i / 1000.0;
            EXPECT_NEAR(q.alpha_prime(E) * std::sqrt(B * B - 2.0 * E), 1.0, 1e-12);
            // finite-difference check of alpha' against alpha
            if (i > 0 && i <= 900) {
                const double h = 1e-7;
                EXPECT_NEAR((q.alpha(E + h) - q.alpha(E - h)) / (2 * h), q.alpha_prime(E), 1e-4 * q.alpha_prime(E));
            }
        }
    }
}

TEST(Weinstein, Examples) {
    const auto w4 = weinstein_check(4, 0.5);
    EXPECT_LE(w4.action_residual, 1e-12);
    EXPECT_LE(w4.relation_residual, 1e-12);
    const auto w100 = weinstein_check(100, 1.0);
    EXPECT_EQ(w100.levels, 100);
    EXPECT_LE(w100.action_residual, 1e-11);
    EXPECT_LE(w100.relation_residual, 1e-11);
    for (int k : {3, 10, 57}) {
        const auto lv = landau_levels(k, 1.5, 2);
        const QuantizationMaps q{1.5, k};
        EXPECT_NEAR(q.f(lv[0].scaled), 0.0, 1e-15);
    }
    EXPECT_THROW(weinstein_check(1, 0.5), RangeError);
}

TEST(BohrSommerfeld, Examples) {
    const auto g = bohr_sommerfeld_gap(10, 1.0, 3);
    EXPECT_NEAR(g.spacing, 0.6, 1e-15);
    EXPECT_NEAR(g.inverse_period, 0.7, 1e-15);
    EXPECT_NEAR(g.residual, 0.1, 1e-13);
    EXPECT_THROW(bohr_sommerfeld_gap(10, 1.0, 9), IndexError);
    EXPECT_THROW(bohr_sommerfeld_gap(10, 1.0, -1), IndexError);
}

TEST(BohrSommerfeld, ResidualTimesKIsOne) {
    for (double B : {0.5, 1.0, 1.5})
        for (int k = 1; k <= 20; ++k) {
            const int top = static_cast<int>(std::floor(k * B));
            for (int m = 0; m + 1 < top && m < 20; ++m) {
                const auto g = bohr_sommerfeld_gap(k, B, m);
                EXPECT_NEAR(g.residual * k, 1.0, 1e-10);
                EXPECT_NEAR(g.spacing, B - (m + 1.0) / k, 1e-13);
                EXPECT_NEAR(g.inverse_period, B - static_cast<double>(m) / k, 1e-13);
            }
        }
}

TEST(Ladder, Examples) {
    const auto l = riemann_roch_ladder(5.0, 2, 3);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0].h0, 9);
    EXPECT_EQ(l[0].closed_form, 9);
    EXPECT_EQ(l[3].h0, 3);
    EXPECT_EQ(l[3].closed_form, 3);
    EXPECT_THROW(riemann_roch_ladder(5.0, 2, 4), RangeError);
    EXPECT_THROW(riemann_roch_ladder(5.3, 2, 0), IntegralityError);
}

TEST(Ladder, AgreesWithLandauMultiplicities) {
    for (double B : {0.5, 1.0, 1.5})
        for (int k = 4; k <= 200; ++k) {
            const double Bk = k * B;
            const int m_max = static_cast<int>(std::floor(Bk - 2.0));
            if (m_max < 0) continue;
            const auto lv = landau_levels(k, B, 2);
            for (const auto& row : riemann_roch_ladder(Bk, 2, m_max)) {
                EXPECT_EQ(row.h0, row.closed_form);
                ASSERT_TRUE(lv[row.m].multiplicity.has_value());
                EXPECT_EQ(*lv[row.m].multiplicity, row.h0);
            }
        }
}

TEST(Critical, Examples) {
    const auto a = critical_approach(1.0, {10});
    EXPECT_EQ(a[0].scaled_top, 0.5);
    EXPECT_EQ(a[0].gap, 0.0);
    EXPECT_EQ(landau_levels(10, 1.0, 2).back().value, 50.0);
    const auto b = critical_approach(0.5, {11});
    EXPECT_LE(b[0].gap, 0.5 / 11.0);
    // kB integral puts the top level exactly at E_c; half-integral kB leaves 3/(8k^2)
    EXPECT_EQ(critical_approach(0.5, {20})[0].gap, 0.0);
    const auto seq = critical_approach(0.5, {11, 21, 41, 81});
    for (std::size_t i = 0; i < seq.size(); ++i) {
        EXPECT_LE(seq[i].gap * seq[i].k, 0.5);
        EXPECT_NEAR(seq[i].gap, 0.375 / (seq[i].k * seq[i].k), 1e-15);
        if (i > 0) {
            EXPECT_LT(seq[i].gap, seq[i - 1].gap);
        }
    }
    EXPECT_THROW(critical_approach(0.5, {1}), RangeError);
}

TEST(CanonicalPower, Anchor) {
    for (int r : {1, 2, 3, 7}) {
        const auto t = canonical_power_tail(r);
        EXPECT_EQ(t.lambda_r, 0.5 * r * r);
        // the Landau formula at B = r, m = r, evaluated symbolically in k = 1
        EXPECT_EQ(t.lambda_r, r * (r + 0.5) - 0.5 * r * (r + 1.0));
        EXPECT_FALSE(t.statement.empty());
    }
    EXPECT_THROW(canonical_power_tail(0), DomainError);
}
