#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magflow/flows.hpp"
#include "magflow/random.hpp"
#include "magflow/variational.hpp"

using namespace magflow;

namespace {

double rel_err(const Coefficients& got, const Coefficients& want) {
    return (got - want).max_abs() / std::max(1.0, want.max_abs());
}

}  // namespace

TEST(ClosedForm, InitialTimeIsInit) {
    const Coefficients init{0.3, -1.2, 0.7, 2.0};
    for (double lambda : {0.0, 0.5, 1.0, 1.7}) {
        const auto s = closed_form(init, lambda, 1.0, 0.0).value;
        EXPECT_EQ(s.a, init.a);
        EXPECT_EQ(s.b, init.b);
        EXPECT_EQ(s.c, init.c);
        EXPECT_EQ(s.d, init.d);
    }
}

TEST(ClosedForm, PureAInitBelowCritical) {
    const double B = 1.0, lambda = 0.6, w = std::sqrt(B * B - lambda * lambda);
    for (double t : {0.3, 2.0, 7.5})
        EXPECT_NEAR(closed_form({1, 0, 0, 0}, lambda, B, t).value.b, B * std::sin(w * t) / w, 1e-14);
}

TEST(ClosedForm, PureDInitAtCritical) {
    for (double B : {0.5, 1.0, 2.0})
        for (double t : {0.5, 5.0, 10.0})
            EXPECT_NEAR(closed_form({0, 0, 0, 1}, B, B, t).value.b, B * t * t / 2.0, 1e-12 * B * t * t);
}

TEST(Oracle, Examples) {
    for (double B : {0.5, 1.0, 2.0}) {
        const auto s = ode_oracle({0, 0, 0, 1}, B, B, 5.0, 1e-3).value;
        EXPECT_NEAR(s.b, 12.5 * B, 1e-9);
        EXPECT_EQ(s.d, 1.0);
    }
    for (double t : {1.0, 4.0, 9.0})
        EXPECT_NEAR(ode_oracle({0, 1, 0, 0}, 0.0, 1.0, t, 1e-3).value.b, std::cos(t), 1e-10);
    EXPECT_THROW(ode_oracle({0, 1, 0, 0}, 0.0, 1.0, 1.0, 0.02), DomainError);
    EXPECT_THROW(ode_oracle({0, 1, 0, 0}, 0.0, 1.0, 1e8, 1e-2), StepOverflowError);
}

TEST(Oracle, EquivalenceOnRandomCases) {
    Rng rng(41);
    for (int i = 0; i < 100; ++i) {
        const Coefficients init{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double lambda = rng.uniform(0.0, 2.0), t = rng.uniform(0.0, 10.0);
        EXPECT_LE(rel_err(ode_oracle(init, lambda, 1.0, t, 1e-3).value, closed_form(init, lambda, 1.0, t).value), 1e-6)
            << "lambda=" << lambda << " t=" << t;
    }
}

TEST(ClosedForm, DIsConstant) {
    Rng rng(42);
    for (int i = 0; i < 50; ++i) {
        const double d0 = rng.uniform(-3, 3);
        EXPECT_EQ(closed_form({0.1, 0.2, 0.3, d0}, rng.uniform(0, 2), 1.0, rng.uniform(0, 10)).value.d, d0);
    }
}

TEST(ClosedForm, ContinuityAcrossParabolicBranch) {
    const Coefficients init{0.4, -0.3, 0.9, 0.7};
    for (double B : {0.5, 1.0, 1.5})
        for (double lambda : {B * (1.0 - 1e-7), B * (1.0 + 1e-7)}) {
            const Branch raw = lambda < B ? Branch::Trigonometric : Branch::Hyperbolic;
            for (double t = 0.5; t <= 10.0; t += 0.5) {
                const auto poly = closed_form_on_branch(init, B, B, t, Branch::Polynomial).value;
                const auto near = closed_form_on_branch(init, lambda, B, t, raw).value;
                EXPECT_LT(rel_err(near, poly), 1e-5) << "B=" << B << " t=" << t;
            }
        }
    EXPECT_EQ(branch_for(1.0 + 5e-7, 1.0), Branch::Polynomial);
    EXPECT_EQ(branch_for(0.9, 1.0), Branch::Trigonometric);
    EXPECT_EQ(branch_for(1.1, 1.0), Branch::Hyperbolic);
}

TEST(ClosedForm, CocycleOverOnePeriod) {
    // With d0 = 0 the coefficients return after 2 pi T_E. With d0 != 0 the
    // residual is the secular drift P d0 (1 + B^2/sigma) in a and
    // P d0 lambda^2 B / sigma in c (sigma = B^2 - lambda^2), while b returns.
    Rng rng(43);
    for (int i = 0; i < 50; ++i) {
        const double B = 1.0, lambda = rng.uniform(0.0, 0.95), sigma = B * B - lambda * lambda;
        const double P = 2.0 * std::numbers::pi / std::sqrt(sigma);
        const Coefficients init{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0};
        const auto back = closed_form(init, lambda, B, P).value;
        EXPECT_LE((back - init).max_abs(), 1e-8);
        Coefficients drifting = init;
        drifting.d = rng.uniform(-1, 1);
        const auto s = closed_form(drifting, lambda, B, P).value;
        const double d0 = drifting.d;
        EXPECT_NEAR(s.a - init.a, P * d0 * (1.0 + B * B / sigma), 1e-8 * std::max(1.0, P / sigma));
        EXPECT_NEAR(s.b, init.b, 1e-8);
        EXPECT_NEAR(s.c - init.c, P * d0 * lambda * lambda * B / sigma, 1e-8 * std::max(1.0, P / sigma));
    }
}

TEST(Lyapunov, Examples) {
    EXPECT_NEAR(lyapunov_estimate(std::numbers::sqrt2, 1.0, 40.0), 1.0, 0.02);
    EXPECT_NEAR(lyapunov_estimate(2.0, 1.0, 40.0), std::sqrt(3.0), 0.02 * std::sqrt(3.0));
    EXPECT_THROW(lyapunov_estimate(1.0, 1.0, 40.0), RegimeError);
    EXPECT_THROW(lyapunov_estimate(0.5, 1.0, 40.0), RegimeError);
    EXPECT_THROW(lyapunov_estimate(2.0, 1.0, 10.0), RangeError);
}

TEST(Lyapunov, MatchesEnergyRate) {
    for (double E : {0.7, 1.0, 2.5}) {
        const auto p = classify(E, 1.0);
        EXPECT_NEAR(lyapunov_estimate(p.lambda, 1.0, 40.0), std::sqrt(2.0) * std::sqrt(E - p.E_c), 0.02 * *p.rate);
    }
}

TEST(Growth, BoundedRatiosInAllRegimes) {
    std::vector<double> grid;
    for (int i = 0; i <= 1000; ++i) grid.push_back(0.1 * i);
    for (double lambda : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        const auto r = growth_check(lambda, 1.0, grid);
        EXPECT_NEAR(r.rows[10].ratio, 1.0, 1e-12);  // C fitted at t = 1
        EXPECT_LE(r.max_ratio, 4.0) << "lambda=" << lambda;
        EXPECT_NEAR(r.rate, growth_rate(lambda, 1.0), 0.0);
    }
    // the exponential factor is present above the critical energy
    EXPECT_NEAR(growth_check(2.0, 1.0, grid).rate, std::sqrt(3.0), 1e-15);
}

TEST(Growth, PropagatorNormOracle) {
    // identity at t = 0; elliptic rotation-like blocks stay bounded
    EXPECT_NEAR(propagator_norm(0.5, 1.0, 0.0), 1.0, 1e-14);
    // power-iteration oracle on the explicit 4x4 propagator
    const double lambda = 1.3, B = 1.0, t = 3.0;
    std::array<Coefficients, 4> cols;
    const Coefficients basis[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i) cols[i] = closed_form(basis[i], lambda, B, t).value;
    std::array<double, 4> x{1, 1, 1, 1};
    double sigma = 0.0;
    for (int it = 0; it < 500; ++it) {
        Coefficients y{0, 0, 0, 0};
        for (int i = 0; i < 4; ++i) {
            y.a += cols[i].a * x[i];
            y.b += cols[i].b * x[i];
            y.c += cols[i].c * x[i];
            y.d += cols[i].d * x[i];
        }
        std::array<double, 4> z{};
        for (int i = 0; i < 4; ++i) z[i] = cols[i].a * y.a + cols[i].b * y.b + cols[i].c * y.c + cols[i].d * y.d;
        double n = 0.0;
        for (double v : z) n += v * v;
        n = std::sqrt(n);
        for (int i = 0; i < 4; ++i) x[i] = z[i] / n;
        sigma = std::sqrt(n);
    }
    EXPECT_NEAR(propagator_norm(lambda, B, t), sigma, 1e-10 * sigma);
}

TEST(GrowthExponent, Recurrence) {
    EXPECT_EQ(growth_exponent(0), 0);
    for (int n = 0; n <= 20; ++n) {
        EXPECT_EQ(growth_exponent(n + 1) - growth_exponent(n), 3 + n);
        EXPECT_EQ(growth_exponent(n), 3L * n + static_cast<long>(n) * (n - 1) / 2);
        EXPECT_EQ(loose_growth_exponent(n) - growth_exponent(n), n);
    }
    const auto g = growth_bound(3, 2.0, 1.0);
    EXPECT_EQ(g.m_n, 12);
    EXPECT_NEAR(g.rate, 3.0 * std::sqrt(3.0), 1e-14);
}
