#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magflow/random.hpp"
#include "magflow/sl2.hpp"

using namespace magflow;

namespace {

void expect_mat_near(const Mat2& x, const Mat2& y, double tol) {
    EXPECT_LE(max_entry_distance(x, y), tol) << "got [" << x.a << ' ' << x.b << "; " << x.c << ' ' << x.d << "]";
}

void expect_alg_eq(const AlgebraElement& x, const AlgebraElement& y) {
    EXPECT_DOUBLE_EQ(x.p(), y.p());
    EXPECT_DOUBLE_EQ(x.q(), y.q());
    EXPECT_DOUBLE_EQ(x.r(), y.r());
}

AlgebraElement random_algebra(Rng& rng, double max_norm) {
    for (;;) {
        AlgebraElement m{rng.uniform(-1, 1), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
        if (m.norm() <= max_norm) return m;
    }
}

}  // namespace

TEST(Compose, IdentityAndInverse) {
    const auto g = GroupElement::from({2.0, 1.0, 3.0, 2.0});
    EXPECT_LE(pdist(compose(GroupElement::identity(), g), g), 1e-15);
    EXPECT_LE(pdist(compose(g, g.inverse()), GroupElement::identity()), 1e-14);
}

TEST(Compose, DiagonalSquares) {
    const double e = std::numbers::e;
    const auto d = GroupElement::from({e, 0.0, 0.0, 1.0 / e});
    expect_mat_near(compose(d, d).matrix(), {e * e, 0.0, 0.0, 1.0 / (e * e)}, 1e-14);
}

TEST(GroupElement, CanonicalSignAndRenormalization) {
    const auto g = GroupElement::from({-2.0, -1.0, -3.0, -2.0});
    EXPECT_GT(g.m11(), 0.0);
    const auto h = GroupElement::from({0.0, -1.0, 1.0, 0.0});
    EXPECT_GT(h.m12(), 0.0);
    const auto s = GroupElement::from({4.0, 0.0, 0.0, 1.0});  // det 4
    EXPECT_NEAR(s.matrix().det(), 1.0, 1e-15);
    EXPECT_THROW(GroupElement::from({1.0, 0.0, 0.0, -1.0}), DomainError);
    EXPECT_THROW(GroupElement::from({NAN, 0.0, 0.0, 1.0}), DomainError);
}

TEST(Bracket, Table) {
    using namespace algebra;
    expect_alg_eq(X_perp(), AlgebraElement(0.0, -0.5, -0.5));
    expect_alg_eq(bracket(V(), X()), X_perp());
    expect_alg_eq(bracket(X(), V()), -X_perp());
    expect_alg_eq(bracket(X(), X_perp()), -V());
    expect_alg_eq(bracket(X_perp(), V()), X());
    // antisymmetric partners of the three matrix relations
    expect_alg_eq(bracket(X_perp(), X()), V());
    expect_alg_eq(bracket(V(), X_perp()), -X());
}

TEST(Bracket, HorocyclicField) {
    expect_alg_eq(algebra::U_plus(), AlgebraElement(0.0, -1.0, 0.0));
    EXPECT_EQ(algebra::U_plus().det(), 0.0);
}

TEST(Exp, Examples) {
    const AlgebraElement m{0.3, -0.7, 1.1};
    EXPECT_LE(pdist(exp_sl2(m, 0.0), GroupElement::identity()), 0.0);
    for (double t : {-3.0, 0.5, 4.0})
        expect_mat_near(exp_sl2(algebra::X(), t).matrix(), {std::exp(t / 2), 0.0, 0.0, std::exp(-t / 2)}, 1e-13);
    EXPECT_LE(pdist(exp_sl2(algebra::V(), 2.0 * std::numbers::pi), GroupElement::identity()), 1e-15);
    expect_mat_near(exp_sl2_matrix(algebra::V(), 2.0 * std::numbers::pi), -Mat2::identity(), 1e-15);
    expect_mat_near(exp_sl2(algebra::U_plus(), 2.5).matrix(), {1.0, -2.5, 0.0, 1.0}, 0.0);
}

TEST(Exp, ReferenceExamples) {
    EXPECT_LE(pdist(exp_reference(algebra::X(), 0.0), GroupElement::identity()), 0.0);
    expect_mat_near(exp_reference(algebra::X(), 3.0).matrix(), {std::exp(1.5), 0.0, 0.0, std::exp(-1.5)}, 1e-13);
    EXPECT_LE(pdist(exp_reference(algebra::V(), 2.0 * std::numbers::pi), GroupElement::identity()), 1e-13);
}

TEST(Exp, AgreesWithReferenceUpToNormTime50) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_algebra(rng, 2.0);
        const double t = rng.uniform(-1, 1) * 50.0 / m.norm();
        const Mat2 ref = exp_reference_matrix(m, t);
        EXPECT_LE(max_entry_distance(exp_sl2_matrix(m, t), ref) / std::max(1.0, ref.max_abs()), 1e-10);
    }
}

TEST(Exp, SmallKappaSeriesIsContinuous) {
    // det M = kappa^2 tiny: closed form near the crossover matches the reference
    for (double eps : {1e-3, 1e-5, 1e-7, -1e-5, -1e-7}) {
        const AlgebraElement m{0.5, -0.5 + eps, 0.5};  // det = 0.5 eps
        for (double t : {0.1, 1.0, 3.0})
            EXPECT_LE(max_entry_distance(exp_sl2_matrix(m, t), exp_reference_matrix(m, t)), 1e-13);
    }
    const AlgebraElement near_nil{0.5, -0.5 + 1e-9, 0.5};
    EXPECT_LE(max_entry_distance(exp_sl2_matrix(near_nil, 2.0), exp_reference_matrix(near_nil, 2.0)), 1e-13);
}

TEST(Exp, GroupLawProperty) {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_algebra(rng, 2.0);
        const double s = rng.uniform(-10, 10), t = rng.uniform(-10, 10);
        const Mat2 a = exp_sl2_matrix(m, s), b = exp_sl2_matrix(m, t), ab = exp_sl2_matrix(m, s + t);
        // rounding in the product scales with |a| |b|, not |ab|
        const double scale = a.max_abs() * b.max_abs();
        EXPECT_LE(max_entry_distance(ab, a * b) / scale, 1e-14);
        // projecting back to det 1 adds a relative error of order eps |ab| |a| |b|
        const double d = pdist(exp_sl2(m, s + t), compose(exp_sl2(m, s), exp_sl2(m, t)));
        EXPECT_LE(d / scale, 1e-14 * std::max(1.0, ab.max_abs() * ab.max_abs()));
    }
}

TEST(Exp, UnitDeterminant) {
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const auto m = random_algebra(rng, 2.0);
        const Mat2 g = exp_sl2(m, rng.uniform(-10, 10)).matrix();
        // the computed determinant cannot beat eps (|ad| + |bc|)
        EXPECT_NEAR(g.det(), 1.0, 1e-12 * std::max(1.0, std::abs(g.a * g.d) + std::abs(g.b * g.c)));
    }
}

TEST(Disk, PointAndDistance) {
    EXPECT_EQ(disk_point(GroupElement::identity()), cplx(0.0, 0.0));
    EXPECT_EQ(hyp_dist(0.0, 0.0), 0.0);
    for (double r : {0.1, 0.5, 0.9, 0.99}) {
        EXPECT_NEAR(hyp_dist(0.0, r), 2.0 * std::atanh(r), 1e-12);
        // Oracle: integral of 2 |dz| / (1 - |z|^2) along the radius, Simpson.
        const int n = 20000;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = r * i / n;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * 2.0 / (1.0 - x * x);
        }
        EXPECT_NEAR(hyp_dist(0.0, r), acc * r / (3.0 * n), 1e-8);
    }
    EXPECT_THROW(hyp_dist(cplx(NAN, 0.0), 0.0), DomainError);
    EXPECT_THROW(hyp_dist(1.0, 0.0), DomainError);
}

TEST(Disk, FrameAtPlacesBasePoint) {
    const cplx z{0.3, -0.4};
    const auto g = frame_at(z, 1.2);
    EXPECT_LE(std::abs(disk_point(g) - z), 1e-14);
    EXPECT_NEAR(dist_from_origin(g.matrix()), hyp_dist(0.0, z), 1e-12);
    // right multiplication by the rotation subgroup turns the frame angle
    const auto h = g * exp_sl2(algebra::V(), 0.5);
    EXPECT_LE(std::abs(disk_point(h) - z), 1e-14);
    EXPECT_NEAR(std::remainder(frame_angle(h) - frame_angle(g) - 0.5, 2.0 * std::numbers::pi), 0.0, 1e-12);
}

TEST(Disk, IsometryInvariance) {
    Rng rng(14);
    for (int i = 0; i < 200; ++i) {
        const auto g = frame_at(std::polar(0.8 * rng.uniform(), 6.28 * rng.uniform()), rng.uniform(0, 6.28));
        const auto a = frame_at(std::polar(0.8 * rng.uniform(), 6.28 * rng.uniform()), 0.0);
        const auto b = frame_at(std::polar(0.8 * rng.uniform(), 6.28 * rng.uniform()), 0.0);
        EXPECT_NEAR(hyp_dist(disk_point(g * a), disk_point(g * b)), hyp_dist(disk_point(a), disk_point(b)), 1e-9);
    }
}
