#pragma once

// Exact 2x2 linear algebra on SL(2,R) modulo +-I and on sl(2,R).
//
// The frame bundle of the hyperbolic plane is identified with PSL(2,R) acting
// on the upper half plane; the disk model is reached through the Cayley map
// z -> (z - i)/(z + i), which sends the base point i to 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "magflow/errors.hpp"

namespace magflow {

using cplx = std::complex<double>;

/// Plain 2x2 real matrix, no invariants.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }

    double max_abs() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }

    friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
    }
    friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
    }
    friend constexpr Mat2 operator*(double s, const Mat2& x) {
        return {s * x.a, s * x.b, s * x.c, s * x.d};
    }
    constexpr Mat2 operator-() const { return {-a, -b, -c, -d}; }
};

inline double max_entry_distance(const Mat2& x, const Mat2& y) { return (x - y).max_abs(); }

/// Traceless real 2x2 matrix [[p, q], [r, -p]]; trace is zero by construction.
class AlgebraElement {
public:
    constexpr AlgebraElement() = default;
    constexpr AlgebraElement(double p, double q, double r) : p_(p), q_(q), r_(r) {}

    constexpr double p() const { return p_; }
    constexpr double q() const { return q_; }
    constexpr double r() const { return r_; }

    constexpr Mat2 matrix() const { return {p_, q_, r_, -p_}; }
    constexpr double det() const { return -p_ * p_ - q_ * r_; }
    double norm() const { return std::sqrt(2.0 * p_ * p_ + q_ * q_ + r_ * r_); }

    friend constexpr AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) {
        return {x.p_ + y.p_, x.q_ + y.q_, x.r_ + y.r_};
    }
    friend constexpr AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y) {
        return {x.p_ - y.p_, x.q_ - y.q_, x.r_ - y.r_};
    }
    friend constexpr AlgebraElement operator*(double s, const AlgebraElement& x) {
        return {s * x.p_, s * x.q_, s * x.r_};
    }
    constexpr AlgebraElement operator-() const { return {-p_, -q_, -r_}; }

    friend constexpr bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

private:
    double p_ = 0.0, q_ = 0.0, r_ = 0.0;
};

/// Commutator MN - NM.
constexpr AlgebraElement bracket(const AlgebraElement& m, const AlgebraElement& n) {
    const Mat2 mn = m.matrix() * n.matrix();
    const Mat2 nm = n.matrix() * m.matrix();
    const Mat2 c = mn - nm;
    return {0.5 * (c.a - c.d), c.b, c.c};
}

namespace algebra {

/// Geodesic generator.
constexpr AlgebraElement X() { return {0.5, 0.0, 0.0}; }
/// Fiber rotation generator; exp(2 pi V) = -I.
constexpr AlgebraElement V() { return {0.0, 0.5, -0.5}; }
/// X_perp = [V, X].
constexpr AlgebraElement X_perp() { return bracket(V(), X()); }
/// Stable horocyclic generator U_+ = X_perp - V.
constexpr AlgebraElement U_plus() { return X_perp() - V(); }

}  // namespace algebra

/// Unimodular matrix in canonical sign: the first nonzero entry in reading
/// order is positive, which realizes the quotient by +-I.
class GroupElement {
public:
    GroupElement() = default;

    /// Renormalizes by sqrt(det) when the determinant has drifted and applies
    /// the canonical sign. Throws DomainError for non-finite or det <= 0.
    static GroupElement from(const Mat2& m) {
        const double det = m.det();
        // det of a large matrix carries rounding of order eps |ad|; rescaling by
        // that noise would do more harm than leaving it alone
        const double det_noise = 1e-13 * std::max(1.0, std::abs(m.a * m.d) + std::abs(m.b * m.c));
        Mat2 n = m;
        if (!std::isfinite(det) || !std::isfinite(det_noise))
            throw DomainError("GroupElement: matrix is not in GL+(2,R)");
        if (std::abs(det - 1.0) > det_noise) {
            if (!(det > 0.0)) throw DomainError("GroupElement: matrix is not in GL+(2,R)");
            n = (1.0 / std::sqrt(det)) * m;
        }
        if (first_nonzero(n) < 0.0) n = -n;
        GroupElement g;
        g.m_ = n;
        return g;
    }

    static GroupElement identity() { return {}; }

    const Mat2& matrix() const { return m_; }
    double m11() const { return m_.a; }
    double m12() const { return m_.b; }
    double m21() const { return m_.c; }
    double m22() const { return m_.d; }

    GroupElement inverse() const { return from({m_.d, -m_.b, -m_.c, m_.a}); }

    friend GroupElement operator*(const GroupElement& g, const GroupElement& h) {
        return from(g.m_ * h.m_);
    }

private:
    static double first_nonzero(const Mat2& m) {
        for (double x : {m.a, m.b, m.c, m.d})
            if (x != 0.0) return x;
        return 0.0;
    }

    Mat2 m_{};
};

inline GroupElement compose(const GroupElement& g, const GroupElement& h) { return g * h; }

/// Max-entry distance in PSL(2,R): the smaller of |g - h| and |g + h|.
inline double pdist(const GroupElement& g, const GroupElement& h) {
    return std::min(max_entry_distance(g.matrix(), h.matrix()),
                    max_entry_distance(g.matrix(), -h.matrix()));
}

namespace detail {

// cos-like and sin(x)/x-like even series in z = det(M) t^2, four terms, used
// when |kappa t| is tiny to avoid dividing by kappa.
inline void exp_coefficients(double det, double t, double& c, double& s) {
    const double z = det * t * t;
    if (std::abs(z) < 1e-8) {
        c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        s = t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        return;
    }
    if (det > 0.0) {
        const double kappa = std::sqrt(det);
        c = std::cos(kappa * t);
        s = std::sin(kappa * t) / kappa;
    } else {
        const double kappa = std::sqrt(-det);
        c = std::cosh(kappa * t);
        s = std::sinh(kappa * t) / kappa;
    }
}

}  // namespace detail

/// exp(tM) in closed form from M^2 = -det(M) I, without sign canonicalization.
inline Mat2 exp_sl2_matrix(const AlgebraElement& m, double t) {
    double c = 1.0, s = t;
    if (m.det() != 0.0) detail::exp_coefficients(m.det(), t, c, s);
    return c * Mat2::identity() + s * m.matrix();
}

inline GroupElement exp_sl2(const AlgebraElement& m, double t) {
    return GroupElement::from(exp_sl2_matrix(m, t));
}

/// Scaling-and-squaring Taylor exponential; independent of the closed form.
inline Mat2 exp_reference_matrix(const AlgebraElement& m, double t) {
    const Mat2 a = t * m.matrix();
    const double norm = std::sqrt(a.a * a.a + a.b * a.b + a.c * a.c + a.d * a.d);
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    const Mat2 x = scale * a;
    Mat2 sum = Mat2::identity();
    Mat2 term = Mat2::identity();
    for (int k = 1; k <= 24; ++k) {
        term = (1.0 / k) * (term * x);
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline GroupElement exp_reference(const AlgebraElement& m, double t) {
    return GroupElement::from(exp_reference_matrix(m, t));
}

// ---------------------------------------------------------------------------
// Disk model. A real matrix g corresponds to the SU(1,1) matrix
// [[alpha, beta], [conj(beta), conj(alpha)]] with
//   alpha = ((a + d) + i (b - c)) / 2,   beta = ((a - d) - i (b + c)) / 2.

struct DiskForm {
    cplx alpha;
    cplx beta;
};

inline DiskForm to_disk(const GroupElement& g) {
    const Mat2& m = g.matrix();
    return {cplx(m.a + m.d, m.b - m.c) * 0.5, cplx(m.a - m.d, -(m.b + m.c)) * 0.5};
}

inline GroupElement from_disk(cplx alpha, cplx beta) {
    return GroupElement::from({alpha.real() + beta.real(), alpha.imag() - beta.imag(),
                               -alpha.imag() - beta.imag(), alpha.real() - beta.real()});
}

/// Base point of the frame g in the unit disk.
inline cplx disk_point(const Mat2& m) {
    return cplx(m.a - m.d, -(m.b + m.c)) / cplx(m.a + m.d, -(m.b - m.c));
}
inline cplx disk_point(const GroupElement& g) { return disk_point(g.matrix()); }

/// Angle of the frame g against the Euclidean trivialization of the disk;
/// right multiplication by exp(sV) adds s.
inline double frame_angle(const Mat2& m) { return 2.0 * std::atan2(m.b - m.c, m.a + m.d); }
inline double frame_angle(const GroupElement& g) { return frame_angle(g.matrix()); }

/// Poincare-disk distance.
inline double hyp_dist(cplx z, cplx w) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(w.real()) ||
        !std::isfinite(w.imag()))
        throw DomainError("hyp_dist: non-finite input");
    if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0)
        throw DomainError("hyp_dist: point outside the unit disk");
    const double ratio = std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
    return 2.0 * std::atanh(std::min(ratio, 1.0));
}

/// Distance from the disk origin to the base point of m (stable for large m).
inline double dist_from_origin(const Mat2& m) {
    // |m|_F^2 = 2 cosh d for unimodular m.
    const double f2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    return std::acosh(std::max(1.0, 0.5 * f2));
}

/// Frame with base point z and angle theta.
inline GroupElement frame_at(cplx z, double theta) {
    if (!(std::abs(z) < 1.0)) throw DomainError("frame_at: point outside the unit disk");
    const double s = 1.0 / std::sqrt(1.0 - std::norm(z));
    const GroupElement translate = from_disk(cplx(s, 0.0), s * z);
    return translate * exp_sl2(algebra::V(), theta);
}

}  // namespace magflow
