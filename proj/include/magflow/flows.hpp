#pragma once

// Frame flows on the quotient: right multiplication by one-parameter
// subgroups, reduced back into the Dirichlet domain on the left.
//
// The magnetic flow at speed lambda is conjugate (by the fiber scaling) to the
// flow of lambda X - B V on the unit tangent bundle, whose matrix is
// [[lambda/2, -B/2], [B/2, -lambda/2]]. At lambda = 0, B = 1 this is -V: the
// fiber rotation run backwards. The stable horocyclic generator used here,
// X_perp - V = [[0, -1], [0, 0]], is conjugate to [[0, 1], [0, 0]].

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magflow/errors.hpp"
#include "magflow/fuchsian.hpp"
#include "magflow/sl2.hpp"

namespace magflow {

enum class Regime { Elliptic, Parabolic, Hyperbolic };

inline std::string to_string(Regime r) {
    switch (r) {
        case Regime::Elliptic: return "elliptic";
        case Regime::Parabolic: return "parabolic";
        case Regime::Hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

struct MagneticParams {
    double B = 1.0;
    double E = 0.0;
    double lambda = 0.0;  ///< speed sqrt(2E)
    double E_c = 0.5;     ///< critical energy B^2/2
    Regime regime = Regime::Elliptic;
    std::optional<double> period;  ///< T_E = (B^2 - 2E)^{-1/2}; the orbit closes at 2 pi T_E
    std::optional<double> rate;    ///< 1/T'_lambda = (2E - B^2)^{1/2}
};

inline MagneticParams classify(double E, double B) {
    if (!(E >= 0.0) || !std::isfinite(E)) throw DomainError("classify: energy must be >= 0");
    if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("classify: B must be > 0");
    MagneticParams p;
    p.B = B;
    p.E = E;
    p.lambda = std::sqrt(2.0 * E);
    p.E_c = 0.5 * B * B;
    if (E < p.E_c - 1e-12) {
        p.regime = Regime::Elliptic;
        p.period = 1.0 / std::sqrt(B * B - 2.0 * E);
    } else if (std::abs(E - p.E_c) <= 1e-12) {
        p.regime = Regime::Parabolic;
    } else {
        p.regime = Regime::Hyperbolic;
        p.rate = std::sqrt(2.0 * E - B * B);
    }
    return p;
}

/// lambda X - B V.
inline AlgebraElement magnetic_generator(double lambda, double B) {
    return lambda * algebra::X() - B * algebra::V();
}

inline AlgebraElement magnetic_generator(const MagneticParams& p) {
    return magnetic_generator(p.lambda, p.B);
}

/// U_+ = X_perp - V.
inline AlgebraElement horocyclic_generator() { return algebra::U_plus(); }

/// A frame whose representative is a fixed point of reduction.
struct FramePoint {
    GroupElement rep;
    MagneticParams params;

    static FramePoint make(const GroupElement& g, const MagneticParams& params,
                           const FuchsianGroup& group) {
        return {group.reduce(g), params};
    }
};

/// p * exp(t M(lambda, B)), stepped by the exact exponential and reduced every
/// `reduce_every` time units (the last step may be shorter).
inline FramePoint flow(const FramePoint& p, double t, const FuchsianGroup& group,
                       double reduce_every = 1.0) {
    if (!(reduce_every > 0.0)) throw DomainError("flow: reduce_every must be > 0");
    if (t == 0.0) return p;
    const AlgebraElement m = magnetic_generator(p.params);
    const auto steps = static_cast<long>(std::ceil(std::abs(t) / reduce_every - 1e-12));
    const double h = t / static_cast<double>(steps);
    const GroupElement step = exp_sl2(m, h);
    GroupElement g = p.rep;
    for (long i = 0; i < steps; ++i) g = group.reduce(g * step);
    return {g, p.params};
}

/// Max-entry distance between exp(2 pi T_E M) and -I, before canonicalization.
inline double period_residual(double E, double B) {
    const MagneticParams p = classify(E, B);
    if (p.regime != Regime::Elliptic)
        throw RegimeError("period_residual: no period at or above the critical energy");
    const Mat2 g = exp_sl2_matrix(magnetic_generator(p), 2.0 * std::numbers::pi * *p.period);
    return max_entry_distance(g, -Mat2::identity());
}

struct OrbitSample {
    double t;
    GroupElement g;
};

/// Samples of the reduced orbit every `sample_dt` on [0, T].
inline std::vector<OrbitSample> orbit_samples(const FramePoint& p, double T, double sample_dt,
                                              const FuchsianGroup& group) {
    if (!(sample_dt > 0.0) || !(T >= 0.0)) throw DomainError("orbit_samples: need T >= 0, dt > 0");
    const auto n = static_cast<long>(std::ceil(T / sample_dt - 1e-12));
    std::vector<OrbitSample> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    FramePoint cur = p;
    double t = 0.0;
    out.push_back({0.0, cur.rep});
    for (long i = 1; i <= n; ++i) {
        const double next = (i == n) ? T : static_cast<double>(i) * sample_dt;
        cur = flow(cur, next - t, group);
        t = next;
        out.push_back({t, cur.rep});
    }
    return out;
}

}  // namespace magflow
