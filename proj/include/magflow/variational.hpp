#pragma once

// Derivative cocycle of the magnetic flow in the frame {X, X_perp, V, V_perp}.
// Writing dPhi_t(Z) = a X + b X_perp + c V + d V_perp, the coefficients obey
//
//   a' = B b + d,   b' = B a + c,   c' = lambda^2 b,   d' = 0,
//
// hence b'' = -(B^2 - lambda^2) b + B d, with closed forms in each regime.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "magflow/errors.hpp"

namespace magflow {

struct Coefficients {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }
    double max_abs() const {
        return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    }
    friend Coefficients operator-(const Coefficients& x, const Coefficients& y) {
        return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
    }
};

struct VariationalState {
    Coefficients value;
    Coefficients init;
    double lambda = 0.0;
    double B = 1.0;
    double t = 0.0;
};

enum class Branch { Trigonometric, Polynomial, Hyperbolic };

/// Branch chosen by closed_form: polynomial when |lambda - B| < 1e-6.
inline Branch branch_for(double lambda, double B) {
    if (std::abs(lambda - B) < 1e-6) return Branch::Polynomial;
    return lambda < B ? Branch::Trigonometric : Branch::Hyperbolic;
}

namespace detail {

// With sigma = B^2 - lambda^2 these are the kernels of the b-equation:
//   cos_like = cos(wt) | 1 | cosh(wt)
//   sin_like = int_0^t cos_like,   one_minus = int_0^t sin_like,
//   cubic    = int_0^t one_minus.
struct Kernels {
    double cos_like, sin_like, one_minus, cubic;
};

inline Kernels kernels_series(double sigma, double t) {
    // Entire in z = sigma t^2; terms (-z)^n / (2n + j)!.
    const double z = sigma * t * t;
    double c = 0.0, s = 0.0, k = 0.0, j = 0.0;
    double term = 1.0;  // (-z)^n
    double f0 = 1.0;    // (2n)!
    for (int n = 0; n < 14; ++n) {
        const double f1 = f0 * (2 * n + 1), f2 = f1 * (2 * n + 2), f3 = f2 * (2 * n + 3);
        c += term / f0;
        s += term / f1;
        k += term / f2;
        j += term / f3;
        term *= -z;
        f0 = f2;
    }
    return {c, t * s, t * t * k, t * t * t * j};
}

inline Kernels kernels(Branch branch, double sigma, double t) {
    if (branch == Branch::Polynomial) return {1.0, t, 0.5 * t * t, t * t * t / 6.0};
    if (std::abs(sigma * t * t) < 0.1) return kernels_series(sigma, t);
    if (branch == Branch::Trigonometric) {
        const double w = std::sqrt(sigma);
        const double s = std::sin(w * t) / w;
        const double h = std::sin(0.5 * w * t);
        return {std::cos(w * t), s, 2.0 * h * h / sigma, (t - s) / sigma};
    }
    const double w = std::sqrt(-sigma);
    const double s = std::sinh(w * t) / w;
    const double h = std::sinh(0.5 * w * t);
    return {std::cosh(w * t), s, 2.0 * h * h / (w * w), (s - t) / (w * w)};
}

}  // namespace detail

/// Closed form on an explicit branch, without dispatch. The polynomial branch
/// ignores lambda - B.
inline VariationalState closed_form_on_branch(const Coefficients& init, double lambda, double B,
                                              double t, Branch branch) {
    const double sigma = B * B - lambda * lambda;
    const auto k = detail::kernels(branch, sigma, t);
    const double drive = B * init.a + init.c;  // b'(0)
    const double b = B * init.d * k.one_minus + init.b * k.cos_like + drive * k.sin_like;
    const double int_b = B * init.d * k.cubic + init.b * k.sin_like + drive * k.one_minus;
    VariationalState s;
    s.init = init;
    s.lambda = lambda;
    s.B = B;
    s.t = t;
    s.value = {init.a + t * init.d + B * int_b, b, init.c + lambda * lambda * int_b, init.d};
    return s;
}

inline VariationalState closed_form(const Coefficients& init, double lambda, double B, double t) {
    if (!(lambda >= 0.0)) throw DomainError("closed_form: lambda must be >= 0");
    return closed_form_on_branch(init, lambda, B, t, branch_for(lambda, B));
}

/// Classical RK4 on (a, b, b', c) with d frozen; independent of the closed forms.
inline VariationalState ode_oracle(const Coefficients& init, double lambda, double B, double t,
                                   double dt) {
    if (!(dt > 0.0) || dt > 1e-2) throw DomainError("ode_oracle: need 0 < dt <= 1e-2");
    const double steps_real = std::ceil(std::abs(t) / dt);
    if (steps_real > 1e9) throw StepOverflowError("ode_oracle: too many steps");
    const auto steps = static_cast<std::int64_t>(steps_real);
    const double sigma = B * B - lambda * lambda;
    const double lam2 = lambda * lambda;
    const double d = init.d;
    using State = std::array<double, 4>;  // a, b, b', c
    auto rhs = [&](const State& y) -> State {
        return {B * y[1] + d, y[2], -sigma * y[1] + B * d, lam2 * y[1]};
    };
    State y{init.a, init.b, B * init.a + init.c, init.c};
    const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    for (std::int64_t i = 0; i < steps; ++i) {
        const State k1 = rhs(y);
        State tmp;
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        const State k2 = rhs(tmp);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        const State k3 = rhs(tmp);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h * k3[j];
        const State k4 = rhs(tmp);
        for (int j = 0; j < 4; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    VariationalState s;
    s.init = init;
    s.lambda = lambda;
    s.B = B;
    s.t = t;
    s.value = {y[0], y[1], y[3], d};
    return s;
}

namespace detail {

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (x.size() < 2 || den == 0.0) throw FitError("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / den;
}

// Largest eigenvalue of a symmetric 4x4 matrix by cyclic Jacobi rotations.
inline double largest_eigenvalue(std::array<std::array<double, 4>, 4> a) {
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int p = 0; p < 4; ++p) {
            diag += a[p][p] * a[p][p];
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        }
        if (off <= 1e-32 * diag) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    return std::max({a[0][0], a[1][1], a[2][2], a[3][3]});
}

}  // namespace detail

/// Slope of log |(a,b,c,d)(t)| on [T/2, T] from init (1,1,1,1).
inline double lyapunov_estimate(double lambda, double B, double T) {
    if (!(lambda > B) || branch_for(lambda, B) != Branch::Hyperbolic)
        throw RegimeError("lyapunov_estimate: needs lambda > B");
    if (!(T >= 20.0)) throw RangeError("lyapunov_estimate: needs T >= 20");
    constexpr int samples = 200;
    std::vector<double> ts, logs;
    const Coefficients init{1.0, 1.0, 1.0, 1.0};
    for (int i = 0; i < samples; ++i) {
        const double t = 0.5 * T + 0.5 * T * i / (samples - 1);
        ts.push_back(t);
        logs.push_back(std::log(closed_form(init, lambda, B, t).value.norm()));
    }
    return detail::fit_slope(ts, logs);
}

/// sup over unit initial data of |(a,b,c,d)(t)|: the spectral norm of the
/// 4x4 propagator.
inline double propagator_norm(double lambda, double B, double t) {
    std::array<Coefficients, 4> cols;
    const Coefficients basis[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i) cols[i] = closed_form(basis[i], lambda, B, t).value;
    auto entry = [&](int row, int col) {
        const auto& v = cols[col];
        return row == 0 ? v.a : row == 1 ? v.b : row == 2 ? v.c : v.d;
    };
    std::array<std::array<double, 4>, 4> gram{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int r = 0; r < 4; ++r) gram[i][j] += entry(r, i) * entry(r, j);
    return std::sqrt(std::max(0.0, detail::largest_eigenvalue(gram)));
}

/// Exponential rate sqrt(2) (E - E_c)_+^{1/2} = sqrt((lambda^2 - B^2)_+).
inline double growth_rate(double lambda, double B) {
    return std::sqrt(std::max(0.0, lambda * lambda - B * B));
}

struct GrowthRow {
    double t;
    double norm;
    double bound;
    double ratio;
};

struct GrowthReport {
    double lambda;
    double B;
    double rate;
    double C;  ///< fitted so that the bound is tight at t = 1
    double max_ratio;
    std::vector<GrowthRow> rows;
};

/// Checks |coefficients(t)| <= C <t>^3 e^{rate t} on a time grid, with C
/// fitted once at t = 1, and reports the largest ratio.
inline GrowthReport growth_check(double lambda, double B, const std::vector<double>& t_grid) {
    auto japanese_cubed = [](double t) { return std::pow(1.0 + t * t, 1.5); };
    GrowthReport r{lambda, B, growth_rate(lambda, B), 0.0, 0.0, {}};
    r.C = propagator_norm(lambda, B, 1.0) / (japanese_cubed(1.0) * std::exp(r.rate));
    for (double t : t_grid) {
        const double norm = propagator_norm(lambda, B, t);
        const double bound = r.C * japanese_cubed(t) * std::exp(r.rate * t);
        r.rows.push_back({t, norm, bound, norm / bound});
        r.max_ratio = std::max(r.max_ratio, norm / bound);
    }
    return r;
}

/// Exponent m_n of <t> in the C^n propagation bound: m_0 = 0, m_{n+1} = m_n + 3 + n.
constexpr long growth_exponent(int n) {
    long m = 0;
    for (int j = 0; j < n; ++j) m += 3 + j;
    return m;
}

/// 3n + n(n+1)/2 exceeds growth_exponent(n) by n: a valid but looser exponent.
constexpr long loose_growth_exponent(int n) { return 3L * n + static_cast<long>(n) * (n + 1) / 2; }

struct GrowthBound {
    int n;
    long m_n;
    double rate;  ///< sqrt(2) (E - E_c)_+^{1/2} n
};

inline GrowthBound growth_bound(int n, double lambda, double B) {
    return {n, growth_exponent(n), growth_rate(lambda, B) * n};
}

}  // namespace magflow
