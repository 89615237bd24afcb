#pragma once

// Scalar models of the localized lowest-level states: the Laguerre
// polynomials Q_m(t) = (1/m!)(d/dt - 1)^m t^m and the Gaussian radial
// profile (k/2pi) e^{-k r^2/4} Q_m(.) in two argument conventions.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "magflow/errors.hpp"

namespace magflow {

using BigRational = boost::multiprecision::cpp_rational;

struct LaguerreQ {
    int m = 0;
    std::vector<BigRational> coefficients;  ///< ascending powers of t

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

constexpr int max_laguerre_degree = 64;

/// Q_m from (m+1) Q_{m+1} = (2m + 1 - t) Q_m - m Q_{m-1}.
inline LaguerreQ laguerre_q(int m) {
    if (m < 0) throw DomainError("laguerre_q: m must be >= 0");
    if (m > max_laguerre_degree) throw OverflowError("laguerre_q: degree above 64");
    std::vector<BigRational> prev{BigRational(1)};
    if (m == 0) return {0, prev};
    std::vector<BigRational> cur{BigRational(1), BigRational(-1)};
    for (int j = 1; j < m; ++j) {
        std::vector<BigRational> next(static_cast<std::size_t>(j) + 2, BigRational(0));
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i] += BigRational(2 * j + 1) * cur[i];
            next[i + 1] -= cur[i];
        }
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= BigRational(j) * prev[i];
        for (auto& x : next) x /= BigRational(j + 1);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {m, cur};
}

/// Q_m by applying (d/dt - 1) to t^m m times and dividing by m!.
inline LaguerreQ laguerre_q_symbolic(int m) {
    if (m < 0) throw DomainError("laguerre_q_symbolic: m must be >= 0");
    if (m > max_laguerre_degree) throw OverflowError("laguerre_q_symbolic: degree above 64");
    std::vector<BigRational> p(static_cast<std::size_t>(m) + 1, BigRational(0));
    p[static_cast<std::size_t>(m)] = 1;
    for (int step = 0; step < m; ++step) {
        std::vector<BigRational> q(p.size(), BigRational(0));
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i] -= p[i];
            if (i > 0) q[i - 1] += BigRational(static_cast<long>(i)) * p[i];
        }
        p = std::move(q);
    }
    BigRational factorial(1);
    for (int j = 2; j <= m; ++j) factorial *= j;
    for (auto& x : p) x /= factorial;
    return {m, p};
}

inline BigRational evaluate_exact(const LaguerreQ& q, const BigRational& t) {
    BigRational acc(0);
    for (auto it = q.coefficients.rbegin(); it != q.coefficients.rend(); ++it) acc = acc * t + *it;
    return acc;
}

/// Q_m(t) in double precision via the three-term recurrence.
inline double laguerre_value(int m, double t) {
    double prev = 1.0;
    if (m == 0) return prev;
    double cur = 1.0 - t;
    for (int j = 1; j < m; ++j) {
        const double next = ((2 * j + 1 - t) * cur - j * prev) / (j + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

inline double evaluate(const LaguerreQ& q, double t) { return laguerre_value(q.m, t); }

enum class Scaling {
    Leading,  ///< Q_m(k r^2): argument of the leading kernel term
    UnitNorm  ///< Q_m(k r^2 / 2): Euclidean Landau-kernel convention
};

inline std::string to_string(Scaling s) { return s == Scaling::Leading ? "leading" : "unit_norm"; }

/// (k/2pi) e^{-k r^2 / 4} Q_m(argument).
inline double profile(int k, int m, double r, Scaling convention) {
    if (!(r >= 0.0)) throw DomainError("profile: r must be >= 0");
    const double kr2 = k * r * r;
    const double arg = convention == Scaling::Leading ? kr2 : 0.5 * kr2;
    return k / (2.0 * std::numbers::pi) * std::exp(-0.25 * kr2) * laguerre_value(m, arg);
}

/// 2 pi int_0^inf |profile|^2 r dr by adaptive Gauss-Kronrod.
inline double profile_mass(int k, int m, Scaling convention) {
    auto integrand = [&](double r) {
        const double p = profile(k, m, r, convention);
        return 2.0 * std::numbers::pi * p * p * r;
    };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-14, &error);
    if (!std::isfinite(value) || error > 1e-10 * std::abs(value))
        throw QuadratureError("profile_mass: quadrature did not converge");
    return value;
}

struct NormDiagnostic {
    int k;
    int m;
    double leading_mass;
    double unit_mass;
    double leading_ratio;  ///< leading_mass / (k/2pi)
    double unit_ratio;   ///< unit_mass / (k/2pi)
    bool leading_flagged;  ///< leading_ratio differs from 1 by more than 1e-6
};

inline NormDiagnostic norm_diagnostic(int k, int m) {
    if (k < 4) throw RangeError("norm_diagnostic: needs k >= 4");
    if (m < 0) throw DomainError("norm_diagnostic: m must be >= 0");
    const double target = k / (2.0 * std::numbers::pi);
    NormDiagnostic d{k, m, profile_mass(k, m, Scaling::Leading), profile_mass(k, m, Scaling::UnitNorm),
                     0.0, 0.0, false};
    d.leading_ratio = d.leading_mass / target;
    d.unit_ratio = d.unit_mass / target;
    d.leading_flagged = std::abs(d.leading_ratio - 1.0) > 1e-6;
    return d;
}

}  // namespace magflow
