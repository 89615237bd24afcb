#pragma once

// Landau levels of the magnetic Laplacian on L^k over a genus-g surface,
// Riemann-Roch multiplicities, and the quantization maps relating the
// scaled levels to the classical action m/k.
//
// The curvature strength B is always rational here: integrality of
// deg L = 2B(g-1) gives B = deg / (2(g-1)), which the exact path uses.

#include <boost/rational.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magflow/errors.hpp"
#include "magflow/fuchsian.hpp"

namespace magflow {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

inline std::int64_t floor_of(const Rational& q) {
    const auto n = q.numerator(), d = q.denominator();  // d > 0
    return n >= 0 ? n / d : -((-n + d - 1) / d);
}

/// B as the exact rational deg / (2(g-1)); IntegralityError otherwise.
inline Rational exact_strength(double B, int genus) {
    if (!(B > 0.0)) throw DomainError("B must be positive");
    return Rational(degree(B, genus), 2 * (genus - 1));
}

struct LandauLevel {
    int k;
    int m;
    double value;   ///< eigenvalue lambda_{k,m} of Delta_k
    double scaled;  ///< k^{-2} lambda_{k,m}
    Rational exact_value;
    /// 2(g-1)(kB - 1/2 - m) when m <= floor(kB) - 2; not defined above that.
    std::optional<std::int64_t> multiplicity;
};

/// lambda_{k,m} = kB(m + 1/2) - m(m+1)/2 for 0 <= m < floor(kB). With
/// `exact_rational` the arithmetic is done in rationals and rounded last.
inline std::vector<LandauLevel> landau_levels(int k, double B, int genus, bool exact_rational = true) {
    if (k < 1) throw DomainError("landau_levels: k must be >= 1");
    const Rational Bq = exact_strength(B, genus);
    const Rational kB = Bq * Rational(k);
    const std::int64_t top = floor_of(kB);
    std::vector<LandauLevel> levels;
    levels.reserve(static_cast<std::size_t>(std::max<std::int64_t>(top, 0)));
    for (std::int64_t m = 0; m < top; ++m) {
        LandauLevel level;
        level.k = k;
        level.m = static_cast<int>(m);
        level.exact_value = kB * Rational(2 * m + 1, 2) - Rational(m * (m + 1), 2);
        if (exact_rational) {
            level.value = to_double(level.exact_value);
            level.scaled = to_double(level.exact_value / Rational(std::int64_t{k} * k));
        } else {
            const double kBd = k * B;
            const auto md = static_cast<double>(m);
            level.value = kBd * (md + 0.5) - md * (md + 1.0) / 2.0;
            level.scaled = level.value / (static_cast<double>(k) * k);
        }
        if (m <= top - 2) {
            const Rational mult = Rational(2 * (genus - 1)) * (kB - Rational(1, 2) - Rational(m));
            level.multiplicity = mult.numerator();  // integral: 2(g-1)kB = k deg
        }
        levels.push_back(level);
    }
    return levels;
}

/// beta, alpha = beta^{-1} and f_k.
struct QuantizationMaps {
    double B;
    int k;

    /// beta(s) = Bs - s^2/2 on [0, B].
    double beta(double s) const { return B * s - 0.5 * s * s; }
    /// alpha(y) = B - sqrt(B^2 - 2y) on [0, B^2/2].
    double alpha(double y) const { return B - std::sqrt(std::max(0.0, B * B - 2.0 * y)); }
    /// alpha'(E) = (B^2 - 2E)^{-1/2}, the classical period.
    double alpha_prime(double y) const { return 1.0 / std::sqrt(B * B - 2.0 * y); }
    /// f_k(s) = B - 1/(2k) - sqrt(B^2 - 2s + 1/(4k^2)).
    double f(double s) const {
        const double inv_k = 1.0 / k;
        return B - 0.5 * inv_k - std::sqrt(B * B - 2.0 * s + 0.25 * inv_k * inv_k);
    }
};

struct WeinsteinResiduals {
    double action_residual;    ///< max_m |f_k(k^{-2} lambda_{k,m}) - m/k|
    double relation_residual;  ///< max_m |k^{-2} lambda - (B(m/k + 1/2k) - (m/k)(m/k + 1/k)/2)|
    int levels;
};

inline WeinsteinResiduals weinstein_check(int k, double B, int genus = 2) {
    const auto levels = landau_levels(k, B, genus);
    if (levels.empty()) throw RangeError("weinstein_check: no Landau levels below critical energy");
    const QuantizationMaps maps{B, k};
    WeinsteinResiduals r{0.0, 0.0, static_cast<int>(levels.size())};
    for (const auto& level : levels) {
        const double a = static_cast<double>(level.m) / k;
        const double inv_k = 1.0 / k;
        r.action_residual = std::max(r.action_residual, std::abs(maps.f(level.scaled) - a));
        const double rhs = B * (a + 0.5 * inv_k) - 0.5 * a * (a + inv_k);
        r.relation_residual = std::max(r.relation_residual, std::abs(level.scaled - rhs));
    }
    return r;
}

struct BohrSommerfeldGap {
    double spacing;          ///< k^{-1}(lambda_{k,m+1} - lambda_{k,m})
    double inverse_period;   ///< sqrt(B^2 - 2 beta(m/k))
    double residual;         ///< inverse_period - spacing, equal to 1/k
};

inline BohrSommerfeldGap bohr_sommerfeld_gap(int k, double B, int m, int genus = 2) {
    const auto levels = landau_levels(k, B, genus);
    if (m < 0 || static_cast<std::size_t>(m) + 1 >= levels.size())
        throw IndexError("bohr_sommerfeld_gap: need 0 <= m and m + 1 < floor(kB)");
    const QuantizationMaps maps{B, k};
    BohrSommerfeldGap g;
    g.spacing = to_double((levels[m + 1].exact_value - levels[m].exact_value) / Rational(k));
    g.inverse_period = std::sqrt(B * B - 2.0 * maps.beta(static_cast<double>(m) / k));
    g.residual = g.inverse_period - g.spacing;
    return g;
}

struct LadderEntry {
    int m;
    std::int64_t h0;           ///< (Bk - m) 2(g-1) + 1 - g
    std::int64_t closed_form;  ///< 2(g-1)(Bk - 1/2 - m)
};

/// Riemann-Roch dimensions h^0(L^k (x) K^{-m}) for m <= m_max, with the
/// Landau multiplicity formula alongside. Needs Bk - m >= 2 throughout.
inline std::vector<LadderEntry> riemann_roch_ladder(double Bk, int genus, int m_max) {
    if (genus < 2) throw DomainError("riemann_roch_ladder: genus must be >= 2");
    const std::int64_t two_g1 = 2 * (genus - 1);
    const double scaled = Bk * static_cast<double>(two_g1);
    if (std::abs(scaled - std::round(scaled)) > 1e-9)
        throw IntegralityError("riemann_roch_ladder: 2(g-1)Bk must be an integer");
    const Rational bk(static_cast<std::int64_t>(std::llround(scaled)), two_g1);
    std::vector<LadderEntry> out;
    for (int m = 0; m <= m_max; ++m) {
        const Rational excess = bk - Rational(m);
        if (excess < Rational(2))
            throw RangeError("riemann_roch_ladder: Bk - m = " + std::to_string(to_double(excess)) +
                             " < 2 at m = " + std::to_string(m));
        const Rational h0 = excess * Rational(two_g1) + Rational(1 - genus);
        const Rational closed = Rational(two_g1) * (excess - Rational(1, 2));
        out.push_back({m, h0.numerator(), closed.numerator()});
        if (h0.denominator() != 1 || closed.denominator() != 1)
            throw IntegralityError("riemann_roch_ladder: non-integral dimension");
    }
    return out;
}

struct CriticalApproach {
    int k;
    double scaled_top;  ///< k^{-2} lambda_{k, floor(kB) - 1}
    double gap;         ///< |scaled_top - E_c|
};

inline std::vector<CriticalApproach> critical_approach(double B, const std::vector<int>& k_list,
                                                       int genus = 2) {
    std::vector<CriticalApproach> out;
    const double Ec = 0.5 * B * B;
    for (int k : k_list) {
        const auto levels = landau_levels(k, B, genus);
        if (levels.empty()) throw RangeError("critical_approach: floor(kB) must be >= 1");
        const double top = levels.back().scaled;
        out.push_back({k, top, std::abs(top - Ec)});
    }
    return out;
}

/// For L = K^r the levels above m = r continue as lambda_r + mu_n / 2 with
/// mu_n the Laplace-Beltrami spectrum, which is not computed here; only the
/// anchor lambda_r is evaluated.
struct CanonicalPowerTail {
    int r;
    double lambda_r;
    std::string statement;
};

inline CanonicalPowerTail canonical_power_tail(int r) {
    if (r < 1) throw DomainError("canonical_power_tail: r must be >= 1");
    // K^r has B = r; lambda_r = r(r + 1/2) - r(r+1)/2 = r^2/2.
    const double lambda_r = 0.5 * static_cast<double>(r) * r;
    return {r, lambda_r,
            "lambda_{r+n} = lambda_r + mu_n/2, mu_n = spectrum of the Laplace-Beltrami operator"};
}

}  // namespace magflow
