#pragma once

// Observables on the frame bundle of the surface and their averages: Liouville
// (Monte Carlo over domain x fiber), Birkhoff along the magnetic flow, and the
// exact orbit average below the critical energy.
//
// A Poincare bump centered at the frame c is
//
//   f(g) = sum_{gamma} exp(-(|c^{-1} gamma g|_F^2 - 2) / w^2),
//
// summed over distinct group words of length <= word_len. Since
// |h|_F^2 = 2 cosh d(o, h o) for unimodular h, each term depends only on the
// distance between the base points of c and gamma g, and equals 1 when they
// coincide. A fiber harmonic of order n multiplies each term by
// exp(i n angle(c^{-1} gamma g)), the frame angle read in the disk chart.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magflow/errors.hpp"
#include "magflow/flows.hpp"
#include "magflow/fuchsian.hpp"
#include "magflow/parallel.hpp"
#include "magflow/quadrature.hpp"
#include "magflow/random.hpp"
#include "magflow/sl2.hpp"
#include "magflow/variational.hpp"

namespace magflow {

/// Distinct group elements given by words of length <= max_len in the
/// generators, shortest first.
inline std::vector<GroupElement> enumerate_words(const FuchsianGroup& group, int max_len) {
    const auto& gens = group.generators();
    const std::size_t ng = gens.size();
    // inverse_of[i] = j when gens[j] = gens[i]^{-1}
    std::vector<int> inverse_of(ng, -1);
    for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ng; ++j)
            if (pdist(gens[j], group.inverses()[i]) < 1e-9) inverse_of[i] = static_cast<int>(j);

    struct Word {
        GroupElement g;
        int last;
    };
    std::vector<Word> frontier{{GroupElement::identity(), -1}};
    std::vector<GroupElement> all{GroupElement::identity()};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Word> next;
        next.reserve(frontier.size() * ng);
        for (const auto& w : frontier)
            for (std::size_t j = 0; j < ng; ++j) {
                if (w.last >= 0 && inverse_of[static_cast<std::size_t>(w.last)] == static_cast<int>(j))
                    continue;
                next.push_back({w.g * gens[j], static_cast<int>(j)});
            }
        for (const auto& w : next) all.push_back(w.g);
        frontier = std::move(next);
    }
    // Dedupe in canonical form: sort by m11 and compare within a window.
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return all[x].m11() < all[y].m11(); });
    std::vector<bool> keep(all.size(), true);
    for (std::size_t a = 0; a < order.size(); ++a) {
        if (!keep[order[a]]) continue;
        const auto& ga = all[order[a]];
        const double tol = 1e-9 * std::max(1.0, ga.matrix().max_abs());
        for (std::size_t b = a + 1; b < order.size() && all[order[b]].m11() - ga.m11() <= tol; ++b) {
            const std::size_t ib = order[b];
            if (!keep[ib]) continue;
            if (max_entry_distance(ga.matrix(), all[ib].matrix()) <= tol) {
                // keep the earlier (shorter) word
                if (ib < order[a]) {
                    keep[order[a]] = false;
                    break;
                }
                keep[ib] = false;
            }
        }
    }
    std::vector<GroupElement> out;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (keep[i]) out.push_back(all[i]);
    return out;
}

struct PoincareBump {
    GroupElement center;
    double width = 0.5;
    int word_len = 4;
};

namespace detail {

// Precomputed c^{-1} gamma, sorted by the distance from the origin to
// gamma^{-1} c o, so evaluation can stop once terms are negligible.
class BumpTable {
public:
    BumpTable(const PoincareBump& spec, const FuchsianGroup& group) : spec_(spec) {
        if (!(spec.width >= 0.05 && spec.width <= 2.0))
            throw DomainError("poincare_bump: width must lie in [0.05, 2]");
        if (spec.word_len < 0 || spec.word_len > 5)
            throw DomainError("poincare_bump: word_len must lie in [0, 5]");
        const GroupElement cinv = spec.center.inverse();
        for (const auto& gamma : enumerate_words(group, spec.word_len)) {
            const Mat2 w = (cinv * gamma).matrix();
            entries_.push_back({w, dist_from_origin(w)});
        }
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& x, const Entry& y) { return x.origin_dist < y.origin_dist; });
        inv_w2_ = 1.0 / (spec.width * spec.width);
        cutoff_dist_ = std::acosh(1.0 + 0.5 * max_exponent * spec.width * spec.width);
    }

    const PoincareBump& spec() const { return spec_; }
    std::size_t size() const { return entries_.size(); }

    /// Sum of exp(-u/w^2) * exp(i n angle) over words; harmonic 0 gives a real sum.
    cplx evaluate(const Mat2& g, int harmonic) const {
        const double reach = dist_from_origin(g) + cutoff_dist_;
        double re = 0.0, im = 0.0;
        for (const auto& e : entries_) {
            if (e.origin_dist > reach) break;
            const Mat2 h = e.w * g;
            const double u = h.a * h.a + h.b * h.b + h.c * h.c + h.d * h.d - 2.0;
            const double x = u * inv_w2_;
            if (x > max_exponent) continue;
            const double weight = std::exp(-x);
            if (harmonic == 0) {
                re += weight;
            } else {
                const double angle = harmonic * frame_angle(h);
                re += weight * std::cos(angle);
                im += weight * std::sin(angle);
            }
        }
        return {re, im};
    }

private:
    static constexpr double max_exponent = 50.0;

    struct Entry {
        Mat2 w;
        double origin_dist;
    };

    PoincareBump spec_;
    std::vector<Entry> entries_;
    double inv_w2_ = 1.0;
    double cutoff_dist_ = 0.0;
};

}  // namespace detail

/// A smooth automorphic test function on the frame bundle.
class Observable {
public:
    enum class Kind { Constant, Bump, Harmonic, Product };

    static Observable constant(double value = 1.0, std::string id = "constant") {
        Observable o;
        o.kind_ = Kind::Constant;
        o.value_ = value;
        o.id_ = std::move(id);
        return o;
    }

    static Observable bump(const PoincareBump& spec, const FuchsianGroup& group, std::string id = "bump") {
        Observable o;
        o.kind_ = Kind::Bump;
        o.table_ = std::make_shared<const detail::BumpTable>(spec, group);
        o.id_ = std::move(id);
        return o;
    }

    /// Order-n fiber harmonic with a bump radial part. Without one the radial
    /// part is constant and the harmonic is read in the disk chart directly;
    /// that variant is not automorphic and is meant for liouville/orbit checks.
    static Observable harmonic(int n, const std::optional<PoincareBump>& radial,
                               const FuchsianGroup& group, std::string id = "harmonic") {
        Observable o;
        o.kind_ = Kind::Harmonic;
        o.harmonic_ = n;
        if (radial) o.table_ = std::make_shared<const detail::BumpTable>(*radial, group);
        o.id_ = std::move(id);
        return o;
    }

    static Observable product(const Observable& x, const Observable& y, std::string id = "product") {
        Observable o;
        o.kind_ = Kind::Product;
        o.factors_ = std::make_shared<const std::pair<Observable, Observable>>(x, y);
        o.id_ = std::move(id);
        return o;
    }

    Kind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    int harmonic_order() const { return harmonic_; }
    bool has_radial() const { return table_ != nullptr; }

    /// Total fiber frequency; the Liouville average vanishes when it is nonzero.
    int fiber_frequency() const {
        if (kind_ == Kind::Harmonic) return harmonic_;
        if (kind_ == Kind::Product) return factors_->first.fiber_frequency() + factors_->second.fiber_frequency();
        return 0;
    }

    bool fiber_independent() const {
        switch (kind_) {
            case Kind::Constant:
            case Kind::Bump: return true;
            case Kind::Harmonic: return harmonic_ == 0;
            case Kind::Product:
                return factors_->first.fiber_independent() && factors_->second.fiber_independent();
        }
        return false;
    }

    cplx operator()(const Mat2& g) const {
        switch (kind_) {
            case Kind::Constant: return {value_, 0.0};
            case Kind::Bump: return table_->evaluate(g, 0);
            case Kind::Harmonic:
                if (table_) return table_->evaluate(g, harmonic_);
                return std::polar(1.0, harmonic_ * frame_angle(g));
            case Kind::Product: return factors_->first(g) * factors_->second(g);
        }
        return {};
    }
    cplx operator()(const GroupElement& g) const { return (*this)(g.matrix()); }

    /// Radial part only (harmonic factors replaced by their modulus-free bump).
    cplx radial(const Mat2& g) const {
        switch (kind_) {
            case Kind::Constant: return {value_, 0.0};
            case Kind::Bump: return table_->evaluate(g, 0);
            case Kind::Harmonic: return table_ ? table_->evaluate(g, 0) : cplx(1.0, 0.0);
            case Kind::Product: return factors_->first.radial(g) * factors_->second.radial(g);
        }
        return {};
    }

private:
    Kind kind_ = Kind::Constant;
    double value_ = 1.0;
    int harmonic_ = 0;
    std::shared_ptr<const detail::BumpTable> table_;
    std::shared_ptr<const std::pair<Observable, Observable>> factors_;
    std::string id_;
};

inline Observable poincare_bump(const GroupElement& center, double width, int word_len,
                                const FuchsianGroup& group, std::string id = "bump") {
    return Observable::bump({center, width, word_len}, group, std::move(id));
}

/// max over generators of |f(gamma g) - f(g)|.
inline double invariance_defect(const Observable& f, const GroupElement& g, const FuchsianGroup& group) {
    const cplx base = f(g);
    double worst = 0.0;
    for (const auto& gamma : group.generators()) worst = std::max(worst, std::abs(f(gamma * g) - base));
    return worst;
}

struct LiouvilleEstimate {
    cplx mean;
    double std_error;
    std::uint64_t accepted;
};

/// Monte Carlo over (Dirichlet domain, uniform area) x (uniform fiber angle).
/// Observables with nonzero fiber frequency integrate to 0 over each fiber and
/// are returned as exactly 0; their standard error is that of the radial part.
inline LiouvilleEstimate liouville_average(const Observable& f, const FuchsianGroup& group,
                                           std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw RangeError("liouville_average: need at least 1000 samples");
    if (f.kind() == Observable::Kind::Constant) return {f(Mat2::identity()), 0.0, n_samples};
    const bool vanishing = f.fiber_frequency() != 0;
    const double R = group.domain_radius() + 0.05;
    const double sinh_half = std::sinh(R / 2.0);
    const std::uint64_t blocks = (n_samples + detail::block_size - 1) / detail::block_size;
    struct Partial {
        std::uint64_t count = 0;
        cplx sum{};
        double sum_sq = 0.0;
    };
    std::vector<Partial> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        Rng rng(task_seed(seed, b));
        const std::uint64_t begin = b * detail::block_size;
        const std::uint64_t end = std::min(n_samples, begin + detail::block_size);
        Partial acc;
        for (std::uint64_t i = begin; i < end; ++i) {
            const cplx z = detail::sample_hyperbolic_disk(rng, sinh_half);
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            const GroupElement g = frame_at(z, 0.0);
            if (!group.in_domain(g)) continue;
            const Mat2 frame = (g * exp_sl2(algebra::V(), theta)).matrix();
            const cplx v = vanishing ? f.radial(frame) : f(frame);
            ++acc.count;
            acc.sum += v;
            acc.sum_sq += std::norm(v);
        }
        partial[b] = acc;
    });
    Partial total;
    for (const auto& p : partial) {
        total.count += p.count;
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
    }
    if (total.count == 0) throw SamplingError("liouville_average: no sample landed in the domain");
    const auto n = static_cast<double>(total.count);
    const cplx mean = total.sum / n;
    const double var = std::max(0.0, total.sum_sq / n - std::norm(mean));
    const double se = total.count > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return {vanishing ? cplx(0.0, 0.0) : mean, se, total.count};
}

namespace detail {

// Number of steps of size close to dt covering T.
inline std::int64_t step_count(double T, double dt) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(T / dt - 1e-9)));
}

}  // namespace detail

/// Trapezoid-rule time average of f along the magnetic flow from `start` over
/// [0, T] with the step adjusted to divide T. Stepping is exact; the
/// representative is reduced about once per unit time.
inline cplx birkhoff(const Observable& f, const GroupElement& start, const MagneticParams& params,
                     double T, double dt, const FuchsianGroup& group) {
    if (!(dt > 0.0) || dt > 0.05) throw DomainError("birkhoff: need 0 < dt <= 0.05");
    if (!(T >= 1.0)) throw DomainError("birkhoff: need T >= 1");
    const std::int64_t n = detail::step_count(T, dt);
    const double h = T / static_cast<double>(n);
    const Mat2 step = exp_sl2(magnetic_generator(params), h).matrix();
    const auto reduce_stride = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(1.0 / h)));
    GroupElement g = group.reduce(start);
    cplx sum = 0.5 * f(g);
    for (std::int64_t i = 1; i <= n; ++i) {
        Mat2 m = g.matrix() * step;
        g = (i % reduce_stride == 0) ? group.reduce(GroupElement::from(m)) : GroupElement::from(m);
        sum += (i == n ? 0.5 : 1.0) * f(g);
    }
    return sum / static_cast<double>(n);  // h / T = 1 / n
}

/// Birkhoff averages of several observables at several horizons from one
/// trajectory with fixed step dt; each horizon is rounded to a multiple of dt.
/// result[obs][j] is the average over [0, horizons[j]].
inline std::vector<std::vector<cplx>> birkhoff_trace(const std::vector<Observable>& suite,
                                                     const GroupElement& start,
                                                     const MagneticParams& params,
                                                     const std::vector<double>& horizons, double dt,
                                                     const FuchsianGroup& group) {
    if (!(dt > 0.0) || dt > 0.05) throw DomainError("birkhoff_trace: need 0 < dt <= 0.05");
    std::vector<std::int64_t> marks;
    for (double T : horizons) {
        if (!(T >= 1.0)) throw DomainError("birkhoff_trace: horizons must be >= 1");
        marks.push_back(std::max<std::int64_t>(1, std::llround(T / dt)));
    }
    const std::int64_t n_max = *std::max_element(marks.begin(), marks.end());
    const Mat2 step = exp_sl2(magnetic_generator(params), dt).matrix();
    const auto reduce_stride = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(1.0 / dt)));
    const std::size_t nobs = suite.size();
    std::vector<cplx> running(nobs), first(nobs);
    std::vector<std::vector<cplx>> out(nobs, std::vector<cplx>(horizons.size()));
    GroupElement g = group.reduce(start);
    for (std::size_t o = 0; o < nobs; ++o) first[o] = running[o] = suite[o](g);
    for (std::int64_t i = 1; i <= n_max; ++i) {
        Mat2 m = g.matrix() * step;
        g = (i % reduce_stride == 0) ? group.reduce(GroupElement::from(m)) : GroupElement::from(m);
        for (std::size_t o = 0; o < nobs; ++o) {
            const cplx v = suite[o](g);
            running[o] += v;
            for (std::size_t j = 0; j < marks.size(); ++j)
                if (marks[j] == i)
                    out[o][j] = (running[o] - 0.5 * (first[o] + v)) / static_cast<double>(i);
        }
    }
    return out;
}

/// Largest theta < 1/2 allowed by theta(1 - theta) <= lambda1.
inline double theta_target(double lambda1) {
    if (!(lambda1 > 0.0)) throw DomainError("theta_target: lambda1 must be > 0");
    if (lambda1 >= 0.25) return 0.5 - 1e-6;
    return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * lambda1));
}

struct BirkhoffReport {
    std::string observable_id;
    double E = 0.0;
    double B = 1.0;
    std::vector<double> T_grid;
    std::vector<double> discrepancy;  ///< sup over starts of |Birkhoff - Liouville|
    std::optional<double> theta_hat;  ///< empty when the fit is skipped
    double theta_target = 0.0;
    cplx liouville_ref{};
    double std_error = 0.0;
};

/// Log-spaced horizons from T_min to T_max inclusive.
inline std::vector<double> log_grid(double T_min, double T_max, int points) {
    if (points < 2 || !(T_min > 0.0) || !(T_max > T_min)) throw DomainError("log_grid: bad range");
    std::vector<double> out;
    for (int i = 0; i < points; ++i)
        out.push_back(T_min * std::pow(T_max / T_min, static_cast<double>(i) / (points - 1)));
    return out;
}

struct LiouvilleRef {
    cplx mean;
    double std_error;
};

/// Sup-over-starts discrepancy at the critical energy for each observable,
/// with a log-log least-squares fit of discrepancy ~ C T^{-theta_hat}.
inline std::vector<BirkhoffReport> decay_curve(const std::vector<Observable>& suite,
                                               const std::vector<LiouvilleRef>& refs,
                                               const std::vector<GroupElement>& starts, double B,
                                               const std::vector<double>& T_grid, double dt,
                                               const FuchsianGroup& group, double lambda1) {
    if (refs.size() != suite.size()) throw DomainError("decay_curve: one Liouville reference per observable");
    if (starts.size() < 5) throw RangeError("decay_curve: need at least 5 starts");
    if (T_grid.size() < 4) throw FitError("decay_curve: need at least 4 grid points");
    const auto [lo, hi] = std::minmax_element(T_grid.begin(), T_grid.end());
    if (std::log10(*hi / *lo) < 1.5 - 1e-9) throw RangeError("decay_curve: T_grid must span 1.5 decades");
    const MagneticParams params = classify(0.5 * B * B, B);

    std::vector<std::vector<std::vector<cplx>>> traces(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        traces[s] = birkhoff_trace(suite, starts[s], params, T_grid, dt, group);
    });

    std::vector<BirkhoffReport> reports;
    for (std::size_t o = 0; o < suite.size(); ++o) {
        BirkhoffReport r;
        r.observable_id = suite[o].id();
        r.E = params.E;
        r.B = B;
        r.theta_target = theta_target(lambda1);
        r.liouville_ref = refs[o].mean;
        r.std_error = refs[o].std_error;
        for (std::size_t j = 0; j < T_grid.size(); ++j) {
            r.T_grid.push_back(static_cast<double>(std::llround(T_grid[j] / dt)) * dt);
            double worst = 0.0;
            for (std::size_t s = 0; s < starts.size(); ++s)
                worst = std::max(worst, std::abs(traces[s][o][j] - refs[o].mean));
            r.discrepancy.push_back(worst);
        }
        const double largest = *std::max_element(r.discrepancy.begin(), r.discrepancy.end());
        if (largest > 1e-12) {
            std::vector<double> x, y;
            for (std::size_t j = 0; j < r.T_grid.size(); ++j) {
                x.push_back(std::log(r.T_grid[j]));
                y.push_back(std::log(std::max(r.discrepancy[j], 1e-300)));
            }
            r.theta_hat = -detail::fit_slope(x, y);
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

/// Mean-of-suite fit: log of the largest discrepancy across observables.
inline std::optional<double> combined_theta(const std::vector<BirkhoffReport>& reports) {
    if (reports.empty()) return std::nullopt;
    std::vector<double> x, y;
    for (std::size_t j = 0; j < reports.front().T_grid.size(); ++j) {
        double worst = 0.0;
        for (const auto& r : reports) worst = std::max(worst, r.discrepancy[j]);
        if (worst <= 1e-12) return std::nullopt;
        x.push_back(std::log(reports.front().T_grid[j]));
        y.push_back(std::log(worst));
    }
    return -detail::fit_slope(x, y);
}

/// (1 / 2 pi T_E) int_0^{2 pi T_E} f(z exp(t M)) dt by Gauss-Legendre over one
/// exact period, evaluated on the unreduced orbit.
inline cplx orbit_average(const Observable& f, const GroupElement& z, const MagneticParams& params,
                          int nodes = 64) {
    if (params.regime != Regime::Elliptic)
        throw RegimeError("orbit_average: orbits are periodic only below the critical energy");
    const double period = 2.0 * std::numbers::pi * *params.period;
    const auto rule = gauss_legendre(nodes);
    const AlgebraElement m = magnetic_generator(params);
    cplx acc{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = 0.5 * period * (rule.nodes[i] + 1.0);
        acc += rule.weights[i] * f(z.matrix() * exp_sl2_matrix(m, t));
    }
    return 0.5 * acc;
}

/// Orbit average of a potential pulled back from the surface.
inline double averaged_potential(const Observable& V, const GroupElement& z, double E, double B,
                                 int nodes = 64) {
    if (!V.fiber_independent())
        throw DomainError("averaged_potential: the potential must not depend on the fiber");
    const MagneticParams params = classify(E, B);
    return orbit_average(V, z, params, nodes).real();
}

/// |<V>(z exp(sM)) - <V>(z)|.
inline double drift_invariance(const Observable& V, const GroupElement& z, double E, double B, double s,
                               int nodes = 64) {
    const MagneticParams params = classify(E, B);
    const GroupElement moved = z * exp_sl2(magnetic_generator(params), s);
    return std::abs(averaged_potential(V, moved, E, B, nodes) - averaged_potential(V, z, E, B, nodes));
}

/// Five automorphic observables used by the equidistribution experiments:
/// three bumps, a first-order fiber harmonic and a bump x second harmonic.
inline std::vector<Observable> default_suite(const FuchsianGroup& group) {
    const double pi = std::numbers::pi;
    // length-4 words leave invariance defects up to 1e-2 for off-center w = 1 bumps
    auto bump = [](const GroupElement& c, double w) { return PoincareBump{c, w, 5}; };
    return {
        Observable::bump(bump(GroupElement::identity(), 0.8), group, "bump_origin"),
        Observable::bump(bump(frame_at({0.3, 0.2}, 0.7), 0.6), group, "bump_a"),
        Observable::bump(bump(frame_at(std::polar(0.5, pi / 8.0), 0.0), 1.0), group, "bump_b"),
        Observable::harmonic(1, bump(frame_at({-0.2, 0.1}, 1.3), 0.8), group, "harmonic1_c"),
        Observable::product(Observable::bump(bump(GroupElement::identity(), 0.8), group),
                            Observable::harmonic(2, bump(frame_at({0.1, -0.3}, 0.0), 1.0), group),
                            "bump_x_harmonic2"),
    };
}

/// Reduced frames with base points uniform (in Euclidean area) in |z| < 0.9
/// and uniform angles, drawn from a stream split off `seed`.
inline std::vector<GroupElement> scattered_starts(const FuchsianGroup& group, std::size_t count,
                                                  std::uint64_t seed) {
    Rng rng(task_seed(seed, 0x5717));
    std::vector<GroupElement> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = 0.9 * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        out.push_back(group.reduce(frame_at(std::polar(r, phi), theta)));
    }
    return out;
}

}  // namespace magflow
