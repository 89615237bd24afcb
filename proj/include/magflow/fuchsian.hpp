#pragma once

// A cocompact Fuchsian group given by side-pairing generators of a Dirichlet
// domain centered at the disk origin, with greedy reduction into that domain.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "magflow/errors.hpp"
#include "magflow/parallel.hpp"
#include "magflow/random.hpp"
#include "magflow/sl2.hpp"

namespace magflow {

class FuchsianGroup {
public:
    static constexpr int default_max_iters = 10000;

    FuchsianGroup(std::vector<GroupElement> generators, int genus,
                  int reduction_max_iters = default_max_iters)
        : generators_(std::move(generators)), genus_(genus), max_iters_(reduction_max_iters) {
        if (genus_ < 2) throw DomainError("FuchsianGroup: genus must be >= 2");
        if (generators_.size() != static_cast<std::size_t>(4 * genus_))
            throw DomainError("FuchsianGroup: expected 4*genus side-pairing generators");
        for (const auto& g : generators_) {
            if (std::abs(g.matrix().det() - 1.0) > 1e-12)
                throw DomainError("FuchsianGroup: generator is not unimodular");
            inverses_.push_back(g.inverse());
        }
        domain_radius_ = probe_domain_radius();
    }

    const std::vector<GroupElement>& generators() const { return generators_; }
    const std::vector<GroupElement>& inverses() const { return inverses_; }
    int genus() const { return genus_; }
    int reduction_max_iters() const { return max_iters_; }

    /// Largest hyperbolic distance from the origin to a point of the domain.
    double domain_radius() const { return domain_radius_; }

    /// True when no generator moves the base point of g closer to the origin.
    bool in_domain(const GroupElement& g) const {
        const double f2 = frob2(g.matrix());
        for (const auto& gen : generators_)
            if (frob2(gen.matrix() * g.matrix()) < f2 * (1.0 - 1e-13)) return false;
        return true;
    }

    /// gamma * g with gamma in the group, by greedy single-generator descent.
    GroupElement reduce(const GroupElement& g) const {
        Mat2 m = g.matrix();
        double f2 = frob2(m);
        for (int iter = 0;; ++iter) {
            if (iter >= max_iters_)
                throw ReductionError("reduce: no convergence within reduction_max_iters");
            int best = -1;
            double best_f2 = f2 * (1.0 - 1e-13);
            for (std::size_t i = 0; i < generators_.size(); ++i) {
                const double cand = frob2(generators_[i].matrix() * m);
                if (cand < best_f2) {
                    best_f2 = cand;
                    best = static_cast<int>(i);
                }
            }
            if (best < 0) break;
            m = generators_[static_cast<std::size_t>(best)].matrix() * m;
            f2 = best_f2;
            if (std::abs(m.det() - 1.0) > 1e-13) m = (1.0 / std::sqrt(m.det())) * m;
        }
        return GroupElement::from(m);
    }

    /// Text format: '#' comments, a line "genus N", then 4N lines of four
    /// row-major decimal entries.
    static FuchsianGroup parse(std::istream& in) {
        int genus = -1;
        std::vector<GroupElement> gens;
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string first;
            if (!(ls >> first)) continue;
            if (first == "genus") {
                if (!(ls >> genus)) throw ConfigError("group file: bad genus line");
                continue;
            }
            Mat2 m;
            try {
                m.a = std::stod(first);
            } catch (const std::exception&) {
                throw ConfigError("group file: unexpected token '" + first + "'");
            }
            if (!(ls >> m.b >> m.c >> m.d)) throw ConfigError("group file: matrix row needs 4 entries");
            gens.push_back(GroupElement::from(m));
        }
        if (genus < 0) throw ConfigError("group file: missing genus line");
        return FuchsianGroup(std::move(gens), genus);
    }

    static FuchsianGroup load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open group file " + path);
        return parse(in);
    }

private:
    static double frob2(const Mat2& m) { return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d; }

    double probe_domain_radius() const {
        constexpr int rays = 720;
        double radius = 0.0;
        for (int k = 0; k < rays; ++k) {
            const cplx dir = std::polar(1.0, 2.0 * std::numbers::pi * k / rays);
            double lo = 0.0, hi = 16.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (in_domain(frame_at(std::tanh(mid / 2.0) * dir, 0.0)))
                    lo = mid;
                else
                    hi = mid;
            }
            radius = std::max(radius, hi);
        }
        return radius;
    }

    std::vector<GroupElement> generators_;
    std::vector<GroupElement> inverses_;
    int genus_;
    int max_iters_;
    double domain_radius_ = 0.0;
};

inline GroupElement reduce(const GroupElement& g, const FuchsianGroup& group) { return group.reduce(g); }

/// The Bolza surface: side pairings of the regular octagon with interior
/// angles pi/4, [[1+sqrt2, sqrt(2+2sqrt2) e^{ik pi/4}], [.., ..]] in the disk.
inline FuchsianGroup bolza_group() {
    const double alpha = 1.0 + std::numbers::sqrt2;
    const double beta = std::sqrt(2.0 + 2.0 * std::numbers::sqrt2);
    std::vector<GroupElement> gens;
    for (int k = 0; k < 8; ++k)
        gens.push_back(from_disk(cplx(alpha, 0.0), std::polar(beta, k * std::numbers::pi / 4.0)));
    return FuchsianGroup(std::move(gens), 2);
}

/// deg L = 2B(g-1), which must be an integer.
inline long degree(double B, int genus) {
    const double x = 2.0 * B * (genus - 1);
    const double n = std::round(x);
    if (!std::isfinite(x) || std::abs(x - n) > 1e-9)
        throw IntegralityError("degree: 2B(g-1) = " + std::to_string(x) + " is not an integer");
    return static_cast<long>(n);
}

struct BundleData {
    double B;
    int k;
    int genus;

    BundleData(double strength, int power, int g) : B(strength), k(power), genus(g) {
        if (!(B > 0.0)) throw DomainError("BundleData: B must be positive");
        if (k < 1) throw DomainError("BundleData: k must be >= 1");
        (void)degree(B, genus);
    }
};

struct AreaEstimate {
    double area;
    double std_error;
    std::uint64_t accepted;
    std::uint64_t samples;
};

namespace detail {

// Uniform hyperbolic-area sample in the disk of hyperbolic radius R.
inline cplx sample_hyperbolic_disk(Rng& rng, double sinh_half_R) {
    const double r = 2.0 * std::asinh(sinh_half_R * std::sqrt(rng.uniform()));
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return std::polar(std::tanh(r / 2.0), phi);
}

constexpr std::uint64_t block_size = 1u << 15;

}  // namespace detail

/// Monte Carlo area of the Dirichlet domain: hits/samples times the area of a
/// covering hyperbolic disk. Fixed blocks with per-block seeds make the result
/// independent of the thread count.
inline AreaEstimate area_mc(const FuchsianGroup& group, std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw RangeError("area_mc: need at least 1000 samples");
    const double R = group.domain_radius() + 0.05;
    const double sinh_half = std::sinh(R / 2.0);
    const double disk_area = 4.0 * std::numbers::pi * sinh_half * sinh_half;
    const std::uint64_t blocks = (n_samples + detail::block_size - 1) / detail::block_size;
    std::vector<std::uint64_t> hits(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        Rng rng(task_seed(seed, b));
        const std::uint64_t begin = b * detail::block_size;
        const std::uint64_t end = std::min(n_samples, begin + detail::block_size);
        std::uint64_t h = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            const cplx z = detail::sample_hyperbolic_disk(rng, sinh_half);
            if (group.in_domain(frame_at(z, 0.0))) ++h;
        }
        hits[b] = h;
    });
    std::uint64_t accepted = 0;
    for (auto h : hits) accepted += h;
    if (accepted == 0) throw SamplingError("area_mc: no sample landed in the domain");
    const double p = static_cast<double>(accepted) / static_cast<double>(n_samples);
    return {disk_area * p, disk_area * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples)),
            accepted, n_samples};
}

}  // namespace magflow
