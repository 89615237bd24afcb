#pragma once

// The acceptance suite: eight end-to-end checks over all modules, shared by the
// `report` command and the acceptance test binary. Metrics and verdicts are
// deterministic in the config; wall times are recorded separately and never
// serialized into the report.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "magflow/coherent.hpp"
#include "magflow/ergodic.hpp"
#include "magflow/flows.hpp"
#include "magflow/fuchsian.hpp"
#include "magflow/io.hpp"
#include "magflow/parallel.hpp"
#include "magflow/random.hpp"
#include "magflow/sl2.hpp"
#include "magflow/spectrum.hpp"
#include "magflow/variational.hpp"

namespace magflow {

struct AcceptanceConfig {
    std::uint64_t seed = 20240611;
    double lambda1 = 3.8388;
    std::uint64_t n_samples = 1000000;
    double dt = 0.02;
};

inline json to_json(const AcceptanceConfig& c) {
    return json{{"seed", c.seed}, {"lambda1", c.lambda1}, {"n_samples", c.n_samples}, {"dt", c.dt}};
}

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    json metrics;
    double seconds = 0.0;
    double budget_seconds = 0.0;  ///< wall-time limit, checked by the test binary only
};

namespace acceptance {

inline CheckResult spectral_exactness() {
    CheckResult r{1, "spectral_exactness", false, {}, 0.0, 5.0};
    double weinstein = 0.0, bs = 0.0;
    long ladder_mismatch = 0, ladder_rows = 0, levels = 0;
    for (double B : {0.5, 1.0, 1.5}) {
        for (int k = 1; k <= 200; ++k) {
            const auto lv = landau_levels(k, B, 2);
            levels += static_cast<long>(lv.size());
            if (lv.empty()) continue;
            const auto w = weinstein_check(k, B, 2);
            weinstein = std::max({weinstein, w.action_residual, w.relation_residual});
            for (int m = 0; m + 1 < static_cast<int>(lv.size()); ++m)
                bs = std::max(bs, std::abs(bohr_sommerfeld_gap(k, B, m, 2).residual - 1.0 / k));
            const double Bk = k * B;
            const int m_max = static_cast<int>(std::floor(Bk - 2.0 + 1e-12));
            if (m_max < 0) continue;
            for (const auto& row : riemann_roch_ladder(Bk, 2, m_max)) {
                ++ladder_rows;
                const auto& level = lv[static_cast<std::size_t>(row.m)];
                if (row.h0 != row.closed_form || !level.multiplicity || *level.multiplicity != row.h0)
                    ++ladder_mismatch;
            }
        }
    }
    r.metrics = {{"levels", levels},
                 {"weinstein_max_residual", weinstein},
                 {"bohr_sommerfeld_max_deviation", bs},
                 {"ladder_rows", ladder_rows},
                 {"ladder_mismatches", ladder_mismatch}};
    r.pass = weinstein <= 1e-11 && bs <= 1e-10 && ladder_mismatch == 0 && ladder_rows > 0;
    return r;
}

inline CheckResult period_law(std::uint64_t seed) {
    CheckResult r{2, "period_law", false, {}, 0.0, 5.0};
    Rng rng(task_seed(seed, 2));
    double period = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double B = rng.uniform(0.25, 3.0);
        const double E = rng.uniform(0.0, 0.999) * 0.5 * B * B;
        period = std::max(period, period_residual(E, B));
    }
    double exp_err = 0.0;
    for (int i = 0; i < 500; ++i) {
        const AlgebraElement m{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double t = rng.uniform(-1, 1) * 50.0 / m.norm();
        const Mat2 ref = exp_reference_matrix(m, t);
        exp_err = std::max(exp_err, max_entry_distance(exp_sl2_matrix(m, t), ref) / std::max(1.0, ref.max_abs()));
    }
    r.metrics = {{"period_max_residual", period}, {"exp_max_relative_error", exp_err}};
    r.pass = period <= 1e-10 && exp_err <= 1e-10;
    return r;
}

inline CheckResult variational_oracle(std::uint64_t seed) {
    CheckResult r{3, "variational_oracle", false, {}, 0.0, 30.0};
    Rng rng(task_seed(seed, 3));
    double oracle = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Coefficients init{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double lambda = rng.uniform(0.0, 2.0), t = rng.uniform(0.0, 10.0);
        const auto exact = closed_form(init, lambda, 1.0, t).value;
        const auto rk = ode_oracle(init, lambda, 1.0, t, 1e-3).value;
        oracle = std::max(oracle, (exact - rk).max_abs() / std::max(1.0, exact.max_abs()));
    }
    json lyap = json::array();
    double lyap_worst = 0.0;
    const double sets[5][2] = {{1.0, 1.0}, {2.0, 1.0}, {0.625, 1.0}, {3.0, 2.0}, {0.5, 0.5}};  // (E, B)
    for (const auto& s : sets) {
        const double E = s[0], B = s[1], lambda = std::sqrt(2.0 * E);
        const double expected = std::sqrt(2.0 * E - B * B);
        const double est = lyapunov_estimate(lambda, B, 40.0);
        const double rel = std::abs(est - expected) / expected;
        lyap_worst = std::max(lyap_worst, rel);
        lyap.push_back({{"E", E}, {"B", B}, {"estimate", est}, {"expected", expected}, {"relative_error", rel}});
    }
    // Parabolic b(t) from the RK4 oracle, fitted to q t^2 by least squares.
    double parabolic = 0.0;
    for (double B : {0.5, 1.0, 2.0}) {
        double stt = 0.0, sbt = 0.0;
        std::vector<std::pair<double, double>> pts;
        for (int i = 1; i <= 20; ++i) {
            const double t = 0.5 * i;
            const double b = ode_oracle({0, 0, 0, 1}, B, B, t, 1e-3).value.b;
            pts.emplace_back(t, b);
            stt += t * t * t * t;
            sbt += b * t * t;
        }
        const double q = sbt / stt;
        double res = 0.0, scale = 0.0;
        for (auto [t, b] : pts) {
            res += (b - 0.5 * B * t * t) * (b - 0.5 * B * t * t);
            scale += 0.25 * B * B * t * t * t * t;
        }
        parabolic = std::max({parabolic, std::abs(q - 0.5 * B) / (0.5 * B), std::sqrt(res / scale)});
    }
    r.metrics = {{"oracle_max_relative_error", oracle},
                 {"lyapunov", lyap},
                 {"lyapunov_max_relative_error", lyap_worst},
                 {"parabolic_relative_residual", parabolic}};
    r.pass = oracle <= 1e-6 && lyap_worst <= 0.02 && parabolic < 1e-8;
    return r;
}

inline CheckResult critical_equidistribution(const FuchsianGroup& group, const AcceptanceConfig& cfg) {
    CheckResult r{4, "critical_equidistribution", false, {}, 0.0, thread_count() >= 8 ? 120.0 : 600.0};
    const auto suite = default_suite(group);
    std::vector<LiouvilleRef> refs;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto est = liouville_average(suite[i], group, cfg.n_samples, task_seed(cfg.seed, 40 + i));
        refs.push_back({est.mean, est.std_error});
    }
    const auto starts = scattered_starts(group, 8, cfg.seed);
    const double B = 1.0;
    const auto params = classify(0.5 * B * B, B);

    // One trajectory per start serves the decay grid and T = 2000.
    std::vector<double> horizons = log_grid(50.0, 5000.0, 7);
    horizons.push_back(2000.0);
    std::vector<std::vector<std::vector<cplx>>> traces(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        traces[s] = birkhoff_trace(suite, starts[s], params, horizons, cfg.dt, group);
    });

    json per_obs = json::array();
    bool ok = true;
    const double target = theta_target(cfg.lambda1);
    for (std::size_t o = 0; o < suite.size(); ++o) {
        std::vector<double> grid, disc;
        double at2000 = 0.0;
        for (std::size_t j = 0; j < horizons.size(); ++j) {
            double worst = 0.0;
            for (std::size_t s = 0; s < starts.size(); ++s)
                worst = std::max(worst, std::abs(traces[s][o][j] - refs[o].mean));
            if (j + 1 == horizons.size()) {
                at2000 = worst;
            } else {
                grid.push_back(horizons[j]);
                disc.push_back(worst);
            }
        }
        std::vector<double> lx, ly;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            lx.push_back(std::log(grid[j]));
            ly.push_back(std::log(disc[j]));
        }
        const double theta = -detail::fit_slope(lx, ly);
        const bool pass = at2000 <= 0.05 && theta >= 0.25 && theta <= 1.1;
        ok = ok && pass;
        per_obs.push_back({{"observable_id", suite[o].id()},
                           {"liouville_ref", to_json(refs[o].mean)},
                           {"stderr", refs[o].std_error},
                           {"discrepancy_T2000", at2000},
                           {"theta_hat", theta},
                           {"pass", pass}});
    }

    json harmonics = json::array();
    for (int n : {1, 2, 3}) {
        const auto h = Observable::harmonic(n, PoincareBump{GroupElement::identity(), 1.0, 4}, group,
                                            "harmonic" + std::to_string(n));
        const auto lio = liouville_average(h, group, 1000, cfg.seed);
        std::vector<double> vals(starts.size());
        parallel_for(starts.size(), [&](std::size_t s) {
            vals[s] = std::abs(birkhoff(h, starts[s], params, 2000.0, cfg.dt, group));
        });
        const double worst = *std::max_element(vals.begin(), vals.end());
        const bool pass = worst <= 0.02 && lio.mean == cplx(0.0, 0.0);
        ok = ok && pass;
        harmonics.push_back({{"n", n}, {"max_abs_birkhoff_T2000", worst}, {"pass", pass}});
    }
    r.metrics = {{"B", B},
                 {"E", params.E},
                 {"starts", starts.size()},
                 {"T_grid", std::vector<double>(horizons.begin(), horizons.end() - 1)},
                 {"theta_target", target},
                 {"observables", per_obs},
                 {"harmonics", harmonics}};
    r.pass = ok;
    return r;
}

inline CheckResult regime_separation(const FuchsianGroup& group, const AcceptanceConfig& cfg) {
    CheckResult r{5, "regime_separation", false, {}, 0.0, 300.0};
    const auto f = default_suite(group).front();
    const auto lio = liouville_average(f, group, cfg.n_samples, task_seed(cfg.seed, 50));

    const auto below = classify(0.25, 1.0);
    const double period = 2.0 * std::numbers::pi * *below.period;
    const double T = std::round(2000.0 / period) * period;
    const GroupElement z = group.reduce(frame_at({0.2, 0.15}, 0.4));
    const double birk = birkhoff(f, z, below, T, cfg.dt, group).real();
    const double orbit = orbit_average(f, z, below, 64).real();
    const double orbit_fine = orbit_average(f, z, below, 640).real();
    const double combined = lio.std_error + std::abs(orbit - orbit_fine);
    const double gap = std::abs(birk - lio.mean.real());

    const auto above = classify(1.0, 1.0);
    const auto starts = scattered_starts(group, 50, task_seed(cfg.seed, 51));
    std::vector<double> vals(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        vals[s] = birkhoff(f, starts[s], above, 2000.0, cfg.dt, group).real();
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(vals.size() - 1));

    r.metrics = {{"observable_id", f.id()},
                 {"liouville_ref", lio.mean.real()},
                 {"stderr", lio.std_error},
                 {"below", {{"E", below.E}, {"T", T}, {"birkhoff", birk}, {"orbit_average", orbit},
                            {"birkhoff_minus_orbit", std::abs(birk - orbit)},
                            {"gap_over_combined_error", gap / combined}}},
                 {"above", {{"E", above.E}, {"starts", vals.size()}, {"mean", mean}, {"std_dev", sd}}}};
    r.pass = std::abs(birk - orbit) <= 1e-6 && gap > 5.0 * combined && sd <= 0.1;
    return r;
}

inline CheckResult geometry(const FuchsianGroup& group, const AcceptanceConfig& cfg) {
    CheckResult r{6, "geometry", false, {}, 0.0, 30.0};
    const auto est = area_mc(group, cfg.n_samples, task_seed(cfg.seed, 6));
    const double target = 4.0 * std::numbers::pi * (group.genus() - 1);
    const long deg = degree(0.5, 2);
    const double z = std::abs(est.area - target) / est.std_error;
    r.metrics = {{"area", est.area},        {"std_error", est.std_error}, {"target", target},
                 {"z_score", z},            {"samples", est.samples},     {"accepted", est.accepted},
                 {"degree_half_genus2", deg}};
    r.pass = z <= 3.0 && deg == 1;
    return r;
}

inline CheckResult coherent_diagnostics() {
    CheckResult r{7, "coherent_diagnostics", false, {}, 0.0, 5.0};
    bool identities = true;
    for (int m = 0; m <= 8; ++m) {
        const auto q = laguerre_q(m);
        BigRational factorial(1);
        for (int j = 2; j <= m; ++j) factorial *= j;
        identities = identities && q.coefficients == laguerre_q_symbolic(m).coefficients &&
                     evaluate_exact(q, BigRational(0)) == 1 && q.degree() == m &&
                     q.coefficients.back() == BigRational(m % 2 ? -1 : 1) / factorial;
    }
    double unit_dev = 0.0;
    for (int k : {16, 64})
        for (int m = 0; m <= 5; ++m)
            unit_dev = std::max(unit_dev, std::abs(profile_mass(k, m, Scaling::UnitNorm) - k / (2.0 * std::numbers::pi)));
    json leading = json::array();
    bool leading_ok = true;
    for (int k : {16, 64}) {
        const auto d = norm_diagnostic(k, 1);
        const double dev = std::abs(d.leading_mass - 5.0 * k / (2.0 * std::numbers::pi));
        leading_ok = leading_ok && dev <= 1e-6 && d.leading_flagged;
        leading.push_back({{"k", k}, {"m", 1}, {"leading_mass", d.leading_mass}, {"leading_ratio", d.leading_ratio},
                           {"deviation_from_5k_over_2pi", dev}, {"flagged", d.leading_flagged}});
    }
    r.metrics = {{"laguerre_identities_exact", identities},
                 {"unit_norm_max_deviation", unit_dev},
                 {"leading_scaling_m1", leading}};
    r.pass = identities && unit_dev <= 1e-8 && leading_ok;
    return r;
}

template <class Fn>
CheckResult timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace acceptance

/// Checks 1 to 7.
inline std::vector<CheckResult> run_checks(const FuchsianGroup& group, const AcceptanceConfig& cfg) {
    using namespace acceptance;
    return {
        timed([&] { return spectral_exactness(); }),
        timed([&] { return period_law(cfg.seed); }),
        timed([&] { return variational_oracle(cfg.seed); }),
        timed([&] { return critical_equidistribution(group, cfg); }),
        timed([&] { return regime_separation(group, cfg); }),
        timed([&] { return geometry(group, cfg); }),
        timed([&] { return coherent_diagnostics(); }),
    };
}

inline json checks_json(const std::vector<CheckResult>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"metrics", c.metrics}});
    return out;
}

struct AcceptanceReport {
    std::vector<CheckResult> checks;  ///< 1 to 8
    json verdict;                     ///< timing-free
};

/// Runs checks 1 to 7 twice; check 8 passes when all of them pass and both
/// serializations are byte-identical.
inline AcceptanceReport run_acceptance(const FuchsianGroup& group, const AcceptanceConfig& cfg,
                                       const json& resolved_config) {
    const auto t0 = std::chrono::steady_clock::now();
    AcceptanceReport rep;
    rep.checks = run_checks(group, cfg);
    const std::string first = checks_json(rep.checks).dump();
    const std::string second = checks_json(run_checks(group, cfg)).dump();
    bool all = true;
    for (const auto& c : rep.checks) all = all && c.pass;
    CheckResult det{8, "determinism", all && first == second, {}, 0.0, 0.0};
    det.metrics = {{"checks_passed", all}, {"repeat_identical", first == second}, {"bytes", first.size()}};
    det.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    det.budget_seconds = std::numeric_limits<double>::infinity();
    rep.checks.push_back(det);
    bool pass = true;
    for (const auto& c : rep.checks) pass = pass && c.pass;
    rep.verdict = {{"command", "report"}, {"config", resolved_config}, {"checks", checks_json(rep.checks)},
                   {"pass", pass}};
    return rep;
}

}  // namespace magflow
