// Command-line front end: spectrum, orbit, birkhoff, decay, variational, area,
// coherent and report. Flags override the --config JSON file, which overrides
// the built-in defaults; the resolved config is embedded in every output.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magflow/acceptance.hpp"
#include "magflow/coherent.hpp"
#include "magflow/ergodic.hpp"
#include "magflow/flows.hpp"
#include "magflow/fuchsian.hpp"
#include "magflow/io.hpp"
#include "magflow/spectrum.hpp"
#include "magflow/variational.hpp"

namespace {

using namespace magflow;

struct RunConfig {
    std::string command;
    double B = 1.0;
    double E = 0.5;
    int k = 10;
    std::vector<int> k_list;
    double T = 2000.0;
    double dt = 0.02;
    std::string T_grid = "log:50:5000:7";
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 20240611;
    std::optional<std::string> output;
    std::string format = "csv";
    bool exact_rational = true;
    double lambda1 = 3.8388;
    std::optional<std::string> group;
    std::optional<double> periods;
    int m = 0;
    std::string init = "1,1,1,1";
    int starts = 8;
};

json to_json(const RunConfig& c) {
    return json{{"command", c.command},
                {"B", c.B},
                {"E", c.E},
                {"k", c.k},
                {"k_list", c.k_list},
                {"T", c.T},
                {"dt", c.dt},
                {"T_grid", c.T_grid},
                {"n_samples", c.n_samples},
                {"seed", c.seed},
                {"output", optional_json(c.output)},
                {"format", c.format},
                {"exact_rational", c.exact_rational},
                {"lambda1", c.lambda1},
                {"group", optional_json(c.group)},
                {"periods", optional_json(c.periods)},
                {"m", c.m},
                {"init", c.init},
                {"starts", c.starts}};
}

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    take(j, key, v);
    dst = v;
}

void apply_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    static const std::vector<std::string> known = {
        "command", "B", "E", "k", "k_list", "T", "dt", "T_grid", "n_samples", "seed", "output",
        "format", "exact_rational", "lambda1", "group", "periods", "m", "init", "starts"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
    take(j, "B", c.B);
    take(j, "E", c.E);
    take(j, "k", c.k);
    take(j, "k_list", c.k_list);
    take(j, "T", c.T);
    take(j, "dt", c.dt);
    take(j, "T_grid", c.T_grid);
    take(j, "n_samples", c.n_samples);
    take(j, "seed", c.seed);
    take(j, "output", c.output);
    take(j, "format", c.format);
    take(j, "exact_rational", c.exact_rational);
    take(j, "lambda1", c.lambda1);
    take(j, "group", c.group);
    take(j, "periods", c.periods);
    take(j, "m", c.m);
    take(j, "init", c.init);
    take(j, "starts", c.starts);
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad number in ") + what + ": '" + item + "'");
        }
    }
    return out;
}

/// "log:min:max:n" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
    if (text.rfind("log:", 0) == 0) {
        std::string rest = text.substr(4);
        std::replace(rest.begin(), rest.end(), ':', ',');
        const auto v = parse_doubles(rest, "T_grid");
        if (v.size() != 3 || v[2] != std::floor(v[2])) throw ConfigError("T_grid: expected log:min:max:n");
        return log_grid(v[0], v[1], static_cast<int>(v[2]));
    }
    return parse_doubles(text, "T_grid");
}

void validate(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
    if (!std::isfinite(c.B) || !std::isfinite(c.E) || !std::isfinite(c.T) || !std::isfinite(c.dt))
        throw ConfigError("B, E, T and dt must be finite");
    if (!(c.dt > 0.0)) throw ConfigError("dt must be > 0");
    if (c.starts < 1) throw ConfigError("starts must be >= 1");
}

class Output {
public:
    explicit Output(const std::optional<std::string>& path) {
        if (path) {
            file_.open(*path, std::ios::binary);
            if (!file_) throw ConfigError("cannot open output file " + *path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const RunConfig& c, const json& body) {
    Output out(c.output);
    out.stream() << body.dump(2) << '\n';
}

FuchsianGroup load_group(const RunConfig& c) { return c.group ? FuchsianGroup::load(*c.group) : bolza_group(); }

std::string rational_text(const Rational& q) {
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

int run_spectrum(const RunConfig& c, const json& cfg) {
    const int genus = c.group ? load_group(c).genus() : 2;
    const auto levels = landau_levels(c.k, c.B, genus, c.exact_rational);
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"k", "m", "value", "scaled", "multiplicity"});
        for (const auto& l : levels) {
            w.cell(l.k).cell(l.m).cell(l.value).cell(l.scaled);
            if (l.multiplicity) w.cell(static_cast<long long>(*l.multiplicity)); else w.empty();
            w.end_row();
        }
        return 0;
    }
    json lv = json::array();
    for (const auto& l : levels)
        lv.push_back({{"k", l.k}, {"m", l.m}, {"value", l.value}, {"scaled", l.scaled},
                      {"exact_value", rational_text(l.exact_value)}, {"multiplicity", optional_json(l.multiplicity)}});
    json body{{"command", "spectrum"}, {"config", cfg}, {"genus", genus}, {"levels", lv}};
    if (!levels.empty()) {
        const auto w = weinstein_check(c.k, c.B, genus);
        body["weinstein"] = {{"action_residual", w.action_residual}, {"relation_residual", w.relation_residual}};
    } else {
        body["weinstein"] = nullptr;
    }
    json approach = json::array();
    for (const auto& a : critical_approach(c.B, c.k_list, genus))
        approach.push_back({{"k", a.k}, {"scaled_top", a.scaled_top}, {"gap", a.gap}});
    body["critical_approach"] = approach;
    emit_json(c, body);
    return 0;
}

int run_orbit(const RunConfig& c, const json& cfg) {
    const auto group = load_group(c);
    const auto params = classify(c.E, c.B);
    double T = c.T;
    if (c.periods) {
        if (params.regime != Regime::Elliptic) throw RegimeError("orbit: --periods needs E below the critical energy");
        T = *c.periods * 2.0 * std::numbers::pi * *params.period;
    }
    const auto start = FramePoint::make(GroupElement::identity(), params, group);
    const auto samples = orbit_samples(start, T, c.dt, group);
    const double final_distance = pdist(samples.back().g, start.rep);
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"t", "m11", "m12", "m21", "m22", "disk_re", "disk_im"});
        for (const auto& s : samples) {
            const cplx z = disk_point(s.g);
            w.cell(s.t).cell(s.g.m11()).cell(s.g.m12()).cell(s.g.m21()).cell(s.g.m22()).cell(z.real()).cell(z.imag());
            w.end_row();
        }
        return 0;
    }
    json rows = json::array();
    for (const auto& s : samples) {
        const cplx z = disk_point(s.g);
        rows.push_back({s.t, s.g.m11(), s.g.m12(), s.g.m21(), s.g.m22(), z.real(), z.imag()});
    }
    emit_json(c, {{"command", "orbit"},
                  {"config", cfg},
                  {"regime", to_string(params.regime)},
                  {"T", T},
                  {"final_distance_from_start", final_distance},
                  {"columns", {"t", "m11", "m12", "m21", "m22", "disk_re", "disk_im"}},
                  {"samples", rows}});
    return 0;
}

int run_birkhoff(const RunConfig& c, const json& cfg) {
    const auto group = load_group(c);
    const auto params = classify(c.E, c.B);
    const auto suite = default_suite(group);
    const auto starts = scattered_starts(group, static_cast<std::size_t>(c.starts), c.seed);
    std::vector<double> horizons;
    for (double t : parse_grid(c.T_grid))
        if (t < c.T) horizons.push_back(t);
    horizons.push_back(c.T);
    std::vector<std::vector<std::vector<cplx>>> traces(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        traces[s] = birkhoff_trace(suite, starts[s], params, horizons, c.dt, group);
    });
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"observable_id", "start", "T", "re", "im"});
        for (std::size_t o = 0; o < suite.size(); ++o)
            for (std::size_t s = 0; s < starts.size(); ++s)
                for (std::size_t j = 0; j < horizons.size(); ++j) {
                    w.cell(suite[o].id()).cell(static_cast<int>(s)).cell(horizons[j]);
                    w.cell(traces[s][o][j].real()).cell(traces[s][o][j].imag());
                    w.end_row();
                }
        return 0;
    }
    json results = json::array();
    for (std::size_t o = 0; o < suite.size(); ++o)
        for (std::size_t s = 0; s < starts.size(); ++s)
            for (std::size_t j = 0; j < horizons.size(); ++j)
                results.push_back({{"observable_id", suite[o].id()}, {"start", s}, {"T", horizons[j]},
                                   {"value", magflow::to_json(traces[s][o][j])}});
    emit_json(c, {{"command", "birkhoff"}, {"config", cfg}, {"E", params.E}, {"B", params.B},
                  {"regime", to_string(params.regime)}, {"results", results}});
    return 0;
}

int run_decay(const RunConfig& c, const json& cfg) {
    const auto group = load_group(c);
    const auto suite = default_suite(group);
    std::vector<LiouvilleRef> refs;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const auto est = liouville_average(suite[i], group, c.n_samples, task_seed(c.seed, 40 + i));
        refs.push_back({est.mean, est.std_error});
    }
    const auto starts = scattered_starts(group, static_cast<std::size_t>(c.starts), c.seed);
    const auto reports = decay_curve(suite, refs, starts, c.B, parse_grid(c.T_grid), c.dt, group, c.lambda1);
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"observable_id", "T", "discrepancy"});
        for (const auto& r : reports)
            for (std::size_t j = 0; j < r.T_grid.size(); ++j) {
                w.cell(r.observable_id).cell(r.T_grid[j]).cell(r.discrepancy[j]);
                w.end_row();
            }
        return 0;
    }
    json list = json::array();
    for (const auto& r : reports)
        list.push_back({{"observable_id", r.observable_id}, {"E", r.E}, {"B", r.B}, {"T_grid", r.T_grid},
                        {"discrepancy", r.discrepancy}, {"theta_hat", optional_json(r.theta_hat)},
                        {"theta_target", r.theta_target}, {"liouville_ref", magflow::to_json(r.liouville_ref)},
                        {"stderr", r.std_error}});
    emit_json(c, {{"command", "decay"}, {"config", cfg}, {"reports", list},
                  {"combined_theta_hat", optional_json(combined_theta(reports))}});
    return 0;
}

int run_variational(const RunConfig& c, const json& cfg) {
    const auto params = classify(c.E, c.B);
    const auto v = parse_doubles(c.init, "init");
    if (v.size() != 4) throw ConfigError("init must hold four numbers a,b,c,d");
    const Coefficients init{v[0], v[1], v[2], v[3]};
    const auto n = static_cast<long>(std::ceil(c.T / c.dt - 1e-9));
    std::vector<double> grid;
    for (long i = 0; i <= n; ++i) grid.push_back(i == n ? c.T : static_cast<double>(i) * c.dt);
    const auto growth = growth_check(params.lambda, c.B, grid);
    std::vector<VariationalState> states;
    for (double t : grid) {
        states.push_back(closed_form(init, params.lambda, c.B, t));
        const auto& s = states.back().value;
        if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.c) || !std::isfinite(growth.rows[states.size() - 1].ratio))
            throw OverflowError("variational: coefficients overflow at t = " + format_double(t));
    }
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"t", "a", "b", "c", "d", "bound_ratio"});
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto& s = states[i].value;
            w.cell(grid[i]).cell(s.a).cell(s.b).cell(s.c).cell(s.d).cell(growth.rows[i].ratio);
            w.end_row();
        }
        return 0;
    }
    json rows = json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i].value;
        rows.push_back({grid[i], s.a, s.b, s.c, s.d, growth.rows[i].ratio});
    }
    json exps = json::array();
    for (int k = 0; k <= 6; ++k) exps.push_back(growth_exponent(k));
    emit_json(c, {{"command", "variational"}, {"config", cfg}, {"regime", to_string(params.regime)},
                  {"lambda", params.lambda}, {"rate", growth.rate}, {"C", growth.C}, {"max_ratio", growth.max_ratio},
                  {"growth_exponents", exps}, {"columns", {"t", "a", "b", "c", "d", "bound_ratio"}}, {"rows", rows}});
    return 0;
}

int run_area(const RunConfig& c, const json& cfg) {
    const auto group = load_group(c);
    const auto est = area_mc(group, c.n_samples, c.seed);
    const double target = 4.0 * std::numbers::pi * (group.genus() - 1);
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"area", "std_error", "accepted", "samples", "target"});
        w.cell(est.area).cell(est.std_error).cell(static_cast<long long>(est.accepted));
        w.cell(static_cast<long long>(est.samples)).cell(target);
        w.end_row();
        return 0;
    }
    emit_json(c, {{"command", "area"}, {"config", cfg}, {"area", est.area}, {"std_error", est.std_error},
                  {"accepted", est.accepted}, {"samples", est.samples}, {"target", target},
                  {"z_score", std::abs(est.area - target) / est.std_error}});
    return 0;
}

int run_coherent(const RunConfig& c, const json& cfg) {
    if (c.k < 1) throw DomainError("coherent: k must be >= 1");
    const auto q = laguerre_q(c.m);
    const double r_max = 6.0 / std::sqrt(static_cast<double>(c.k));
    constexpr int points = 200;
    if (c.format == "csv") {
        Output out(c.output);
        CsvWriter w(out.stream(), cfg, {"r", "amplitude", "convention"});
        for (Scaling s : {Scaling::Leading, Scaling::UnitNorm})
            for (int i = 0; i <= points; ++i) {
                const double r = r_max * i / points;
                w.cell(r).cell(profile(c.k, c.m, r, s)).cell(to_string(s));
                w.end_row();
            }
        return 0;
    }
    json coeffs = json::array();
    for (const auto& x : q.coefficients) coeffs.push_back(x.str());
    json prof = json::array();
    for (Scaling s : {Scaling::Leading, Scaling::UnitNorm})
        for (int i = 0; i <= points; ++i) {
            const double r = r_max * i / points;
            prof.push_back({{"r", r}, {"amplitude", profile(c.k, c.m, r, s)}, {"convention", to_string(s)}});
        }
    json diag = nullptr;
    if (c.k >= 4) {
        const auto d = norm_diagnostic(c.k, c.m);
        diag = {{"k", d.k}, {"m", d.m}, {"leading_mass", d.leading_mass}, {"unit_mass", d.unit_mass},
                {"leading_ratio", d.leading_ratio}, {"unit_ratio", d.unit_ratio}, {"leading_flagged", d.leading_flagged}};
    }
    emit_json(c, {{"command", "coherent"}, {"config", cfg}, {"k", c.k}, {"m", c.m},
                  {"laguerre_coefficients", coeffs}, {"profile", prof}, {"norm_diagnostic", diag}});
    return 0;
}

int run_report(const RunConfig& c, const json& cfg) {
    const auto group = load_group(c);
    AcceptanceConfig ac;
    ac.seed = c.seed;
    ac.lambda1 = c.lambda1;
    ac.n_samples = c.n_samples;
    ac.dt = c.dt;
    const auto rep = run_acceptance(group, ac, cfg);
    emit_json(c, rep.verdict);
    return rep.verdict.at("pass").get<bool>() ? 0 : 3;
}

int dispatch(const RunConfig& c) {
    const json cfg = to_json(c);
    if (c.command == "spectrum") return run_spectrum(c, cfg);
    if (c.command == "orbit") return run_orbit(c, cfg);
    if (c.command == "birkhoff") return run_birkhoff(c, cfg);
    if (c.command == "decay") return run_decay(c, cfg);
    if (c.command == "variational") return run_variational(c, cfg);
    if (c.command == "area") return run_area(c, cfg);
    if (c.command == "coherent") return run_coherent(c, cfg);
    if (c.command == "report") return run_report(c, cfg);
    throw ConfigError("unknown command " + c.command);
}

int fail(const std::string& type, const std::string& message) {
    std::cout << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnetic frame flows on a hyperbolic surface: experiments and reports"};
    RunConfig flags;
    std::string config_path;
    std::string k_list;
    app.add_option("command", flags.command, "spectrum|orbit|birkhoff|decay|variational|area|coherent|report")
        ->required()
        ->check(CLI::IsMember({"spectrum", "orbit", "birkhoff", "decay", "variational", "area", "coherent", "report"}));
    auto* o_B = app.add_option("--B", flags.B, "magnetic strength");
    auto* o_E = app.add_option("--E", flags.E, "energy");
    auto* o_k = app.add_option("--k", flags.k, "tensor power");
    auto* o_klist = app.add_option("--k-list", k_list, "comma-separated tensor powers");
    auto* o_T = app.add_option("--T", flags.T, "time horizon");
    auto* o_dt = app.add_option("--dt", flags.dt, "time step");
    auto* o_grid = app.add_option("--T-grid", flags.T_grid, "log:min:max:n or comma list");
    auto* o_n = app.add_option("--n-samples", flags.n_samples, "Monte Carlo samples");
    auto* o_seed = app.add_option("--seed", flags.seed, "master seed");
    std::string output;
    auto* o_out = app.add_option("--output", output, "output path (default stdout)");
    auto* o_fmt = app.add_option("--format", flags.format, "csv or json");
    bool exact = true;
    auto* o_exact = app.add_flag("--exact-rational,!--no-exact-rational", exact, "rational Landau-level arithmetic");
    auto* o_l1 = app.add_option("--lambda1", flags.lambda1, "first Laplace eigenvalue of the surface");
    app.add_option("--config", config_path, "JSON config file");
    std::string group;
    auto* o_group = app.add_option("--group", group, "group file (default: Bolza)");
    double periods = 0.0;
    auto* o_periods = app.add_option("--periods", periods, "orbit length in cyclotron periods (overrides --T)");
    auto* o_m = app.add_option("--m", flags.m, "Landau level / Laguerre degree");
    auto* o_init = app.add_option("--init", flags.init, "variational initial data a,b,c,d");
    auto* o_starts = app.add_option("--starts", flags.starts, "number of Birkhoff starts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("ConfigError", e.what());
    }

    try {
        RunConfig c;
        c.command = flags.command;
        if (!config_path.empty()) apply_config_file(config_path, c);
        if (o_B->count()) c.B = flags.B;
        if (o_E->count()) c.E = flags.E;
        if (o_k->count()) c.k = flags.k;
        if (o_klist->count()) {
            c.k_list.clear();
            for (double x : parse_doubles(k_list, "k-list")) {
                if (x != std::floor(x) || x < 1 || x > 1e6) throw ConfigError("k-list entries must be positive integers");
                c.k_list.push_back(static_cast<int>(x));
            }
        }
        if (o_T->count()) c.T = flags.T;
        if (o_dt->count()) c.dt = flags.dt;
        if (o_grid->count()) c.T_grid = flags.T_grid;
        if (o_n->count()) c.n_samples = flags.n_samples;
        if (o_seed->count()) c.seed = flags.seed;
        if (o_out->count()) c.output = output;
        if (o_fmt->count()) c.format = flags.format;
        if (o_exact->count()) c.exact_rational = exact;
        if (o_l1->count()) c.lambda1 = flags.lambda1;
        if (o_group->count()) c.group = group;
        if (o_periods->count()) c.periods = periods;
        if (o_m->count()) c.m = flags.m;
        if (o_init->count()) c.init = flags.init;
        if (o_starts->count()) c.starts = flags.starts;
        if (c.command == "report") c.format = "json";
        validate(c);
        return dispatch(c);
    } catch (const magflow::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("InternalError", e.what());
    }
}
