#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sle/analysis.hpp"
#include "sle/convergence.hpp"
#include "sle/driving.hpp"
#include "sle/error.hpp"
#include "sle/io.hpp"
#include "sle/moments.hpp"
#include "sle/parallel.hpp"
#include "sle/rng.hpp"
#include "sle/splitting.hpp"
#include "sle/sweep.hpp"

namespace sle::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Options of one subcommand, with a way to echo each bound value.
class Registry {
public:
    explicit Registry(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& help) {
        echo_.emplace_back(name, [&var] { return json(var); });
        return app_->add_option("--" + name, var, help)->capture_default_str();
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
        echo_.emplace_back(name, [&var] { return json(var); });
        return app_->add_flag("--" + name, var, help);
    }

    CLI::App* app() const { return app_; }

    json inputs() const {
        json j = json::object();
        for (const auto& [name, value] : echo_) j[name] = value();
        return j;
    }

    json sources(const std::set<std::string>& from_config) const {
        json j = json::object();
        for (const auto& [name, value] : echo_) {
            const CLI::Option* opt = app_->get_option_no_throw("--" + name);
            if (from_config.count(name)) j[name] = "config";
            else j[name] = opt && opt->count() > 0 ? "cli" : "default";
        }
        return j;
    }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<json()>>> echo_;
};

struct Common {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out;
    std::string config;
};

struct DrivingArgs {
    std::string kind = "sle";
    double kappa = 4.0;
    double reinforce = 0.0;
    double hurst = 0.5;
    std::size_t steps = 16384;
    double y0 = 0.01;
    double T = 1.0;
    double rel_step = 5e-3;
    double floor = 1e-8;

    DrivingSpec spec(std::uint64_t seed) const {
        DrivingSpec s;
        s.kind = process_kind_from_string(kind);
        s.kappa = kappa;
        s.reinforcement = reinforce;
        s.hurst = hurst;
        s.seed = seed;
        s.validate();
        return s;
    }
    FractionalIntegrator integrator() const {
        if (!(rel_step > 0.0) || !(floor > 0.0)) throw ValidationError("integrator settings must be positive");
        return {rel_step, floor};
    }
};

struct SimulateArgs {
    DrivingArgs driving;
    unsigned fidelity = 0;
    bool shift = false;
    std::string svg;
    std::string driving_out;
};

struct MomentsArgs {
    double kappa = 4.0;
    double y0 = 0.1;
    double T = 1.0;
    std::size_t steps = 256;
    std::string mode = "quadrature";
    std::size_t paths = 10000;
    std::size_t nodes = 20;
    double tol2 = 1e-10;
    double tol4 = 1e-9;
    double zscore = 3.0;
};

struct ConvergeArgs {
    double kappa = 2.0;
    double y0 = 0.1;
    double T = 1.0;
    unsigned min_level = 8;
    unsigned max_level = 13;
    std::size_t paths = 20;
    std::string reference = "next";
    unsigned euler_level = 20;
};

struct DimensionArgs {
    std::vector<std::string> inputs;
    DrivingArgs driving;
    std::size_t paths = 10;
    std::string method = "box";
    std::size_t scales = 0;
    double coarse = 0.0;
    double fine = 0.0;
    bool multi_offset = false;
};

struct SweepArgs {
    std::vector<double> kappas{3.0, 4.0, 5.0, 6.0};
    std::vector<double> hursts{0.4, 0.5, 0.6, 0.7};
    std::size_t paths = 5;
    std::size_t steps = 16384;
    double y0 = 0.01;
    double T = 1.0;
    bool multi_offset = false;
    double rel_step = 5e-3;
    double floor = 1e-8;
};

struct InterpolateArgs {
    std::string input;
    double exponent = 1.0;
    unsigned factor = 4;
};

struct State {
    std::map<std::string, std::unique_ptr<Registry>> registries;
    std::map<std::string, Common> common;
    SimulateArgs simulate;
    MomentsArgs moments;
    ConvergeArgs converge;
    DimensionArgs dimension;
    SweepArgs sweep;
    InterpolateArgs interpolate;
};

Registry& subcommand(CLI::App& app, State& state, const std::string& name, const std::string& help,
                     const std::string& default_out) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto& reg = *(state.registries[name] = std::make_unique<Registry>(sub));
    Common& c = state.common[name];
    c.out = default_out;
    reg.add("seed", c.seed, "master seed");
    reg.add("workers", c.workers, "worker threads (results do not depend on it)");
    reg.add("out", c.out, "primary output file; metadata goes to the .json sidecar");
    sub->add_option("--config", c.config, "JSON config; command-line flags take precedence");
    return reg;
}

void add_driving(Registry& reg, DrivingArgs& d) {
    reg.add("kind", d.kind, "sle | nrsle | fsle");
    reg.add("kappa", d.kappa, "diffusivity kappa >= 0");
    reg.add("reinforce", d.reinforce, "reinforcement strength p < 1/2 (nrsle)");
    reg.add("hurst", d.hurst, "Hurst exponent in (0, 1) (fsle)");
    reg.add("steps", d.steps, "step count M");
    reg.add("y0", d.y0, "start height");
    reg.add("T", d.T, "time horizon");
    reg.add("rel-step", d.rel_step, "fsle substep bound relative to |z|");
    reg.add("floor", d.floor, "fsle singularity floor on |z|");
}

void build(CLI::App& app, State& s) {
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kGeneratorVersion));

    {
        Registry& r = subcommand(app, s, "simulate", "simulate one trace", "trace.csv");
        add_driving(r, s.simulate.driving);
        r.add("fidelity", s.simulate.fidelity, "theory-mode fidelity N (0 keeps --steps and --y0)");
        r.flag("shift", s.simulate.shift, "add the realized real shift F_T to every point");
        r.add("svg", s.simulate.svg, "also render the polyline to this SVG file");
        r.add("driving-out", s.simulate.driving_out, "also write the sampled driving path (t,value CSV)");
    }
    {
        Registry& r = subcommand(app, s, "moments", "second and fourth moment checks", "moments.csv");
        MomentsArgs& m = s.moments;
        r.add("kappa", m.kappa, "diffusivity kappa >= 0");
        r.add("y0", m.y0, "start height");
        r.add("T", m.T, "time horizon");
        r.add("steps", m.steps, "step count M");
        r.add("mode", m.mode, "quadrature | ensemble | both");
        r.add("paths", m.paths, "ensemble size");
        r.add("nodes", m.nodes, "Gauss-Hermite nodes");
        r.add("tol2", m.tol2, "quadrature tolerance on E[Z^2]");
        r.add("tol4", m.tol4, "quadrature tolerance on E[Z^4]");
        r.add("zscore", m.zscore, "ensemble tolerance in standard errors");
    }
    {
        Registry& r = subcommand(app, s, "converge", "strong error across dyadic refinements", "converge.csv");
        ConvergeArgs& c = s.converge;
        r.add("kappa", c.kappa, "diffusivity kappa >= 0");
        r.add("y0", c.y0, "start height");
        r.add("T", c.T, "time horizon");
        r.add("min-level", c.min_level, "coarsest level, M = 2^level");
        r.add("max-level", c.max_level, "finest level");
        r.add("paths", c.paths, "coupled paths");
        r.add("reference", c.reference, "next (consecutive levels) | euler (fine Euler)");
        r.add("euler-level", c.euler_level, "Euler mesh level for --reference euler");
    }
    {
        Registry& r = subcommand(app, s, "dimension", "fractal dimension of traces", "dimension.csv");
        DimensionArgs& d = s.dimension;
        r.add("in", d.inputs, "trace CSV files (t,re,im); without them, fresh traces are simulated");
        add_driving(r, d.driving);
        d.driving.steps = std::size_t{1} << 17;
        r.add("paths", d.paths, "fresh traces to simulate");
        r.add("method", d.method, "box | yardstick");
        r.add("scales", d.scales, "ladder length (0: 12 boxes or 10 rulers)");
        r.add("coarse", d.coarse, "coarsest scale is diag / 2^coarse (0: 3)");
        r.add("fine", d.fine, "finest scale is diag / 2^fine (0: 9 boxes or 8 rulers)");
        r.flag("multi-offset", d.multi_offset, "average box counts over 4 grid offsets");
    }
    {
        Registry& r = subcommand(app, s, "sweep", "fSLE dimension table over kappa x H", "sweep.csv");
        SweepArgs& w = s.sweep;
        r.add("kappas", w.kappas, "kappa values");
        r.add("hursts", w.hursts, "Hurst exponents");
        r.add("paths", w.paths, "paths per cell");
        r.add("steps", w.steps, "step count M");
        r.add("y0", w.y0, "start height");
        r.add("T", w.T, "time horizon");
        r.flag("multi-offset", w.multi_offset, "average box counts over 4 grid offsets");
        r.add("rel-step", w.rel_step, "fsle substep bound relative to |z|");
        r.add("floor", w.floor, "fsle singularity floor on |z|");
    }
    {
        Registry& r = subcommand(app, s, "interpolate", "power-law interpolation of a driving path",
                                 "interpolated.csv");
        InterpolateArgs& i = s.interpolate;
        r.add("in", i.input, "driving CSV (t,value) on a uniform mesh");
        r.add("exponent", i.exponent, "interpolation power p > 0");
        r.add("factor", i.factor, "sub-points per cell r >= 1");
    }
}

fs::path sidecar(fs::path out) {
    if (out.extension() == ".json") return out.replace_extension(".meta.json");
    return out.replace_extension(".json");
}

struct Context {
    std::string command;
    const Registry* registry = nullptr;
    const Common* common = nullptr;
    std::set<std::string> from_config;

    json metadata() const {
        return {{"generator", "slesplit"},
                {"version", kGeneratorVersion},
                {"command", command},
                {"config_file", common->config.empty() ? json(nullptr) : json(common->config)},
                {"inputs", registry->inputs()},
                {"sources", registry->sources(from_config)}};
    }
    fs::path out() const { return common->out; }
};

int cmd_simulate(const Context& ctx, const SimulateArgs& a) {
    const DrivingSpec spec = a.driving.spec(ctx.common->seed);
    const FidelitySchedule schedule = a.fidelity > 0 ? FidelitySchedule::theory(a.fidelity, a.driving.T)
                                                     : FidelitySchedule::practical(a.driving.steps, a.driving.y0,
                                                                                   a.driving.T);
    SimulationOptions options;
    options.shift_to_forward = a.shift;
    options.integrator = a.driving.integrator();
    const Trace trace = simulate(spec, schedule, options);

    write_trace_csv(ctx.out(), trace);
    json meta = ctx.metadata();
    meta["spec"] = to_json(spec);
    meta["schedule"] = to_json(schedule);
    meta["variant"] = to_string(trace.variant);
    if (spec.kind == ProcessKind::Fractional) meta["integrator"] = to_json(options.integrator);
    meta["applied_shift"] = trace.applied_shift;
    meta["points"] = trace.size();
    json outputs{{"trace", ctx.out().string()}};
    if (!a.svg.empty()) {
        write_trace_svg(a.svg, trace);
        outputs["svg"] = a.svg;
    }
    if (!a.driving_out.empty()) {
        write_driving_csv(a.driving_out, sample_driving(schedule.mesh(), spec));
        outputs["driving"] = a.driving_out;
    }
    meta["outputs"] = outputs;
    write_json(sidecar(ctx.out()), meta);
    const Complex end = trace.points.back();
    std::cout << to_string(trace.variant) << ": " << trace.size() << " points, Z_T = " << format_double(end.real())
              << (end.imag() < 0 ? " - " : " + ") << format_double(std::abs(end.imag())) << "i\n";
    return 0;
}

int cmd_moments(const Context& ctx, const MomentsArgs& a) {
    const bool quad = a.mode == "quadrature" || a.mode == "both";
    const bool ens = a.mode == "ensemble" || a.mode == "both";
    if (!quad && !ens) throw ValidationError("--mode must be quadrature, ensemble or both");

    json meta = ctx.metadata();
    std::vector<std::pair<std::string, MomentReport>> reports;
    std::vector<double> bad_quad;
    std::vector<double> bad_ens;
    if (quad) {
        MomentReport r = quadrature_moments(a.kappa, a.y0, a.T, a.steps, a.nodes);
        for (const MomentRow& row : r.rows)
            if (!(row.deviation_m2 <= a.tol2) || !(row.deviation_m4 <= a.tol4)) bad_quad.push_back(row.t);
        meta["quadrature"] = to_json(r);
        reports.emplace_back("quadrature", std::move(r));
    }
    if (ens) {
        MomentReport r = ensemble_moments(a.kappa, a.y0, a.T, a.steps, a.paths, ctx.common->seed,
                                          ctx.common->workers);
        for (std::size_t k : ensemble_breaches(r, a.zscore)) bad_ens.push_back(r.rows[k].t);
        meta["ensemble"] = to_json(r);
        reports.emplace_back("ensemble", std::move(r));
    }
    meta["breaches"] = {{"quadrature", bad_quad}, {"ensemble", bad_ens}};
    const bool passed = bad_quad.empty() && bad_ens.empty();
    meta["passed"] = passed;

    std::ofstream csv;
    {
        const fs::path out = ctx.out();
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        csv.open(out, std::ios::binary);
        if (!csv) throw IoError("cannot open " + out.string() + " for writing");
    }
    csv << "method,t,expected_m2,m2_re,m2_im,expected_m4,m4_re,m4_im,stderr_m2_re,stderr_m2_im,stderr_m4_re,"
           "stderr_m4_im\n";
    for (const auto& [method, r] : reports)
        for (const MomentRow& row : r.rows)
            csv << method << ',' << format_double(row.t) << ',' << format_double(row.expected_m2) << ','
                << format_double(row.m2.real()) << ',' << format_double(row.m2.imag()) << ','
                << format_double(row.expected_m4) << ',' << format_double(row.m4.real()) << ','
                << format_double(row.m4.imag()) << ',' << format_double(row.stderr_m2.real()) << ','
                << format_double(row.stderr_m2.imag()) << ',' << format_double(row.stderr_m4.real()) << ','
                << format_double(row.stderr_m4.imag()) << '\n';
    csv.close();
    if (!csv) throw IoError("write failed: " + ctx.out().string());
    write_json(sidecar(ctx.out()), meta);

    for (const auto& [method, r] : reports)
        std::cout << method << ": max |dev E[Z^2]| = " << format_double(r.max_deviation_m2)
                  << ", max |dev E[Z^4]| = " << format_double(r.max_deviation_m4) << '\n';
    if (passed) return 0;
    auto list = [](const std::vector<double>& ts) {
        std::string s;
        for (std::size_t i = 0; i < ts.size() && i < 20; ++i) s += (i ? ", " : "") + format_double(ts[i]);
        if (ts.size() > 20) s += ", ...";
        return s;
    };
    if (!bad_quad.empty()) std::cerr << "quadrature moment breach at t = " << list(bad_quad) << '\n';
    if (!bad_ens.empty()) std::cerr << "ensemble moment breach at t = " << list(bad_ens) << '\n';
    return static_cast<int>(ErrorKind::Numeric);
}

int cmd_converge(const Context& ctx, const ConvergeArgs& a) {
    ConvergenceConfig config;
    config.kappa = a.kappa;
    config.y0 = a.y0;
    config.horizon = a.T;
    config.min_level = a.min_level;
    config.max_level = a.max_level;
    config.paths = a.paths;
    config.euler_level = a.euler_level;
    config.seed = ctx.common->seed;
    config.workers = ctx.common->workers;
    if (a.reference == "next") config.reference = ConvergenceReference::NextLevel;
    else if (a.reference == "euler") config.reference = ConvergenceReference::FineEuler;
    else throw ValidationError("--reference must be next or euler");

    const ConvergenceReport report = convergence_study(config);
    bool norms_ok = true;
    const double root_t = std::sqrt(a.T);
    json levels = json::array();
    for (const ConvergenceLevel& row : report.levels) {
        for (std::size_t i = 0; i < row.sup.size(); ++i)
            norms_ok = norms_ok && row.l2[i] <= row.sup[i] * root_t * (1.0 + 1e-12);
        levels.push_back({{"level", row.level},
                          {"M", row.steps},
                          {"median_sup", row.median_sup},
                          {"median_l2", row.median_l2},
                          {"sup", row.sup},
                          {"l2", row.l2}});
    }

    std::ofstream csv(ctx.out(), std::ios::binary);
    if (!csv) throw IoError("cannot open " + ctx.out().string() + " for writing");
    csv << "level,M,median_sup,median_l2\n";
    for (const ConvergenceLevel& row : report.levels)
        csv << row.level << ',' << row.steps << ',' << format_double(row.median_sup) << ','
            << format_double(row.median_l2) << '\n';
    csv.close();
    if (!csv) throw IoError("write failed: " + ctx.out().string());

    json meta = ctx.metadata();
    meta["levels"] = levels;
    meta["empirical_order"] = report.empirical_order;
    meta["monotone"] = report.monotone;
    meta["norm_comparison"] = norms_ok;
    write_json(sidecar(ctx.out()), meta);

    for (const ConvergenceLevel& row : report.levels)
        std::cout << "M = 2^" << row.level << ": median sup " << format_double(row.median_sup) << ", median L2 "
                  << format_double(row.median_l2) << '\n';
    std::cout << "empirical order " << format_double(report.empirical_order) << '\n';
    if (!report.monotone) std::cerr << "median sup distances are not strictly decreasing\n";
    if (!norms_ok) std::cerr << "L2 distance exceeded sup * T^(1/2)\n";
    return report.monotone && norms_ok ? 0 : static_cast<int>(ErrorKind::Numeric);
}

int cmd_dimension(const Context& ctx, const DimensionArgs& a) {
    const bool box = a.method == "box";
    if (!box && a.method != "yardstick") throw ValidationError("--method must be box or yardstick");
    BoxScaleSpec boxes;
    RulerSpec rulers;
    if (a.scales) boxes.count = rulers.count = a.scales;
    if (a.coarse > 0.0) boxes.coarse_exponent = rulers.coarse_exponent = a.coarse;
    if (a.fine > 0.0) boxes.fine_exponent = rulers.fine_exponent = a.fine;
    boxes.multi_offset = a.multi_offset;

    const bool fresh = a.inputs.empty();
    const std::size_t n = fresh ? a.paths : a.inputs.size();
    if (n == 0) throw ValidationError("--paths must be >= 1");
    DrivingSpec base;
    FidelitySchedule schedule;
    SimulationOptions options;
    if (fresh) {
        base = a.driving.spec(ctx.common->seed);
        schedule = FidelitySchedule::practical(a.driving.steps, a.driving.y0, a.driving.T);
        options.integrator = a.driving.integrator();
    }

    struct Outcome {
        std::string source;
        std::optional<DimensionFit> fit;
        std::string failure;
        int code = 0;
    };
    std::vector<Outcome> outcomes(n);
    parallel_for(n, ctx.common->workers, [&](std::size_t i) {
        Outcome& o = outcomes[i];
        o.source = fresh ? "path " + std::to_string(i) : a.inputs[i];
        try {
            Trace trace;
            if (fresh) {
                DrivingSpec spec = base;
                spec.seed = path_seed(ctx.common->seed, i);
                trace = simulate(spec, schedule, options);
            } else {
                trace = read_trace_csv(a.inputs[i]);
            }
            o.fit = box ? box_dimension(trace, boxes) : yardstick_dimension(trace, rulers);
        } catch (const Error& e) {
            o.failure = e.what();
            o.code = e.exit_code();
        }
    });

    std::ofstream csv(ctx.out(), std::ios::binary);
    if (!csv) throw IoError("cannot open " + ctx.out().string() + " for writing");
    csv << "source,slope,intercept,r_squared,scales_used\n";
    json fits = json::array();
    std::vector<double> slopes;
    int code = 0;
    for (const Outcome& o : outcomes) {
        if (o.fit) {
            csv << o.source << ',' << format_double(o.fit->slope) << ',' << format_double(o.fit->intercept) << ','
                << format_double(o.fit->r_squared) << ',' << o.fit->scales.size() << '\n';
            json f = to_json(*o.fit);
            f["source"] = o.source;
            fits.push_back(std::move(f));
            slopes.push_back(o.fit->slope);
        } else {
            fits.push_back({{"source", o.source}, {"error", o.failure}});
            std::cerr << o.source << ": " << o.failure << '\n';
            if (!code) code = o.code;
        }
    }
    csv.close();
    if (!csv) throw IoError("write failed: " + ctx.out().string());

    json meta = ctx.metadata();
    meta["method"] = a.method;
    meta["ladder"] = box ? json{{"count", boxes.count},
                                {"coarse", boxes.coarse_exponent},
                                {"fine", boxes.fine_exponent},
                                {"multi_offset", boxes.multi_offset},
                                {"densify_fraction", boxes.densify_fraction}}
                         : json{{"count", rulers.count},
                                {"coarse", rulers.coarse_exponent},
                                {"fine", rulers.fine_exponent}};
    if (fresh) {
        meta["spec"] = to_json(base);
        meta["schedule"] = to_json(schedule);
    }
    meta["fits"] = fits;
    if (!slopes.empty()) {
        double mean = 0.0;
        for (double s : slopes) mean += s;
        mean /= static_cast<double>(slopes.size());
        double ss = 0.0;
        for (double s : slopes) ss += (s - mean) * (s - mean);
        const double se = slopes.size() > 1 ? std::sqrt(ss / (slopes.size() - 1.0) / slopes.size())
                                            : std::numeric_limits<double>::quiet_NaN();
        meta["mean_slope"] = mean;
        meta["stderr"] = std::isfinite(se) ? json(se) : json(nullptr);
        std::cout << a.method << " dimension: mean " << format_double(mean) << " over " << slopes.size()
                  << " trace(s)\n";
    }
    write_json(sidecar(ctx.out()), meta);
    return code;
}

int cmd_sweep(const Context& ctx, const SweepArgs& a) {
    SweepConfig config;
    config.kappas = a.kappas;
    config.hursts = a.hursts;
    for (double k : a.kappas)
        if (!(k >= 0.0) || !std::isfinite(k)) throw ValidationError("kappa must be finite and >= 0");
    for (double h : a.hursts)
        if (!(h > 0.0 && h < 1.0)) throw ValidationError("Hurst exponent must lie in (0, 1)");
    config.paths_per_cell = a.paths;
    config.schedule = FidelitySchedule::practical(a.steps, a.y0, a.T);
    config.boxes.multi_offset = a.multi_offset;
    if (!(a.rel_step > 0.0) || !(a.floor > 0.0)) throw ValidationError("integrator settings must be positive");
    config.integrator = {a.rel_step, a.floor};
    config.seed = ctx.common->seed;
    config.workers = ctx.common->workers;

    const SweepResult result = dimension_sweep(config);
    write_sweep_csv(ctx.out(), result);
    json meta = ctx.metadata();
    meta["schedule"] = to_json(config.schedule);
    meta["integrator"] = to_json(config.integrator);
    meta["sweep"] = to_json(result);
    write_json(sidecar(ctx.out()), meta);

    std::size_t failures = 0;
    for (const SweepCell& c : result.cells) failures += c.failures.size();
    std::cout << result.cells.size() << " cells, Kendall tau (kappa) " << format_double(result.tau_kappa)
              << ", Kendall tau (-H) " << format_double(result.tau_hurst) << ", monotone "
              << (result.monotone() ? "yes" : "no") << ", failed paths " << failures << '\n';
    return 0;
}

int cmd_interpolate(const Context& ctx, const InterpolateArgs& a) {
    if (a.input.empty()) throw ValidationError("--in is required");
    const DrivingPath path = read_driving_csv(a.input);
    const DrivingPath out = power_interpolate(path, a.exponent, a.factor);
    write_driving_csv(ctx.out(), out);
    json meta = ctx.metadata();
    meta["points_in"] = path.values.size();
    meta["points_out"] = out.values.size();
    write_json(sidecar(ctx.out()), meta);
    std::cout << path.values.size() << " -> " << out.values.size() << " points\n";
    return 0;
}

/// Command-line tokens for config entries the command line did not set.
std::vector<std::string> config_tokens(const CLI::App& sub, const std::string& name, const json& doc,
                                       std::set<std::string>& from_config) {
    if (!doc.is_object()) throw IoError("config must be a JSON object");
    json merged = json::object();
    for (const auto& [key, value] : doc.items())
        if (!value.is_object()) merged[key] = value;
    if (doc.contains(name)) {
        if (!doc[name].is_object()) throw IoError("config section '" + name + "' must be an object");
        for (const auto& [key, value] : doc[name].items()) merged[key] = value;
    }

    std::vector<std::string> tokens;
    for (const auto& [key, value] : merged.items()) {
        std::string option = key;
        std::replace(option.begin(), option.end(), '_', '-');
        if (option == "config") continue;
        const CLI::Option* opt = sub.get_option_no_throw("--" + option);
        if (!opt) throw IoError("unknown config key '" + key + "' for " + name);
        if (opt->count() > 0) continue;
        auto scalar = [&](const json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number()) return v.dump();
            throw IoError("config key '" + key + "' must hold numbers or strings");
        };
        if (value.is_boolean()) {
            if (opt->get_expected_min() != 0) throw IoError("config key '" + key + "' is not a flag");
            if (value.get<bool>()) tokens.push_back("--" + option);
        } else if (value.is_array()) {
            tokens.push_back("--" + option);
            for (const json& v : value) tokens.push_back(scalar(v));
        } else {
            tokens.push_back("--" + option);
            tokens.push_back(scalar(value));
        }
        from_config.insert(option);
    }
    return tokens;
}

CLI::App* selected(CLI::App& app) {
    const auto subs = app.get_subcommands();
    return subs.empty() ? nullptr : subs.front();
}

void parse(CLI::App& app, std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    app.parse(args);
}

}  // namespace

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    const char* description = "Splitting simulation of Loewner traces";
    try {
        // Pass 1 finds the subcommand, the config file and the flags given explicitly.
        std::set<std::string> from_config;
        std::vector<std::string> extended = args;
        {
            CLI::App probe(description, "sle");
            State state;
            build(probe, state);
            try {
                parse(probe, args);
            } catch (const CLI::Success& e) {
                return probe.exit(e);
            }
            CLI::App* sub = selected(probe);
            const std::string& config = state.common[sub->get_name()].config;
            if (!config.empty()) {
                const auto tokens = config_tokens(*sub, sub->get_name(), read_json(config), from_config);
                extended.insert(extended.end(), tokens.begin(), tokens.end());
            }
        }

        CLI::App app(description, "sle");
        State state;
        build(app, state);
        parse(app, extended);
        CLI::App* sub = selected(app);
        const std::string name = sub->get_name();
        Context ctx{name, state.registries.at(name).get(), &state.common.at(name), from_config};
        if (ctx.common->out.empty()) throw ValidationError("--out must not be empty");

        if (name == "simulate") return cmd_simulate(ctx, state.simulate);
        if (name == "moments") return cmd_moments(ctx, state.moments);
        if (name == "converge") return cmd_converge(ctx, state.converge);
        if (name == "dimension") return cmd_dimension(ctx, state.dimension);
        if (name == "sweep") return cmd_sweep(ctx, state.sweep);
        return cmd_interpolate(ctx, state.interpolate);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Validation);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Io);
    }
}

}  // namespace sle::cli
