#include "cavmem/cli.hpp"

#include "cavmem/asymptotics.hpp"
#include "cavmem/control.hpp"
#include "cavmem/dynamics.hpp"
#include "cavmem/io.hpp"
#include "cavmem/model.hpp"
#include "cavmem/oct.hpp"
#include "cavmem/parallel.hpp"
#include "cavmem/roots.hpp"
#include "cavmem/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace cavmem {

namespace {

using nlohmann::json;

struct ShapeArgs {
    std::string kind = "sech";
    std::string csv_file;
    double tau = 1.0;
    double window = 0.0;  // |t2 - t1| in units of tau, 0 = untruncated
    bool zero_onset = false;

    void attach(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--shape", kind,
                                    "pulse family: dec-exp, inc-exp, sech, "
                                    "lorentzian, gaussian");
        if (required) opt->required();
        cmd->add_option("--shape-csv", csv_file,
                        "tabulated pulse from CSV (t, Re phi[, Im phi])");
        cmd->add_option("--tau", tau, "characteristic time tau")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--window", window,
                        "truncation window |t2-t1| in units of tau");
        cmd->add_flag("--zero-onset", zero_onset,
                      "subtract phi(t2) before renormalizing (n = 1 onset)");
    }

    PulseShape build() const {
        PulseShape s;
        if (!csv_file.empty()) {
            s = PulseShape::from_csv(csv_file);
        } else {
            const auto k = shape_kind_from_string(kind);
            if (!k) throw CLI::ValidationError("--shape", "unknown shape kind");
            switch (*k) {
                case ShapeKind::DecreasingExp: s = PulseShape::decreasing_exp(tau); break;
                case ShapeKind::IncreasingExp: s = PulseShape::increasing_exp(tau); break;
                case ShapeKind::Sech: s = PulseShape::sech(tau); break;
                case ShapeKind::Lorentzian: s = PulseShape::lorentzian(tau); break;
                case ShapeKind::Gaussian: s = PulseShape::gaussian(tau); break;
                case ShapeKind::Tabulated:
                    throw CLI::ValidationError("--shape",
                                               "use --shape-csv for tabulated");
            }
        }
        if (window > 0.0) {
            double a, b;
            const double w = window * tau;
            if (s.kind() == ShapeKind::DecreasingExp) {
                a = 0.0;
                b = w;
            } else if (s.kind() == ShapeKind::IncreasingExp) {
                a = -w;
                b = 0.0;
            } else {
                a = -w / 2.0;
                b = w / 2.0;
            }
            s = s.truncate(a, b, zero_onset);
        }
        return s;
    }
};

PulseShape shape_for_spec(const SweepSpec& spec) {
    ShapeArgs a;
    a.kind = to_string(spec.kind);
    a.tau = spec.tau;
    a.window = spec.window;
    a.zero_onset = spec.zero_onset;
    return a.build();
}

MemoryParams atom_params_for_rate(double rate) {
    MemoryParams p;
    p.kappa_in = 50.0 * rate;  // deep in the atom-limited regime
    p.g_sqrtN = std::sqrt(rate * p.kappa_in);
    return p;
}

json map_to_json(const PipelineResult& res) {
    json out;
    out["eta"] = res.eta;
    out["one_minus_eta"] = 1.0 - res.eta;
    out["c"] = res.c;
    out["t_c"] = res.map.critical_times;
    out["iterations"] = res.iterations;
    out["fast_retrieval"] = res.map.degenerate_fast;
    out["two_tc_fallback"] = res.map.two_tc_fallback;
    return out;
}

// Gamma Tc value that reaches the requested sech efficiency; the two
// canonical thresholds carry the constants read off the efficiency curve.
double sech_b_value(double target) {
    if (std::abs(target - 0.99) < 1e-12) return 0.549;
    if (std::abs(target - 2.0 / 3.0) < 1e-9) return 0.128;
    const auto shape = PulseShape::sech(1.0);
    const double tc = M_PI / (4.0 * std::sqrt(3.0));
    auto eta_of_b = [&](double b) {
        return optimize_c(shape, b / tc).eta - target;
    };
    return bisect(eta_of_b, 1e-3, 40.0, 1e-10) * tc;
}

struct CommandContext {
    std::vector<std::string> argv;
    std::vector<std::string> meta() const { return standard_metadata(argv); }
};

int cmd_efficiency(const ShapeArgs& sa, double rate_tau, double rate_tc,
                   const std::string& strategy) {
    const PulseShape shape = sa.build();
    double rate;
    if (rate_tc > 0)
        rate = rate_tc / shape.time_variance();
    else
        rate = rate_tau / shape.tau();
    json out;
    if (strategy == "ansatz") {
        out = map_to_json(optimize_c(shape, rate));
    } else if (strategy == "two-tc") {
        out = map_to_json(two_tc_map(shape, rate));
    } else if (strategy == "c-leq-one") {
        const auto r = c_leq_one_eta(shape, rate);
        out["eta"] = r.eta;
        out["one_minus_eta"] = 1.0 - r.eta;
        out["c"] = r.c;
    } else {
        throw CLI::ValidationError("--strategy", "unknown strategy");
    }
    out["rate"] = rate;
    out["rate_tau"] = rate * shape.tau();
    out["rate_tc"] = rate * shape.time_variance();
    out["strategy"] = strategy;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const CommandContext& ctx, const std::string& spec_path,
              const std::string& out_path, int jobs) {
    const SweepSpec spec = load_sweep_spec(spec_path);
    const PulseShape shape = shape_for_spec(spec);
    const double tc = shape.time_variance();

    std::vector<double> axis(spec.axis_points);
    for (int i = 0; i < spec.axis_points; ++i) {
        const double u =
            spec.axis_points == 1 ? 0.0 : double(i) / (spec.axis_points - 1);
        axis[i] = spec.axis_log
                      ? spec.axis_min *
                            std::pow(spec.axis_max / spec.axis_min, u)
                      : spec.axis_min + (spec.axis_max - spec.axis_min) * u;
    }

    struct Cell {
        double eta = std::nan("");
        double c = std::nan("");
        double tc1 = std::nan("");
        double tc2 = std::nan("");
    };
    std::vector<std::vector<Cell>> table(
        axis.size(), std::vector<Cell>(spec.strategies.size()));

    std::optional<PulseShape::Endpoint> endpoint;
    parallel_for(
        axis.size(),
        [&](std::size_t i) {
            const double rate =
                spec.axis_in_tc_units ? axis[i] / tc : axis[i] / shape.tau();
            for (std::size_t k = 0; k < spec.strategies.size(); ++k) {
                const auto& st = spec.strategies[k];
                Cell& cell = table[i][k];
                if (st == "ansatz") {
                    const auto r = optimize_c(shape, rate);
                    cell = {r.eta, r.c,
                            r.map.critical_times.empty()
                                ? std::nan("")
                                : r.map.critical_times.front(),
                            std::nan("")};
                } else if (st == "two_tc") {
                    const auto r = two_tc_map(shape, rate);
                    cell.eta = r.eta;
                    cell.c = r.c;
                    if (!r.map.critical_times.empty())
                        cell.tc1 = r.map.critical_times.front();
                    if (r.map.critical_times.size() > 1)
                        cell.tc2 = r.map.critical_times.back();
                } else if (st == "c_leq_one") {
                    const auto r = c_leq_one_eta(shape, rate);
                    cell.eta = r.eta;
                    cell.c = r.c;
                } else if (st == "asymptote") {
                    if (shape.is_truncated()) {
                        if (!endpoint) endpoint = shape.taylor_endpoint();
                        cell.eta = 1.0 - truncation_inefficiency(
                                             endpoint->n, endpoint->alpha,
                                             rate, shape.tau());
                    } else {
                        cell.eta =
                            table1_inefficiency(shape.kind(), rate, shape.tau())
                                .eta;
                    }
                } else if (st == "oct") {
                    auto grid = ControlGrid::make(
                        shape.lo(), shape.hi(), spec.oct_knots,
                        spec.oct_dense_end ? GridSpacing::DenseAtEnd
                                           : GridSpacing::Uniform);
                    OctOptions o;
                    o.max_iter = spec.oct_max_iter;
                    o.restarts = spec.oct_restarts;
                    o.seed += i;  // deterministic per axis point
                    o.jobs = 1;   // the outer loop already parallelizes
                    const auto r = oct_optimize(
                        shape, atom_params_for_rate(rate), grid, nullptr, o);
                    cell.eta = r.eta;
                } else {
                    throw IoError("unknown strategy in sweep spec: " + st);
                }
            }
        },
        jobs);

    CsvWriter csv(out_path, ctx.meta(),
                  {"axis", "rate", "strategy", "eta", "one_minus_eta", "c",
                   "t_c1", "t_c2"});
    for (std::size_t i = 0; i < axis.size(); ++i) {
        const double rate =
            spec.axis_in_tc_units ? axis[i] / tc : axis[i] / shape.tau();
        for (std::size_t k = 0; k < spec.strategies.size(); ++k) {
            const Cell& cell = table[i][k];
            csv.row({std::to_string(axis[i]), std::to_string(rate),
                     spec.strategies[k], std::to_string(cell.eta),
                     std::to_string(1.0 - cell.eta), std::to_string(cell.c),
                     std::to_string(cell.tc1), std::to_string(cell.tc2)});
        }
    }
    return 0;
}

int cmd_control(const CommandContext& ctx, const ShapeArgs& sa,
                double rate_tau, double rate_tc, const std::string& regime,
                const std::string& strategy, const std::string& params_file,
                double delta, const std::string& out_base) {
    const PulseShape shape = sa.build();
    double rate = rate_tc > 0 ? rate_tc / shape.time_variance()
                              : rate_tau / shape.tau();
    const PipelineResult res = strategy == "two-tc" ? two_tc_map(shape, rate)
                                                    : optimize_c(shape, rate);
    ControlDrive drive;
    if (regime == "atom") {
        drive = synthesize_omega_atom(res.map, delta, rate);
    } else if (regime == "cavity") {
        MemoryParams p;
        if (!params_file.empty()) {
            p = load_params(params_file);
            const auto d = derived(p);
            if (std::abs(d.kappa - rate) > 1e-9 * rate)
                throw IoError(
                    "params file kappa does not match the requested rate");
        } else {
            p.kappa_in = rate;
            p.g_sqrtN = std::sqrt(100.0 / shape.tau() * rate);  // Gamma tau = 100
            p.delta = delta;
        }
        drive = synthesize_omega_cavity(res.map, p);
    } else {
        throw CLI::ValidationError("--regime", "must be atom or cavity");
    }
    export_drive(drive, out_base + ".csv", out_base + ".json", ctx.meta());

    json out = map_to_json(res);
    out["regime"] = regime;
    out["impulses"] = drive.impulses.size();
    out["post_tc_mode"] =
        drive.post_tc_mode == PostTcMode::Zero ? "zero" : "decouple";
    out["drive_csv"] = out_base + ".csv";
    out["drive_json"] = out_base + ".json";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_crossover(const CommandContext& ctx, const std::string& params_file,
                  double target, double g_min, double g_max, int points,
                  const std::string& out_path, int jobs) {
    const MemoryParams base = load_params(params_file);
    const double kappa = derived(base).kappa;
    const double b = sech_b_value(target);

    std::vector<double> g(points), tc_atom(points);
    for (int i = 0; i < points; ++i) {
        const double u = points == 1 ? 0.0 : double(i) / (points - 1);
        g[i] = g_min * std::pow(g_max / g_min, u);
    }
    parallel_for(
        points,
        [&](std::size_t i) {
            const double Gamma = g[i] * g[i] / base.kappa_in;
            tc_atom[i] = b / Gamma;
        },
        jobs);

    CsvWriter csv(out_path, ctx.meta(),
                  {"g_sqrtN", "Gamma", "tc_min_atom", "tc_min_cavity"});
    for (int i = 0; i < points; ++i) {
        const double Gamma = g[i] * g[i] / base.kappa_in;
        csv.row({g[i], Gamma, tc_atom[i], b / kappa});
    }
    json out;
    out["b"] = b;
    out["target"] = target;
    out["kappa"] = kappa;
    out["crossing_g"] = std::sqrt(kappa * base.kappa_in);  // Gamma = kappa
    out["csv"] = out_path;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_asymptote(const ShapeArgs& sa, double rate_tau, double rate_tc) {
    const PulseShape shape = sa.build();
    const double rate = rate_tc > 0 ? rate_tc / shape.time_variance()
                                    : rate_tau / shape.tau();
    json out;
    if (shape.is_truncated()) {
        const auto ep = shape.taylor_endpoint();
        const double ineff =
            truncation_inefficiency(ep.n, ep.alpha, rate, shape.tau());
        out["eta"] = 1.0 - ineff;
        out["one_minus_eta"] = ineff;
        out["regime"] = to_string(AsymptoteRegime::Truncation);
        out["n"] = ep.n;
        out["alpha"] = ep.alpha;
        out["beta"] = beta(ep.n);
    } else {
        const auto r = table1_inefficiency(shape.kind(), rate, shape.tau());
        out["eta"] = r.eta;
        out["one_minus_eta"] = 1.0 - r.eta;
        out["regime"] = to_string(r.regime);
        out["validity_note"] = r.validity_note;
    }
    out["rate_tau"] = rate * shape.tau();
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const CommandContext& ctx, const ShapeArgs& sa,
                 double rate_tau, double rate_tc, const std::string& regime,
                 const std::string& tier_name, double delta, bool storage,
                 const std::string& out_path) {
    const PulseShape shape = sa.build();
    const double rate = rate_tc > 0 ? rate_tc / shape.time_variance()
                                    : rate_tau / shape.tau();
    const auto res = optimize_c(shape, rate);

    ModelTier tier;
    MemoryParams p;
    ControlDrive drive;
    if (regime == "atom") {
        p = atom_params_for_rate(rate);
        p.delta = delta;
        drive = synthesize_omega_atom(res.map, delta, rate);
        tier = tier_name == "full" ? ModelTier::Full
                                   : ModelTier::AtomLimitedLossless;
    } else if (regime == "cavity") {
        p.kappa_in = rate;
        p.g_sqrtN = std::sqrt(100.0 / shape.tau() * rate);
        p.delta = delta;
        drive = synthesize_omega_cavity(res.map, p);
        tier = tier_name == "full" ? ModelTier::Full
                                   : ModelTier::CavityLimitedSpecial;
    } else {
        throw CLI::ValidationError("--regime", "must be atom or cavity");
    }

    SimOptions opt;
    opt.target = &shape;
    json out;
    Trajectory traj;
    if (storage) {
        const auto rev = time_reverse_drive(drive, drive.t1, drive.t2);
        auto st = simulate_storage(rev, shape, p, tier, opt);
        out["eta_sim"] = st.eta_s;
        traj = std::move(st.traj);
    } else {
        traj = simulate_retrieval(drive, p, tier, drive.t1, drive.t2, 1.0, opt);
        out["eta_sim"] = overlap_efficiency(traj, shape);
    }
    export_trajectory(traj, out_path, ctx.meta());

    double max_resid = 0.0;
    for (double r : traj.conservation)
        max_resid = std::max(max_resid, std::abs(r));
    out["eta_pipeline"] = res.eta;
    out["out_norm"] = traj.out_norm.back();
    out["max_conservation_residual"] = max_resid;
    out["tier"] = to_string(tier);
    out["csv"] = out_path;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_oct(const CommandContext& ctx, const std::string& scenario_path,
            const std::string& scoreboard_path, int jobs) {
    std::ifstream in(scenario_path);
    if (!in) throw IoError("cannot open " + scenario_path);
    json sc;
    try {
        in >> sc;
    } catch (const json::exception& e) {
        throw IoError(scenario_path + ": " + std::string(e.what()));
    }

    ShapeArgs sa;
    sa.kind = sc.at("shape").get<std::string>();
    sa.tau = sc.value("tau", 1.0);
    sa.window = sc.value("window", 0.0);
    sa.zero_onset = sc.value("zero_onset", false);
    const PulseShape shape = sa.build();

    const double gamma_tc = sc.value("gamma_tc", 1.2);
    const double rate = gamma_tc / shape.time_variance();

    OctOptions o;
    o.max_iter = sc.value("max_iter", 200);
    o.restarts = sc.value("restarts", 3);
    o.sim_steps = sc.value("sim_steps", 4000);
    o.seed = sc.value("seed", 20240917);
    o.jobs = jobs;
    const int knots = sc.value("knots", 129);
    const bool dense = sc.value("spacing", std::string("uniform")) ==
                       "dense-at-end";
    const bool linear = sc.value("interp", std::string("cubic")) == "linear";
    auto grid = ControlGrid::make(
        shape.lo(), shape.hi(), knots,
        dense ? GridSpacing::DenseAtEnd : GridSpacing::Uniform,
        linear ? GridInterp::Linear : GridInterp::Cubic);

    const auto ansatz = optimize_c(shape, rate);
    ControlDrive seed_drive;
    const ControlDrive* seed = nullptr;
    if (sc.value("seed_from_ansatz", false)) {
        // The optimization runs the storage direction, so the seed is the
        // time reverse of the synthesized retrieval drive.
        const auto retrieval = synthesize_omega_atom(ansatz.map, 0.0, rate);
        seed_drive = time_reverse_drive(retrieval, retrieval.t1, retrieval.t2);
        seed = &seed_drive;
    }
    const auto res =
        oct_optimize(shape, atom_params_for_rate(rate), grid, seed, o);

    const bool existed = std::filesystem::exists(scoreboard_path);
    std::ofstream out(scoreboard_path, std::ios::app);
    if (!out) throw IoError("cannot write " + scoreboard_path);
    if (!existed) {
        out << "# cavmem csv schema " << kCsvSchemaVersion << "\n";
        for (const auto& m : ctx.meta()) out << "# " << m << "\n";
        out << "shape,window,gamma_tc,knots,spacing,interp,eta_oct,eta_ansatz,"
               "iterations,converged\n";
    }
    out << sa.kind << "," << sa.window << "," << gamma_tc << "," << knots
        << "," << (dense ? "dense-at-end" : "uniform") << ","
        << (linear ? "linear" : "cubic") << "," << std::setprecision(17)
        << res.eta << "," << ansatz.eta << "," << res.iterations << ","
        << (res.converged ? 1 : 0) << "\n";

    json summary;
    summary["eta_oct"] = res.eta;
    summary["eta_ansatz"] = ansatz.eta;
    summary["iterations"] = res.iterations;
    summary["converged"] = res.converged;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CommandContext ctx;
    for (int i = 0; i < argc; ++i) ctx.argv.emplace_back(argv[i]);

    CLI::App app{"cavity-assisted quantum memory control synthesis"};
    app.set_version_flag("--version", std::string("cavmem ") + kVersion);
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs,
                   "worker threads (default: CAVMEM_JOBS or all cores)");

    // efficiency
    auto* eff = app.add_subcommand("efficiency",
                                   "optimized storage/retrieval efficiency");
    ShapeArgs eff_shape;
    eff_shape.attach(eff);
    double eff_rt = 0.0, eff_rtc = 0.0;
    std::string eff_strategy = "ansatz";
    auto* eff_g = eff->add_option("--gamma-tau", eff_rt,
                                  "bandwidth product rate*tau");
    auto* eff_gtc = eff->add_option("--gamma-tc", eff_rtc,
                                    "bandwidth product rate*Tc");
    eff->add_option("--strategy", eff_strategy,
                    "ansatz | two-tc | c-leq-one");
    eff_g->excludes(eff_gtc);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    std::string sweep_spec, sweep_out;
    sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
    sweep->add_option("--out", sweep_out, "output CSV")->required();

    // control
    auto* control = app.add_subcommand("control", "synthesize a drive");
    ShapeArgs ctl_shape;
    ctl_shape.attach(control);
    double ctl_rt = 0.0, ctl_rtc = 0.0, ctl_delta = 0.0;
    std::string ctl_regime = "atom", ctl_strategy = "ansatz", ctl_params,
                ctl_out = "drive";
    control->add_option("--gamma-tau", ctl_rt, "bandwidth product rate*tau");
    control->add_option("--gamma-tc", ctl_rtc, "bandwidth product rate*Tc");
    control->add_option("--regime", ctl_regime, "atom | cavity");
    control->add_option("--strategy", ctl_strategy, "ansatz | two-tc");
    control->add_option("--params", ctl_params, "memory parameter file");
    control->add_option("--delta", ctl_delta, "two-photon detuning");
    control->add_option("--out", ctl_out, "output base path");

    // crossover
    auto* cross = app.add_subcommand(
        "crossover", "minimal pulse duration against coupling strength");
    std::string cross_params, cross_out = "crossover.csv";
    double cross_target = 0.99, g_min = 0.1, g_max = 10.0;
    int cross_points = 33;
    cross->add_option("--params", cross_params, "memory parameter file")
        ->required();
    cross->add_option("--target", cross_target, "efficiency target");
    cross->add_option("--g-min", g_min, "smallest g sqrtN");
    cross->add_option("--g-max", g_max, "largest g sqrtN");
    cross->add_option("--points", cross_points, "axis points");
    cross->add_option("--out", cross_out, "output CSV");

    // asymptote
    auto* asym = app.add_subcommand("asymptote", "closed-form inefficiency");
    ShapeArgs asym_shape;
    asym_shape.attach(asym);
    double asym_rt = 0.0, asym_rtc = 0.0;
    asym->add_option("--gamma-tau", asym_rt, "bandwidth product rate*tau");
    asym->add_option("--gamma-tc", asym_rtc, "bandwidth product rate*Tc");

    // simulate
    auto* sim = app.add_subcommand(
        "simulate", "synthesize a drive and integrate the dynamics");
    ShapeArgs sim_shape;
    sim_shape.attach(sim);
    double sim_rt = 0.0, sim_rtc = 0.0, sim_delta = 0.0;
    std::string sim_regime = "atom", sim_tier = "reduced",
                sim_out = "trajectory.csv";
    bool sim_storage = false;
    sim->add_option("--gamma-tau", sim_rt, "bandwidth product rate*tau");
    sim->add_option("--gamma-tc", sim_rtc, "bandwidth product rate*Tc");
    sim->add_option("--regime", sim_regime, "atom | cavity");
    sim->add_option("--tier", sim_tier, "reduced | full");
    sim->add_option("--delta", sim_delta, "two-photon detuning");
    sim->add_flag("--storage", sim_storage,
                  "run storage with the time-reversed drive");
    sim->add_option("--out", sim_out, "trajectory CSV");

    // oct
    auto* oct = app.add_subcommand("oct", "numerical optimal-control baseline");
    std::string oct_scenario, oct_scoreboard = "oct_scoreboard.csv";
    oct->add_option("--scenario", oct_scenario, "scenario JSON")->required();
    oct->add_option("--scoreboard", oct_scoreboard, "CSV scoreboard (appended)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eff->parsed()) {
            if (eff_rt <= 0 && eff_rtc <= 0)
                throw CLI::ValidationError("--gamma-tau",
                                           "a positive bandwidth is required");
            return cmd_efficiency(eff_shape, eff_rt, eff_rtc, eff_strategy);
        }
        if (sweep->parsed()) return cmd_sweep(ctx, sweep_spec, sweep_out, jobs);
        if (control->parsed()) {
            if (ctl_rt <= 0 && ctl_rtc <= 0)
                throw CLI::ValidationError("--gamma-tau",
                                           "a positive bandwidth is required");
            return cmd_control(ctx, ctl_shape, ctl_rt, ctl_rtc, ctl_regime,
                               ctl_strategy, ctl_params, ctl_delta, ctl_out);
        }
        if (cross->parsed())
            return cmd_crossover(ctx, cross_params, cross_target, g_min, g_max,
                                 cross_points, cross_out, jobs);
        if (asym->parsed()) {
            if (asym_rt <= 0 && asym_rtc <= 0)
                throw CLI::ValidationError("--gamma-tau",
                                           "a positive bandwidth is required");
            return cmd_asymptote(asym_shape, asym_rt, asym_rtc);
        }
        if (sim->parsed()) {
            if (sim_rt <= 0 && sim_rtc <= 0)
                throw CLI::ValidationError("--gamma-tau",
                                           "a positive bandwidth is required");
            return cmd_simulate(ctx, sim_shape, sim_rt, sim_rtc, sim_regime,
                                sim_tier, sim_delta, sim_storage, sim_out);
        }
        if (oct->parsed()) return cmd_oct(ctx, oct_scenario, oct_scoreboard, jobs);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

}  // namespace cavmem
