// halotrace_cli.cpp: command-line front end. Subcommands: lagrange, coeffs,
// halo, trace, experiment. Exit codes: 0 success, 1 usage/config error,
// 2 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "halotrace/bench.hpp"

namespace {

using namespace halotrace;

LagrangePoint parse_lpoint(int n) {
    if (n < 1 || n > 5) throw CLI::ValidationError("--lpoint", "must be 1..5");
    return static_cast<LagrangePoint>(n);
}

struct CommonArgs {
    double mu = SystemConfig{}.mu;
    int lpoint = 2;
    std::string family = "northern";
    double length_unit_km = SystemConfig{}.length_unit_km;

    SystemConfig to_config() const {
        SystemConfig cfg;
        cfg.mu = mu;
        cfg.lagrange_point = parse_lpoint(lpoint);
        if (family == "northern" || family == "n") {
            cfg.family = HaloFamily::Northern;
        } else if (family == "southern" || family == "s") {
            cfg.family = HaloFamily::Southern;
        } else {
            throw CLI::ValidationError("--family", "must be northern or southern");
        }
        cfg.length_unit_km = length_unit_km;
        return cfg;
    }
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Expands `--config FILE` into `--key=value` tokens for every config key not
// already present as a flag, so command-line flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line is not key=value: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line has empty key: " + line);
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                given = true;
                break;
            }
        }
        if (!given) args.push_back(flag + "=" + value);
    }
    return args;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--mu", args.mu, "mass ratio m2/(m1+m2)");
    cmd->add_option("--lpoint", args.lpoint, "Lagrange point number (1..5)");
    cmd->add_option("--family", args.family, "halo family: northern|southern");
    cmd->add_option("--length-unit-km", args.length_unit_km, "km per normalized distance unit");
}

void add_solver(CLI::App* cmd, SolverSettings& s) {
    cmd->add_option("--az-lo-km", s.az_lo_km, "amplitude scan lower bound, km");
    cmd->add_option("--az-hi-km", s.az_hi_km, "amplitude scan upper bound, km");
    cmd->add_option("--tol-x", s.tol_x, "x-residual acceptance tolerance");
    cmd->add_option("--tol-norm", s.tol_norm_accept, "norm-search acceptance tolerance");
    cmd->add_option("--tol-norm-trigger", s.tol_norm_trigger, "norm re-search trigger");
    cmd->add_option("--grid", s.grid_points_per_pass, "amplitude samples per pass");
    cmd->add_option("--shrink", s.shrink_factor, "window shrink factor per pass");
    cmd->add_option("--passes", s.max_passes, "maximum refinement passes");
}

int run_lagrange(const CommonArgs& common) {
    const auto pts = lagrange_points(common.mu);
    for (int i = 0; i < 5; ++i) {
        std::printf("L%d % .17g % .17g % .17g\n", i + 1, pts[i][0], pts[i][1], pts[i][2]);
    }
    return 0;
}

int run_coeffs(const CommonArgs& common, double az_km) {
    const LpCoefficients c = build_coefficients(common.to_config());
    std::fputs(dump_coefficients(c).c_str(), stdout);
    if (az_km > 0) {
        const Amplitude a = make_amplitude(az_km, c);
        std::printf("az_km=%.17g\naz_nd=%.17g\nax_nd=%.17g\nomega=%.17g\nperiod=%.17g\n", a.az_km,
                    a.az_nd, a.ax_nd, c.omega(a.az_nd), c.period(a.az_nd));
    }
    return 0;
}

int run_halo(const CommonArgs& common, double az_km, double tol, int samples,
             const std::string& out) {
    const SystemConfig cfg = common.to_config();
    const LpCoefficients c = build_coefficients(cfg);
    CorrectorOptions opts;
    opts.tol = tol;
    opts.trajectory_samples = samples;
    HaloOrbit orbit = differential_correct(richardson_guess(az_km, c), cfg.mu, opts);
    orbit.az_km = az_km;
    std::printf("az_km=%.17g\nx0=%.17g\nz0=%.17g\nvy0=%.17g\nhalf_period=%.17g\n"
                "iterations=%d\nresidual=%.3g\n",
                az_km, orbit.initial_state.x, orbit.initial_state.z, orbit.initial_state.vy,
                orbit.half_period, orbit.iterations, orbit.residual);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open " + out);
        f << "t,x,y,z,vx,vy,vz\n";
        char buf[256];
        for (std::size_t i = 0; i < orbit.trajectory.size(); ++i) {
            const State6& s = orbit.trajectory.states[i];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          orbit.trajectory.times[i], s.x, s.y, s.z, s.vx, s.vy, s.vz);
            f << buf;
        }
        std::printf("trajectory=%s\n", out.c_str());
    }
    return 0;
}

int run_trace(const CommonArgs& common, const SolverSettings& solver, double x, double y, double z,
              const std::string& units, int method, const std::string& format) {
    if (method < 1 || method > 3) throw CLI::ValidationError("--method", "must be 1, 2 or 3");
    const LpCoefficients c = build_coefficients(common.to_config());
    Query q{{x, y, z}};
    if (units == "km") {
        q = query_from_km({x, y, z}, c);
    } else if (units != "nd") {
        throw CLI::ValidationError("--units", "must be nd or km");
    }

    const TraceCascade cascade = trace_cascade(q, solver, c);
    const HaloSolution& sol = method == 1 ? cascade.m1 : method == 2 ? cascade.m2 : cascade.m3;

    if (format == "csv") {
        std::printf("t,az_km,err_norm,dx,dy,dz,disposition\n");
        if (sol.solved()) {
            std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", sol.t, sol.az_km,
                        sol.error_norm, sol.per_coordinate_errors[0], sol.per_coordinate_errors[1],
                        sol.per_coordinate_errors[2], to_string(sol.disposition));
        } else {
            std::printf(",,,,,,%s\n", to_string(sol.disposition));
        }
    } else {
        if (sol.solved()) {
            std::printf("disposition: %s\nt = %.12g\nAz = %.12g km\nerror norm = %.3g\n"
                        "per-coordinate error = (%.3g, %.3g, %.3g)\n",
                        to_string(sol.disposition), sol.t, sol.az_km, sol.error_norm,
                        sol.per_coordinate_errors[0], sol.per_coordinate_errors[1],
                        sol.per_coordinate_errors[2]);
        } else {
            std::printf("disposition: %s (no acceptable amplitude found)\n",
                        to_string(sol.disposition));
        }
    }
    return 0;
}

int run_batch(const CommonArgs& common, RunConfig rc, const std::string& out_dir) {
    rc.system = common.to_config();
    rc.validate();
    std::filesystem::create_directories(out_dir);

    const auto wall0 = std::chrono::steady_clock::now();
    const ExperimentResult result = run_experiment(rc);
    const double wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    const std::string prefix = out_dir + "/method" + std::to_string(rc.method);
    emit_csv(result.reports, prefix + "_trace.csv");
    emit_plot_data(result.reports, prefix, rc.system.length_unit_km);
    emit_orbit_catalog(result.orbits, out_dir + "/orbits.csv");
    std::ofstream summary(out_dir + "/summary.txt");
    summary << format_summary(result.summary);
    if (!summary.good()) throw std::runtime_error("cannot write " + out_dir + "/summary.txt");

    std::fputs(format_summary(result.summary).c_str(), stdout);
    std::printf("wall_s: %.2f\nwrote: %s_trace.csv, %s_{x,y,z}err_vs_{t,az}.csv, %s/orbits.csv, "
                "%s/summary.txt\n",
                wall_s, prefix.c_str(), prefix.c_str(), out_dir.c_str(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"halotrace: trace CR3BP positions to halo orbits (t, Az)"};
    app.require_subcommand(1);

    CommonArgs common;
    SolverSettings solver;
    RunConfig rc;

    auto* lagrange_cmd = app.add_subcommand("lagrange", "print the five equilibrium points");
    add_common(lagrange_cmd, common);

    double coeffs_az_km = 0;
    auto* coeffs_cmd = app.add_subcommand("coeffs", "dump series constants as key=value text");
    add_common(coeffs_cmd, common);
    coeffs_cmd->add_option("--az-km", coeffs_az_km, "also print amplitude-dependent values");

    double halo_az_km = 100000.0, halo_tol = 1e-12;
    int halo_samples = 512;
    std::string halo_out;
    auto* halo_cmd = app.add_subcommand("halo", "differentially correct one halo orbit");
    add_common(halo_cmd, common);
    halo_cmd->add_option("--az-km", halo_az_km, "out-of-plane amplitude, km")->required();
    halo_cmd->add_option("--tol", halo_tol, "corrector residual tolerance");
    halo_cmd->add_option("--samples", halo_samples, "trajectory samples over one period");
    halo_cmd->add_option("--out", halo_out, "write the period trajectory CSV here");

    double tx = 0, ty = 0, tz = 0;
    std::string trace_units = "nd", trace_format = "text";
    int trace_method = 3;
    auto* trace_cmd = app.add_subcommand("trace", "map one position to (t, Az)");
    add_common(trace_cmd, common);
    add_solver(trace_cmd, solver);
    trace_cmd->add_option("--x", tx, "barycentric x")->required();
    trace_cmd->add_option("--y", ty, "barycentric y")->required();
    trace_cmd->add_option("--z", tz, "barycentric z")->required();
    trace_cmd->add_option("--units", trace_units, "coordinate units: nd|km");
    trace_cmd->add_option("--method", trace_method, "search mode 1, 2 or 3");
    trace_cmd->add_option("--format", trace_format, "output format: text|csv");

    std::string exp_out = "out";
    auto* exp_cmd = app.add_subcommand("experiment", "run the batch evaluation");
    add_common(exp_cmd, common);
    add_solver(exp_cmd, solver);
    exp_cmd->add_option("--n", rc.n_points, "number of truth points");
    exp_cmd->add_option("--seed", rc.seed, "random seed");
    exp_cmd->add_option("--method", rc.method, "reported mode: 1, 2 or 3");
    exp_cmd->add_option("--out", exp_out, "output directory");
    exp_cmd->add_flag("--timing", rc.record_timing,
                      "record real per-point wall times (not reproducible)");

    app.footer("Any long flag may also come from a --config FILE of key=value lines\n"
               "(# comments); explicit flags override the file.");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<const char*> cargs;
        cargs.reserve(args.size());
        for (const std::string& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
        if (lagrange_cmd->parsed()) return run_lagrange(common);
        if (coeffs_cmd->parsed()) return run_coeffs(common, coeffs_az_km);
        if (halo_cmd->parsed()) return run_halo(common, halo_az_km, halo_tol, halo_samples, halo_out);
        if (trace_cmd->parsed()) {
            return run_trace(common, solver, tx, ty, tz, trace_units, trace_method, trace_format);
        }
        if (exp_cmd->parsed()) {
            rc.solver = solver;
            return run_batch(common, rc, exp_out);
        }
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
}
