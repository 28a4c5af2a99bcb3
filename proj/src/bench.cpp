#include "halotrace/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace halotrace {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double median_of(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vec3 median_abs_delta(const std::vector<TraceCascade>& cascades,
                      const HaloSolution TraceCascade::*member) {
    std::vector<double> dx, dy, dz;
    for (const TraceCascade& c : cascades) {
        const HaloSolution& s = c.*member;
        if (!s.solved()) continue;
        dx.push_back(std::abs(s.per_coordinate_errors[0]));
        dy.push_back(std::abs(s.per_coordinate_errors[1]));
        dz.push_back(std::abs(s.per_coordinate_errors[2]));
    }
    return {median_of(dx), median_of(dy), median_of(dz)};
}

TraceReport make_report(int id, const TruthPoint& truth, const HaloSolution& sol) {
    TraceReport r;
    r.point_id = id;
    r.true_az_km = truth.true_az_km;
    r.true_t = truth.true_t;
    r.truth = truth.position;
    r.disposition = sol.disposition;
    if (sol.solved()) {
        r.recovered = true;
        r.rec_az_km = sol.az_km;
        r.rec_t = sol.t;
        r.delta = sol.per_coordinate_errors;
        r.error_norm = sol.error_norm;
    }
    return r;
}

}  // namespace

void RunConfig::validate() const {
    system.validate();
    solver.validate();
    if (n_points <= 0) throw std::invalid_argument("RunConfig: n_points must be positive");
    if (method < 1 || method > 3) throw std::invalid_argument("RunConfig: method must be 1, 2 or 3");
}

ExperimentResult run_experiment(const RunConfig& config) {
    config.validate();
    const LpCoefficients coeffs = build_coefficients(config.system);

    ExperimentResult result;
    TruthSampleSet sample =
        sample_truth_points(config.n_points, config.seed, config.solver.az_lo_km,
                            config.solver.az_hi_km, config.system, config.corrector);
    result.truth = std::move(sample.points);
    result.orbits = std::move(sample.orbits);
    result.summary.corrector_resamples = sample.corrector_resamples;
    result.summary.n_points = config.n_points;

    result.cascades.reserve(config.n_points);
    result.reports.reserve(config.n_points);

    for (int i = 0; i < config.n_points; ++i) {
        const TruthPoint& tp = result.truth[i];
        const auto t0 = std::chrono::steady_clock::now();
        TraceCascade cascade;
        try {
            cascade = trace_cascade(Query{tp.position}, config.solver, coeffs);
        } catch (const std::exception&) {
            cascade = TraceCascade{};  // every view unsolved
        }
        const auto t1 = std::chrono::steady_clock::now();

        const HaloSolution& view = config.method == 1   ? cascade.m1
                                   : config.method == 2 ? cascade.m2
                                                        : cascade.m3;
        TraceReport report = make_report(i, tp, view);
        if (config.record_timing) {
            report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        result.reports.push_back(report);
        result.cascades.push_back(cascade);
    }

    ExperimentSummary& sum = result.summary;
    for (const TraceCascade& c : result.cascades) {
        c.m1.solved() ? ++sum.m1.solved : ++sum.m1.unsolved;

        if (c.m2.solved()) {
            ++sum.m2.solved;
            c.m2.disposition == Disposition::Method2Refined ? ++sum.m2_refined : ++sum.m2_kept;
        } else if (c.m2.disposition == Disposition::Discarded) {
            ++sum.m2.discarded;
        } else {
            ++sum.m2.unsolved;
        }

        if (c.m3.solved()) {
            ++sum.m3.solved;
            if (c.m3.disposition == Disposition::Method2Unique) ++sum.m3_unique;
        } else if (c.m3.disposition == Disposition::Discarded) {
            ++sum.m3.discarded;
        } else {
            ++sum.m3.unsolved;
        }
    }
    sum.m1_median_abs = median_abs_delta(result.cascades, &TraceCascade::m1);
    sum.m2_median_abs = median_abs_delta(result.cascades, &TraceCascade::m2);
    sum.m3_median_abs = median_abs_delta(result.cascades, &TraceCascade::m3);
    return result;
}

void emit_csv(const std::vector<TraceReport>& reports, const std::string& path) {
    if (reports.empty()) throw std::invalid_argument("emit_csv: no reports");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << "point_id,true_az_km,true_t,x1,y1,z1,rec_az_km,rec_t,dx,dy,dz,err_norm,disposition,"
           "wall_ms\n";
    for (const TraceReport& r : reports) {
        out << r.point_id << ',' << fmt(r.true_az_km) << ',' << fmt(r.true_t) << ','
            << fmt(r.truth[0]) << ',' << fmt(r.truth[1]) << ',' << fmt(r.truth[2]) << ',';
        if (r.recovered) {
            out << fmt(r.rec_az_km) << ',' << fmt(r.rec_t) << ',' << fmt(r.delta[0]) << ','
                << fmt(r.delta[1]) << ',' << fmt(r.delta[2]) << ',' << fmt(r.error_norm);
        } else {
            out << ",,,,,";
        }
        out << ',' << to_string(r.disposition) << ',' << fmt(r.wall_ms) << '\n';
    }
    if (!out.good()) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<TraceReport> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);

    std::vector<TraceReport> reports;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (f.size() != 14) throw std::runtime_error("load_csv: malformed row in " + path);
        TraceReport r;
        r.point_id = std::stoi(f[0]);
        r.true_az_km = std::stod(f[1]);
        r.true_t = std::stod(f[2]);
        r.truth = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
        r.recovered = !f[6].empty();
        if (r.recovered) {
            r.rec_az_km = std::stod(f[6]);
            r.rec_t = std::stod(f[7]);
            r.delta = {std::stod(f[8]), std::stod(f[9]), std::stod(f[10])};
            r.error_norm = std::stod(f[11]);
        }
        r.disposition = disposition_from_string(f[12]);
        r.wall_ms = std::stod(f[13]);
        reports.push_back(r);
    }
    return reports;
}

std::vector<std::string> emit_plot_data(const std::vector<TraceReport>& reports,
                                        const std::string& path_prefix, double length_unit_km) {
    if (reports.empty()) throw std::invalid_argument("emit_plot_data: no reports");
    const char* coord_names[3] = {"x", "y", "z"};
    std::vector<std::string> written;
    for (int coord = 0; coord < 3; ++coord) {
        for (int axis = 0; axis < 2; ++axis) {
            const std::string path = path_prefix + "_" + coord_names[coord] + "err_vs_" +
                                     (axis == 0 ? "t" : "az") + ".csv";
            std::ofstream out(path);
            if (!out) throw std::runtime_error("emit_plot_data: cannot open " + path);
            out << (axis == 0 ? "t" : "az_km") << ",error,error_km,disposition\n";
            for (const TraceReport& r : reports) {
                if (!r.recovered) continue;
                out << fmt(axis == 0 ? r.rec_t : r.rec_az_km) << ',' << fmt(r.delta[coord]) << ','
                    << fmt(r.delta[coord] * length_unit_km) << ',' << to_string(r.disposition)
                    << '\n';
            }
            if (!out.good()) throw std::runtime_error("emit_plot_data: write failed for " + path);
            written.push_back(path);
        }
    }
    return written;
}

std::string format_summary(const ExperimentSummary& s) {
    std::ostringstream os;
    os << "points: " << s.n_points << "\n"
       << "corrector_resamples: " << s.corrector_resamples << "\n"
       << "method1: solved " << s.m1.solved << ", unsolved " << s.m1.unsolved << "\n"
       << "method2: solved " << s.m2.solved << " (kept " << s.m2_kept << ", refined "
       << s.m2_refined << "), discarded " << s.m2.discarded << ", unsolved " << s.m2.unsolved
       << "\n"
       << "method3: solved " << s.m3.solved << " (rescued " << s.m3_unique << "), discarded "
       << s.m3.discarded << ", unsolved " << s.m3.unsolved << "\n";
    auto med = [&os](const char* name, const Vec3& m) {
        os << name << " median |dx|,|dy|,|dz|: " << fmt(m[0]) << ", " << fmt(m[1]) << ", "
           << fmt(m[2]) << "\n";
    };
    med("method1", s.m1_median_abs);
    med("method2", s.m2_median_abs);
    med("method3", s.m3_median_abs);
    return os.str();
}

Disposition disposition_from_string(const std::string& s) {
    if (s == "method1_accepted") return Disposition::Method1Accepted;
    if (s == "method2_refined") return Disposition::Method2Refined;
    if (s == "method2_unique") return Disposition::Method2Unique;
    if (s == "discarded") return Disposition::Discarded;
    if (s == "unsolved") return Disposition::Unsolved;
    throw std::invalid_argument("unknown disposition: " + s);
}

}  // namespace halotrace
