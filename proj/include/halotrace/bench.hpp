// bench.hpp: batch evaluation harness. Samples random truth points, traces
// each one back through the inverse solver, and reports per-point errors and
// per-mode statistics as CSV and plot-ready data files.

#ifndef HALOTRACE_BENCH_HPP
#define HALOTRACE_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "halotrace/halo_factory.hpp"
#include "halotrace/inverse_solver.hpp"

namespace halotrace {

struct RunConfig {
    SystemConfig system{};
    SolverSettings solver{};
    CorrectorOptions corrector{};
    int n_points = 1000;
    std::uint64_t seed = 1;
    int method = 3;             // which mode's view lands in the reports
    bool record_timing = false; // wall_ms stays 0 unless enabled (reproducible output)

    void validate() const;
};

struct TraceReport {
    int point_id = 0;
    double true_az_km = 0;
    double true_t = 0;
    Vec3 truth{};
    bool recovered = false;
    double rec_az_km = 0;
    double rec_t = 0;
    Vec3 delta{};            // reconstructed - truth, valid iff recovered
    double error_norm = 0;   // valid iff recovered
    Disposition disposition = Disposition::Unsolved;
    double wall_ms = 0;
};

struct MethodCounts {
    int solved = 0;
    int unsolved = 0;
    int discarded = 0;  // mode-2/3 rejections of a mode-1 answer
};

struct ExperimentSummary {
    int n_points = 0;
    int corrector_resamples = 0;
    MethodCounts m1, m2, m3;
    int m2_kept = 0;     // mode-1 answers below the norm trigger
    int m2_refined = 0;  // answers replaced by the norm search
    int m3_unique = 0;   // mode-1 failures rescued by the norm search
    // Median |dx|, |dy|, |dz| over each mode's solved points.
    Vec3 m1_median_abs{}, m2_median_abs{}, m3_median_abs{};
};

struct ExperimentResult {
    std::vector<TraceReport> reports;     // selected mode's view, ordered by point_id
    std::vector<TraceCascade> cascades;   // all three views per point
    std::vector<TruthPoint> truth;
    std::vector<HaloOrbit> orbits;
    ExperimentSummary summary;
};

/// Runs the full pipeline; deterministic given (config, seed). Per-point
/// trace failures are recorded as unsolved, never aborting the batch.
ExperimentResult run_experiment(const RunConfig& config);

/// Header + one row per point:
/// point_id,true_az_km,true_t,x1,y1,z1,rec_az_km,rec_t,dx,dy,dz,err_norm,disposition,wall_ms
/// Full-precision decimal text; recovery fields are empty when unsolved.
void emit_csv(const std::vector<TraceReport>& reports, const std::string& path);

/// Inverse of emit_csv (parse-print identity).
std::vector<TraceReport> load_csv(const std::string& path);

/// Six files: {x,y,z} error against t and against Az, rows
/// (t_or_az, error, error_km, disposition), solved points only. The error
/// column is normalized; error_km applies length_unit_km.
std::vector<std::string> emit_plot_data(const std::vector<TraceReport>& reports,
                                        const std::string& path_prefix,
                                        double length_unit_km = SystemConfig{}.length_unit_km);

std::string format_summary(const ExperimentSummary& summary);

Disposition disposition_from_string(const std::string& s);

}  // namespace halotrace

#endif
