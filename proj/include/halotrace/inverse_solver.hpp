// inverse_solver.hpp: maps a rotating-frame position (x1, y1, z1) to the halo
// orbit it lies on, recovering (t, Az) from partially inverted third-order
// series expressions.
//
// The z series is a cubic in cos(omega t), so candidate times follow in
// closed form from z1 and Az; the x series evaluated at those times gives
// x = g(z1, Az). Three search modes use these pieces:
//   1  scan/refine Az minimizing |x1 - g(z1, Az)|, accept at tol_x
//   2  run mode 1, re-evaluate its answer through the full series, and rerun
//      the scan on the position error norm when it exceeds the trigger
//   3  run mode 2, then rescue mode-1 failures with the norm scan

#ifndef HALOTRACE_INVERSE_SOLVER_HPP
#define HALOTRACE_INVERSE_SOLVER_HPP

#include <span>
#include <vector>

#include "halotrace/lp_series.hpp"

namespace halotrace {

/// Position to trace, normalized barycentric rotating frame.
struct Query {
    Vec3 position{};
};

/// Converts a barycentric position given in km.
Query query_from_km(const Vec3& position_km, const LpCoefficients& coeffs);

enum class Disposition {
    Method1Accepted,  // x-residual search met tol_x (and any norm recheck)
    Method2Refined,   // norm search replaced a poor method-1 answer
    Method2Unique,    // norm search rescued a method-1 failure (method 3)
    Discarded,        // method-1 answer rejected and norm search failed
    Unsolved,         // no acceptable Az found
};

struct HaloSolution {
    Disposition disposition = Disposition::Unsolved;
    double t = 0;                     // time along the series orbit, [0, T]
    double az_km = 0;
    double error_norm = 0;            // |eval_lp(t, az) - query|
    Vec3 per_coordinate_errors{};     // reconstructed - query

    bool solved() const {
        return disposition == Disposition::Method1Accepted ||
               disposition == Disposition::Method2Refined ||
               disposition == Disposition::Method2Unique;
    }
};

struct SolverSettings {
    double az_lo_km = 100.0;
    double az_hi_km = 1.0e6;
    int grid_points_per_pass = 512;
    double shrink_factor = 10.0;
    int max_passes = 8;
    double tol_x = 1e-7;             // accept |x1 - g| at or below this
    double tol_norm_trigger = 1e-3;  // rerun with the norm objective above this
    double tol_norm_accept = 1e-4;   // accept a norm-search answer at or below this
    double halfperiod_bracket_width = 0.8;

    void validate() const;
};

struct AzRange {
    double lo_km = 0;
    double hi_km = 0;
};

/// Candidate times t in [0, T/2] with z(t, Az) = z1: substitutes
/// c = cos(omega t), reduces the 2O/3O harmonics to a cubic in c, keeps real
/// roots with |c| <= 1. Empty result means z1 is unreachable at this Az.
std::vector<double> solve_time(double z1, double az_nd, const LpCoefficients& coeffs);

/// x series evaluated at a candidate time (barycentric).
double x_of(double z1, double az_nd, const LpCoefficients& coeffs, double t_choice);

/// Root of the series y(t) = 0 nearest pi/2, bracketed and bisected to 1e-10.
/// Widens the bracket once before giving up.
double estimate_half_period(double az_nd, const LpCoefficients& coeffs,
                            double bracket_width = 0.8);

/// Mirrors a first-half time into the second half when y1 says so:
/// y1 <= 0 keeps t, y1 > 0 maps it to 2 * half_period - t.
double adjust_time(double t, double y1, double half_period);

/// Shrinks the scan window around the best Az so far, clipped to the
/// configured amplitude bounds.
AzRange refine_range(double best_az_km, const AzRange& current, const SolverSettings& settings);

double position_error_norm(const Vec3& p1, const Vec3& p2);

HaloSolution method1(const Query& query, const SolverSettings& settings,
                     const LpCoefficients& coeffs);
HaloSolution method2(const Query& query, const SolverSettings& settings,
                     const LpCoefficients& coeffs);
std::vector<HaloSolution> method3(std::span<const Query> queries, const SolverSettings& settings,
                                  const LpCoefficients& coeffs);

/// Per-query outcome of all three modes from one pass of the machinery
/// (mode 2 embeds mode 1; mode 3 only adds work for mode-1 failures).
struct TraceCascade {
    HaloSolution m1;
    HaloSolution m2;
    HaloSolution m3;
};

TraceCascade trace_cascade(const Query& query, const SolverSettings& settings,
                           const LpCoefficients& coeffs);

const char* to_string(Disposition d);

}  // namespace halotrace

#endif
