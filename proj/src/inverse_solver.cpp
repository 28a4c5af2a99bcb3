#include "halotrace/inverse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "halotrace/cubic.hpp"

namespace halotrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 eval_terms(const SeriesTerms& s, const LpCoefficients& coeffs, double t) {
    const double th = s.omega * t;
    const double c1 = std::cos(th), c2 = std::cos(2.0 * th), c3 = std::cos(3.0 * th);
    const double s1 = std::sin(th), s2 = std::sin(2.0 * th), s3 = std::sin(3.0 * th);
    return {coeffs.x_lpoint + coeffs.gamma * (s.x_const + s.x_c1 * c1 + s.x_c2 * c2 + s.x_c3 * c3),
            coeffs.gamma * (s.y_s1 * s1 + s.y_s2 * s2 + s.y_s3 * s3),
            coeffs.gamma * (s.z_const + s.z_c1 * c1 + s.z_c2 * c2 + s.z_c3 * c3)};
}

double series_y(const SeriesTerms& s, double gamma, double t) {
    const double th = s.omega * t;
    return gamma * (s.y_s1 * std::sin(th) + s.y_s2 * std::sin(2.0 * th) +
                    s.y_s3 * std::sin(3.0 * th));
}

// Candidate cos(omega t) values solving the z equation at fixed Az.
CubicRoots solve_time_cos(double z1, const SeriesTerms& s, const LpCoefficients& coeffs) {
    // z1/gamma = z_const + z_c1 c + z_c2 (2c^2 - 1) + z_c3 (4c^3 - 3c)
    const double a = 4.0 * s.z_c3;
    const double b = 2.0 * s.z_c2;
    const double c = s.z_c1 - 3.0 * s.z_c3;
    const double d = s.z_const - s.z_c2 - z1 / coeffs.gamma;
    CubicRoots roots = solve_cubic_real(a, b, c, d);
    CubicRoots kept;
    for (int i = 0; i < roots.count; ++i) {
        const double v = roots.values[i];
        if (std::abs(v) <= 1.0 + 1e-9) {
            kept.values[kept.count++] = std::clamp(v, -1.0, 1.0);
        }
    }
    return kept;
}

struct GridBest {
    double az_km = 0;
    double metric = kInf;
    double t = 0;        // candidate time backing the metric
    bool valid = false;
};

// Golden-section descent of the objective inside [lo, hi]; returns the
// refined minimizer. Unreachable amplitudes count as +inf.
template <class Objective>
void polish_minimum(double lo, double hi, Objective&& objective, GridBest& best) {
    constexpr double kGolden = 0.61803398874989485;
    double a = lo, b = hi;
    while ((b - a) > 1e-10 * std::max(1.0, std::abs(b))) {
        const double m1 = b - kGolden * (b - a);
        const double m2 = a + kGolden * (b - a);
        double f1 = kInf, f2 = kInf, t1 = 0, t2 = 0;
        objective(m1, f1, t1);
        objective(m2, f2, t2);
        if (f1 < best.metric) best = {m1, f1, t1, true};
        if (f2 < best.metric) best = {m2, f2, t2, true};
        if (f1 < f2) b = m2; else a = m1;
    }
}

// Successive-refinement scan of [az_lo, az_hi]. Each pass samples the range,
// polishes every sampled local minimum to convergence, and keeps the best
// (az, metric) seen so far; acceptance against tol happens at pass end and
// the next pass shrinks the window around the running best.
//
// The objective regularly has several exact zeros in Az (distinct orbits can
// agree on the scanned data); zeros beyond the first lie toward the large
// amplitudes where the series leaves its convergence domain, so ties below
// tol resolve to the smallest amplitude.
template <class Objective>
GridBest grid_search(const SolverSettings& settings, double tol, Objective&& objective) {
    AzRange range{settings.az_lo_km, settings.az_hi_km};
    GridBest best;
    const int n = settings.grid_points_per_pass;
    std::vector<double> az(n), metric(n), t_cand(n);
    for (int pass = 0; pass < settings.max_passes; ++pass) {
        const double spacing = (range.hi_km - range.lo_km) / (n - 1);
        for (int i = 0; i < n; ++i) {
            az[i] = range.lo_km + spacing * static_cast<double>(i);
            metric[i] = kInf;
            t_cand[i] = 0;
            objective(az[i], metric[i], t_cand[i]);
            if (metric[i] < best.metric) {
                best = {az[i], metric[i], t_cand[i], true};
            }
        }
        // Polish every discrete local minimum (endpoints included), keeping
        // the lowest-amplitude one that clears the tolerance.
        GridBest accepted;
        for (int i = 0; i < n; ++i) {
            if (metric[i] == kInf) continue;
            const double left = i > 0 ? metric[i - 1] : kInf;
            const double right = i + 1 < n ? metric[i + 1] : kInf;
            if (metric[i] <= left && metric[i] <= right) {
                GridBest local;
                local = {az[i], metric[i], t_cand[i], true};
                polish_minimum(std::max(az[i] - spacing, settings.az_lo_km),
                               std::min(az[i] + spacing, settings.az_hi_km), objective, local);
                if (local.metric < best.metric) best = local;
                if (local.metric <= tol && !accepted.valid) accepted = local;
            }
        }
        if (accepted.valid) return accepted;
        if (best.valid && best.metric <= tol) return best;
        if (!best.valid) return best;  // nothing reachable anywhere in the range
        range = refine_range(best.az_km, range, settings);
    }
    best.valid = best.metric <= tol;
    return best;
}

HaloSolution make_solution(Disposition disp, double t, double az_km, const Vec3& reconstructed,
                           const Vec3& query) {
    HaloSolution sol;
    sol.disposition = disp;
    sol.t = t;
    sol.az_km = az_km;
    sol.per_coordinate_errors = {reconstructed[0] - query[0], reconstructed[1] - query[1],
                                 reconstructed[2] - query[2]};
    sol.error_norm = position_error_norm(reconstructed, query);
    return sol;
}

// Norm-objective search shared by mode 2 refinement and mode 3 rescue.
HaloSolution norm_search(const Query& query, const SolverSettings& settings,
                         const LpCoefficients& coeffs, Disposition accepted_disposition) {
    const double y1 = query.position[1], z1 = query.position[2];
    const GridBest best =
        grid_search(settings, settings.tol_norm_accept,
                    [&](double az_km, double& metric, double& t_cand) {
                        const double az_nd = coeffs.az_nd_from_km(az_km);
                        SeriesTerms s;
                        double half = 0;
                        try {
                            s = series_terms(az_nd, coeffs);
                            half = estimate_half_period(az_nd, coeffs,
                                                        settings.halfperiod_bracket_width);
                        } catch (const AmplitudeRangeError&) {
                            return false;
                        } catch (const ConvergenceError&) {
                            return false;
                        }
                        const CubicRoots roots = solve_time_cos(z1, s, coeffs);
                        if (roots.count == 0) return false;
                        metric = kInf;
                        for (int i = 0; i < roots.count; ++i) {
                            const double t = std::acos(roots.values[i]) / s.omega;
                            const double t_adj = adjust_time(t, y1, half);
                            const Vec3 p2 = eval_terms(s, coeffs, t_adj);
                            const double err = position_error_norm(p2, query.position);
                            if (err < metric) {
                                metric = err;
                                t_cand = t_adj;
                            }
                        }
                        return true;
                    });
    if (!best.valid) {
        HaloSolution sol;
        sol.disposition = Disposition::Unsolved;
        return sol;
    }
    const double az_nd = coeffs.az_nd_from_km(best.az_km);
    const Vec3 p2 = eval_lp(best.t, az_nd, coeffs);
    return make_solution(accepted_disposition, best.t, best.az_km, p2, query.position);
}

}  // namespace

void SolverSettings::validate() const {
    if (!(az_lo_km > 0.0 && az_lo_km < az_hi_km)) {
        throw std::invalid_argument("SolverSettings: need 0 < az_lo_km < az_hi_km");
    }
    if (grid_points_per_pass < 2 || max_passes < 1) {
        throw std::invalid_argument("SolverSettings: need >= 2 grid points and >= 1 pass");
    }
    if (!(shrink_factor > 1.0)) {
        throw std::invalid_argument("SolverSettings: shrink_factor must exceed 1");
    }
    if (!(tol_x > 0.0 && tol_norm_trigger > 0.0 && tol_norm_accept > 0.0)) {
        throw std::invalid_argument("SolverSettings: tolerances must be positive");
    }
    if (!(halfperiod_bracket_width > 0.0)) {
        throw std::invalid_argument("SolverSettings: halfperiod_bracket_width must be positive");
    }
}

Query query_from_km(const Vec3& position_km, const LpCoefficients& coeffs) {
    return {{position_km[0] / coeffs.length_unit_km, position_km[1] / coeffs.length_unit_km,
             position_km[2] / coeffs.length_unit_km}};
}

std::vector<double> solve_time(double z1, double az_nd, const LpCoefficients& coeffs) {
    const SeriesTerms s = series_terms(az_nd, coeffs);
    const CubicRoots roots = solve_time_cos(z1, s, coeffs);
    std::vector<double> times;
    times.reserve(roots.count);
    for (int i = 0; i < roots.count; ++i) {
        times.push_back(std::acos(roots.values[i]) / s.omega);
    }
    std::sort(times.begin(), times.end());
    return times;
}

double x_of(double z1, double az_nd, const LpCoefficients& coeffs, double t_choice) {
    (void)z1;  // t_choice already encodes the z constraint
    const SeriesTerms s = series_terms(az_nd, coeffs);
    const double th = s.omega * t_choice;
    return coeffs.x_lpoint +
           coeffs.gamma * (s.x_const + s.x_c1 * std::cos(th) + s.x_c2 * std::cos(2.0 * th) +
                           s.x_c3 * std::cos(3.0 * th));
}

double estimate_half_period(double az_nd, const LpCoefficients& coeffs, double bracket_width) {
    const SeriesTerms s = series_terms(az_nd, coeffs);
    constexpr double pi_half = std::numbers::pi / 2.0;
    constexpr int kScan = 64;

    for (int round = 0; round < 2; ++round) {
        const double w = bracket_width * (round == 0 ? 1.0 : 2.0);
        const double lo = std::max(pi_half - w, 1e-6);
        const double hi = pi_half + w;
        double best = kInf;
        double prev_t = lo;
        double prev_y = series_y(s, coeffs.gamma, lo);
        for (int i = 1; i <= kScan; ++i) {
            const double t = lo + (hi - lo) * static_cast<double>(i) / kScan;
            const double y = series_y(s, coeffs.gamma, t);
            if (prev_y == 0.0) {
                if (std::abs(prev_t - pi_half) < std::abs(best - pi_half)) best = prev_t;
            } else if ((prev_y < 0.0) != (y < 0.0)) {
                double a = prev_t, b = t, fa = prev_y;
                while (b - a > 1e-10) {
                    const double m = 0.5 * (a + b);
                    const double fm = series_y(s, coeffs.gamma, m);
                    if (fm == 0.0) { a = b = m; break; }
                    if ((fa < 0.0) == (fm < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                const double root = 0.5 * (a + b);
                if (std::abs(root - pi_half) < std::abs(best - pi_half)) best = root;
            }
            prev_t = t;
            prev_y = y;
        }
        if (best != kInf) return best;
    }
    throw ConvergenceError("estimate_half_period: no y = 0 root near pi/2");
}

double adjust_time(double t, double y1, double half_period) {
    return y1 <= 0.0 ? t : 2.0 * half_period - t;
}

AzRange refine_range(double best_az_km, const AzRange& current, const SolverSettings& settings) {
    const double width = (current.hi_km - current.lo_km) / settings.shrink_factor;
    return {std::max(best_az_km - 0.5 * width, settings.az_lo_km),
            std::min(best_az_km + 0.5 * width, settings.az_hi_km)};
}

double position_error_norm(const Vec3& p1, const Vec3& p2) {
    const double dx = p1[0] - p2[0], dy = p1[1] - p2[1], dz = p1[2] - p2[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

HaloSolution method1(const Query& query, const SolverSettings& settings,
                     const LpCoefficients& coeffs) {
    settings.validate();
    const double x1 = query.position[0], y1 = query.position[1], z1 = query.position[2];

    const GridBest best =
        grid_search(settings, settings.tol_x, [&](double az_km, double& metric, double& t_cand) {
            const double az_nd = coeffs.az_nd_from_km(az_km);
            SeriesTerms s;
            try {
                s = series_terms(az_nd, coeffs);
            } catch (const AmplitudeRangeError&) {
                return false;
            }
            const CubicRoots roots = solve_time_cos(z1, s, coeffs);
            if (roots.count == 0) return false;
            metric = kInf;
            for (int i = 0; i < roots.count; ++i) {
                const double c1 = roots.values[i];
                const double c2 = 2.0 * c1 * c1 - 1.0;
                const double c3 = (4.0 * c1 * c1 - 3.0) * c1;
                const double g = coeffs.x_lpoint +
                                 coeffs.gamma * (s.x_const + s.x_c1 * c1 + s.x_c2 * c2 + s.x_c3 * c3);
                const double err = std::abs(x1 - g);
                if (err < metric) {
                    metric = err;
                    t_cand = std::acos(c1) / s.omega;
                }
            }
            return true;
        });

    if (!best.valid) {
        HaloSolution sol;
        sol.disposition = Disposition::Unsolved;
        return sol;
    }

    const double az_nd = coeffs.az_nd_from_km(best.az_km);
    const double half = estimate_half_period(az_nd, coeffs, settings.halfperiod_bracket_width);
    const double t_adj = adjust_time(best.t, y1, half);
    const Vec3 p2 = eval_lp(t_adj, az_nd, coeffs);
    return make_solution(Disposition::Method1Accepted, t_adj, best.az_km, p2, query.position);
}

TraceCascade trace_cascade(const Query& query, const SolverSettings& settings,
                           const LpCoefficients& coeffs) {
    settings.validate();
    TraceCascade out;
    out.m1 = method1(query, settings, coeffs);

    if (!out.m1.solved()) {
        out.m2.disposition = Disposition::Unsolved;
        // Mode 3 rescues mode-1 failures with the norm objective.
        out.m3 = norm_search(query, settings, coeffs, Disposition::Method2Unique);
        if (!out.m3.solved()) out.m3.disposition = Disposition::Unsolved;
        return out;
    }

    if (out.m1.error_norm <= settings.tol_norm_trigger) {
        out.m2 = out.m1;
    } else {
        out.m2 = norm_search(query, settings, coeffs, Disposition::Method2Refined);
        if (!out.m2.solved()) {
            out.m2 = HaloSolution{};
            out.m2.disposition = Disposition::Discarded;
        }
    }
    out.m3 = out.m2;
    return out;
}

HaloSolution method2(const Query& query, const SolverSettings& settings,
                     const LpCoefficients& coeffs) {
    return trace_cascade(query, settings, coeffs).m2;
}

std::vector<HaloSolution> method3(std::span<const Query> queries, const SolverSettings& settings,
                                  const LpCoefficients& coeffs) {
    std::vector<HaloSolution> out;
    out.reserve(queries.size());
    for (const Query& q : queries) {
        out.push_back(trace_cascade(q, settings, coeffs).m3);
    }
    return out;
}

const char* to_string(Disposition d) {
    switch (d) {
        case Disposition::Method1Accepted: return "method1_accepted";
        case Disposition::Method2Refined: return "method2_refined";
        case Disposition::Method2Unique: return "method2_unique";
        case Disposition::Discarded: return "discarded";
        case Disposition::Unsolved: return "unsolved";
    }
    return "?";
}

}  // namespace halotrace
