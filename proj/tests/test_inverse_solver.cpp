#include <cmath>
#include <numbers>

#include "doctest.h"
#include "halotrace/halo_factory.hpp"
#include "halotrace/integrate.hpp"
#include "halotrace/inverse_solver.hpp"

using namespace halotrace;

namespace {

const SystemConfig kConfig{};

const LpCoefficients& coeffs() {
    static const LpCoefficients c = build_coefficients(kConfig);
    return c;
}

bool contains_time(const std::vector<double>& ts, double t, double tol) {
    for (double v : ts) {
        if (std::abs(v - t) < tol) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("time inversion recovers generating times across the half period") {
    const LpCoefficients& c = coeffs();
    for (const double az_km : {2e4, 1e5, 3e5}) {
        const double az = c.az_nd_from_km(az_km);
        const double half = lp_period(az, c) / 2.0;
        for (int i = 1; i < 12; ++i) {
            const double t_star = half * i / 12.0;
            const double z1 = eval_lp(t_star, az, c)[2];
            const std::vector<double> ts = solve_time(z1, az, c);
            REQUIRE(!ts.empty());
            CHECK(contains_time(ts, t_star, 1e-10));
            for (double t : ts) {
                CHECK(t >= 0.0);
                CHECK(t <= half + 1e-12);
            }
        }
    }
}

TEST_CASE("extremal z maps to the start of the orbit") {
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(1e5);
    // t = 0 is the z extremum of the series over the period.
    const double z0 = eval_lp(0.0, az, c)[2];
    double zmax = -1.0;
    for (int i = 0; i < 720; ++i) {
        zmax = std::max(zmax, eval_lp(lp_period(az, c) * i / 720.0, az, c)[2]);
    }
    CHECK(z0 == doctest::Approx(zmax).epsilon(1e-12));

    const std::vector<double> ts = solve_time(z0, az, c);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0] < 1e-6);
}

TEST_CASE("unreachable z has no time solution") {
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(1e5);
    const double z_big = 2.0 * eval_lp(0.0, az, c)[2];
    CHECK(solve_time(z_big, az, c).empty());
}

TEST_CASE("x reconstruction matches the generator at the matching root") {
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(7e4);
    for (double frac : {0.1, 0.27, 0.42}) {
        const double t_star = lp_period(az, c) / 2.0 * frac;
        const Vec3 p = eval_lp(t_star, az, c);
        const std::vector<double> ts = solve_time(p[2], az, c);
        double best = 1e100;
        for (double t : ts) best = std::min(best, std::abs(p[0] - x_of(p[2], az, c, t)));
        CHECK(best < 1e-10);
    }
}

TEST_CASE("x reconstruction is even about both perpendicular crossings") {
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(9e4);
    const double half = lp_period(az, c) / 2.0;
    for (double s : {0.05, 0.3, 0.6}) {
        CHECK(x_of(0, az, c, s) == doctest::Approx(x_of(0, az, c, -s)).epsilon(1e-13));
        CHECK(x_of(0, az, c, half + s) ==
              doctest::Approx(x_of(0, az, c, half - s)).epsilon(1e-13));
    }
}

TEST_CASE("series x error against the real orbit peaks near the middle of the period") {
    // The x misfit of the series against a corrected orbit is largest in the
    // neighborhood of t ~ 1.5, the same region the time scatter avoids.
    CorrectorOptions opts;
    opts.trajectory_samples = 0;
    const HaloOrbit orbit =
        differential_correct(richardson_guess(1e5, coeffs()), kConfig.mu, opts);
    const double az = coeffs().az_nd_from_km(1e5);
    double band_mid = 0.0, band_early = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double t = 2.0 * orbit.half_period * i / 256.0;
        const State6 s = integrate_to(orbit.initial_state, kConfig.mu, 0.0, t);
        const double dx = std::abs(eval_lp(t, az, coeffs())[0] - s.x);
        if (t > 1.3 && t < 1.7) band_mid = std::max(band_mid, dx);
        if (t > 0.1 && t < 0.5) band_early = std::max(band_early, dx);
    }
    CHECK(band_mid > band_early);
}

TEST_CASE("half-period estimate agrees with the series period") {
    const LpCoefficients& c = coeffs();
    for (const double az_km : {150.0, 1e4, 1e5, 5e5, 1e6}) {
        const double az = c.az_nd_from_km(az_km);
        const double est = estimate_half_period(az, c);
        CHECK(std::abs(est - std::numbers::pi / c.omega(az)) < 1e-8);
        CHECK(std::abs(est - lp_period(az, c) / 2.0) < 1e-8);
    }
}

TEST_CASE("time adjustment mirrors by the sign of y") {
    CHECK(adjust_time(0.3, -0.01, 1.55) == 0.3);
    CHECK(adjust_time(0.3, 0.01, 1.55) == doctest::Approx(2.8));
    CHECK(adjust_time(0.7, 0.0, 1.55) == 0.7);

    // Round trip through a second-half generating time.
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(1.1e5);
    const double T = lp_period(az, c);
    const double t_star = 0.73 * T;
    const Vec3 p = eval_lp(t_star, az, c);
    CHECK(p[1] > 0.0);  // second half has positive y
    const std::vector<double> ts = solve_time(p[2], az, c);
    const double half = estimate_half_period(az, c);
    bool recovered = false;
    for (double t : ts) {
        if (std::abs(adjust_time(t, p[1], half) - t_star) < 1e-8) recovered = true;
    }
    CHECK(recovered);
}

TEST_CASE("window refinement shrinks and clips") {
    SolverSettings s;
    s.az_lo_km = 100.0;
    s.az_hi_km = 1e6;
    s.shrink_factor = 2.0;

    const AzRange r1 = refine_range(5e5, {1e5, 3e5}, s);
    CHECK(r1.hi_km - r1.lo_km == doctest::Approx(1e5));
    CHECK(0.5 * (r1.lo_km + r1.hi_km) == doctest::Approx(5e5));

    const AzRange r2 = refine_range(120.0, {100.0, 1e4}, s);
    CHECK(r2.lo_km == 100.0);  // clamped at the lower bound

    // Repeated refinement contracts around a fixed center.
    AzRange r{100.0, 1e6};
    for (int pass = 0; pass < 6; ++pass) r = refine_range(2.5e5, r, s);
    CHECK(r.hi_km - r.lo_km <= (1e6 - 100.0) / std::pow(2.0, 6) + 1e-9);
    CHECK(r.lo_km <= 2.5e5);
    CHECK(r.hi_km >= 2.5e5);
}

TEST_CASE("position error norm basics") {
    CHECK(position_error_norm({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(position_error_norm({0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0));
}

TEST_CASE("mode 1 recovers series-generated queries away from fold ambiguities") {
    // Distinct orbits share (x, z) data near t ~ 0.93 and its mirror for
    // amplitudes above ~1.2e5 km; these tuples stay clear of that band.
    const LpCoefficients& c = coeffs();
    const SolverSettings s;
    for (const double az_km : {3e4, 1.1e5, 2.6e5}) {
        const double az = c.az_nd_from_km(az_km);
        const double T = lp_period(az, c);
        for (double frac : {0.08, 0.22, 0.85, 0.95}) {
            const double t_star = frac * T;
            if (t_star > 1.3 && t_star < 1.7) continue;
            const HaloSolution sol = method1(Query{eval_lp(t_star, az, c)}, s, c);
            REQUIRE(sol.disposition == Disposition::Method1Accepted);
            CHECK(std::abs(sol.t - t_star) < 1e-6);
            CHECK(std::abs(sol.az_km - az_km) / az_km < 1e-6);
            CHECK(sol.error_norm < 1e-9);
        }
    }
}

TEST_CASE("mode 1 resolves amplitude ambiguity toward the smallest consistent orbit") {
    // A query in the fold band: a second, smaller orbit matches the same
    // (x, z) pair, and the x-only search settles on the smaller amplitude.
    const LpCoefficients& c = coeffs();
    const double az_km = 2.6e5;
    const double az = c.az_nd_from_km(az_km);
    const double t_star = 2.09;
    const Vec3 q = eval_lp(t_star, az, c);
    const HaloSolution sol = method1(Query{q}, SolverSettings{}, c);
    REQUIRE(sol.solved());
    CHECK(sol.az_km < az_km);
    // Whatever orbit was chosen, it reproduces the scanned coordinates.
    const double rec_az = c.az_nd_from_km(sol.az_km);
    CHECK(std::abs(x_of(q[2], rec_az, c, sol.t) - q[0]) < 1e-9);
    CHECK(std::abs(eval_lp(sol.t, rec_az, c)[2] - q[2]) < 1e-9);
}

TEST_CASE("mode 1 reports unsolved for unreachable queries") {
    const HaloSolution sol = method1(Query{{2.0, 0.0, 0.5}}, SolverSettings{}, coeffs());
    CHECK(sol.disposition == Disposition::Unsolved);
    CHECK(!sol.solved());
}

TEST_CASE("solution error fields are recomputable") {
    const LpCoefficients& c = coeffs();
    const double az = c.az_nd_from_km(5e4);
    const Vec3 q = eval_lp(0.4, az, c);
    const HaloSolution sol = method1(Query{q}, SolverSettings{}, c);
    REQUIRE(sol.solved());
    const Vec3 p2 = eval_lp(sol.t, c.az_nd_from_km(sol.az_km), c);
    CHECK(sol.error_norm == doctest::Approx(position_error_norm(p2, q)).epsilon(1e-12));
    const double from_components = std::sqrt(sol.per_coordinate_errors[0] * sol.per_coordinate_errors[0] +
                                             sol.per_coordinate_errors[1] * sol.per_coordinate_errors[1] +
                                             sol.per_coordinate_errors[2] * sol.per_coordinate_errors[2]);
    CHECK(sol.error_norm == doctest::Approx(from_components).epsilon(1e-12));
}

TEST_CASE("returned times respect the half-period contract") {
    const LpCoefficients& c = coeffs();
    const SolverSettings s;
    const TruthSampleSet set = sample_truth_points(24, 31, 1e4, 6e5, kConfig);
    for (const TruthPoint& tp : set.points) {
        const TraceCascade cascade = trace_cascade(Query{tp.position}, s, c);
        for (const HaloSolution* sol : {&cascade.m1, &cascade.m2, &cascade.m3}) {
            if (!sol->solved()) continue;
            const double az = c.az_nd_from_km(sol->az_km);
            const double half = estimate_half_period(az, c);
            CHECK(sol->t >= 0.0);
            CHECK(sol->t <= 2.0 * half + 1e-9);
            if (tp.position[1] <= 0.0) {
                CHECK(sol->t <= half + 1e-9);
            } else {
                CHECK(sol->t >= half - 1e-9);
            }
        }
    }
}

TEST_CASE("mode 2 keeps good answers and refines poor ones") {
    const LpCoefficients& c = coeffs();
    const SolverSettings s;
    const TruthSampleSet set = sample_truth_points(60, 12345, 1e4, 1e6, kConfig);
    int refined = 0, kept = 0;
    for (const TruthPoint& tp : set.points) {
        const TraceCascade cascade = trace_cascade(Query{tp.position}, s, c);
        if (!cascade.m1.solved()) {
            CHECK(cascade.m2.disposition == Disposition::Unsolved);
            continue;
        }
        switch (cascade.m2.disposition) {
            case Disposition::Method1Accepted:
                ++kept;
                CHECK(cascade.m2.error_norm <= s.tol_norm_trigger);
                CHECK(cascade.m2.t == cascade.m1.t);
                break;
            case Disposition::Method2Refined:
                ++refined;
                CHECK(cascade.m1.error_norm > s.tol_norm_trigger);
                CHECK(cascade.m2.error_norm <= s.tol_norm_accept);
                CHECK(cascade.m2.error_norm < cascade.m1.error_norm);  // monotone acceptance
                break;
            case Disposition::Discarded:
                CHECK(cascade.m1.error_norm > s.tol_norm_trigger);
                CHECK(!cascade.m2.solved());
                break;
            default:
                FAIL("unexpected mode-2 disposition");
        }
    }
    CHECK(kept > 0);
    CHECK(refined > 0);
}

TEST_CASE("mode 3 is a superset of mode 2 with rescues only from mode-1 failures") {
    const LpCoefficients& c = coeffs();
    const SolverSettings s;
    const TruthSampleSet set = sample_truth_points(80, 777, 1e4, 1e6, kConfig);
    std::vector<Query> queries;
    for (const TruthPoint& tp : set.points) queries.push_back(Query{tp.position});
    const std::vector<HaloSolution> m3 = method3(queries, s, c);
    REQUIRE(m3.size() == queries.size());

    int rescued = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const TraceCascade cascade = trace_cascade(queries[i], s, c);
        // superset: anything mode 2 solves, mode 3 solves identically
        if (cascade.m2.solved()) {
            REQUIRE(m3[i].solved());
            CHECK(m3[i].t == cascade.m2.t);
            CHECK(m3[i].az_km == cascade.m2.az_km);
        }
        if (m3[i].disposition == Disposition::Method2Unique) {
            ++rescued;
            CHECK(!cascade.m1.solved());
            CHECK(m3[i].error_norm <= s.tol_norm_accept);
        }
    }
    CHECK(rescued > 0);
}

TEST_CASE("mode 3 rescues land near the ends of the period") {
    const LpCoefficients& c = coeffs();
    const SolverSettings s;
    const TruthSampleSet set = sample_truth_points(250, 42, 1e4, 1e6, kConfig);
    int rescued = 0, in_bands = 0;
    for (const TruthPoint& tp : set.points) {
        const TraceCascade cascade = trace_cascade(Query{tp.position}, s, c);
        if (cascade.m3.disposition == Disposition::Method2Unique) {
            ++rescued;
            if (cascade.m3.t <= 0.5 || cascade.m3.t >= 2.5) ++in_bands;
        }
    }
    REQUIRE(rescued >= 3);
    CHECK(in_bands * 10 >= rescued * 6);  // at least 60% in the end bands
}

TEST_CASE("half-period estimation fails cleanly when no root is near pi/2") {
    LpCoefficients c = coeffs();
    c.lambda = 0.4;  // pushes the series zero far beyond the widened bracket
    c.s1 = 0.0;
    c.s2 = 0.0;
    CHECK_THROWS_AS(estimate_half_period(c.az_nd_from_km(1e5), c), ConvergenceError);
}

TEST_CASE("solvers are deterministic") {
    const LpCoefficients& c = coeffs();
    const Query q{{1.0105, -0.0012, 0.0004}};
    const HaloSolution a = method2(q, SolverSettings{}, c);
    const HaloSolution b = method2(q, SolverSettings{}, c);
    CHECK(a.disposition == b.disposition);
    CHECK(a.t == b.t);
    CHECK(a.az_km == b.az_km);
    CHECK(a.error_norm == b.error_norm);
}

TEST_CASE("km queries convert to normalized coordinates") {
    const LpCoefficients& c = coeffs();
    const Query q = query_from_km({1.5e8, -1.5e5, 7.5e4}, c);
    CHECK(q.position[0] == doctest::Approx(1.5e8 / c.length_unit_km));
    CHECK(q.position[1] == doctest::Approx(-1.5e5 / c.length_unit_km));
    CHECK(q.position[2] == doctest::Approx(7.5e4 / c.length_unit_km));
}

TEST_CASE("solver settings validation") {
    SolverSettings s;
    CHECK_NOTHROW(s.validate());
    s.az_lo_km = -1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = SolverSettings{};
    s.shrink_factor = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = SolverSettings{};
    s.tol_x = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = SolverSettings{};
    s.grid_points_per_pass = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
