#include <cmath>
#include <numbers>

#include "doctest.h"
#include "halotrace/halo_factory.hpp"
#include "halotrace/integrate.hpp"
#include "halotrace/lp_series.hpp"

using namespace halotrace;

namespace {

// One corrected Sun-Earth L2 orbit shared by the heavier cases.
const HaloOrbit& reference_orbit() {
    static const HaloOrbit orbit = [] {
        SystemConfig cfg;
        CorrectorOptions opts;
        opts.trajectory_samples = 0;
        return differential_correct(richardson_guess(1e5, build_coefficients(cfg)), cfg.mu, opts);
    }();
    return orbit;
}

}  // namespace

TEST_CASE("an equilibrium point stays put") {
    const double mu = 0.0121505856;
    const Vec3 l4 = lagrange_point(mu, LagrangePoint::L4);
    const State6 s0{l4[0], l4[1], l4[2], 0, 0, 0};
    const Trajectory traj = integrate(s0, mu, 0.0, std::numbers::pi);
    for (const State6& s : traj.states) {
        for (int i = 0; i < 6; ++i) CHECK(std::abs(s[i] - s0[i]) < 1e-10);
    }
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == std::numbers::pi);
}

TEST_CASE("jacobi integral is conserved over a halo period") {
    const double mu = SystemConfig{}.mu;
    const HaloOrbit& orbit = reference_orbit();
    const double j0 = jacobi_integral(orbit.initial_state, mu);
    const Trajectory traj =
        integrate(orbit.initial_state, mu, 0.0, 2.0 * orbit.half_period);
    double drift = 0.0;
    for (const State6& s : traj.states) {
        drift = std::max(drift, std::abs(jacobi_integral(s, mu) - j0));
    }
    CHECK(drift < 1e-10);
}

TEST_CASE("forward then backward integration closes") {
    const double mu = SystemConfig{}.mu;
    const State6 s0 = reference_orbit().initial_state;
    const State6 fwd = integrate_to(s0, mu, 0.0, 2.0);
    const State6 back = integrate_to(fwd, mu, 2.0, 0.0);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(back[i] - s0[i]) < 1e-8);
}

TEST_CASE("sampled trajectories land exactly on the uniform grid") {
    const double mu = SystemConfig{}.mu;
    const State6 s0 = reference_orbit().initial_state;
    const int n = 33;
    const Trajectory traj = integrate_sampled(s0, mu, 0.0, 1.5, n);
    REQUIRE(traj.size() == n);
    for (int k = 0; k < n; ++k) {
        CHECK(traj.times[k] == doctest::Approx(1.5 * k / (n - 1.0)).epsilon(1e-15));
    }
    const State6 mid = integrate_to(s0, mu, 0.0, traj.times[n / 2]);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(traj.states[n / 2][i] - mid[i]) < 1e-12);
    CHECK_THROWS_AS(integrate_sampled(s0, mu, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("state transition matrix matches finite differences") {
    const double mu = SystemConfig{}.mu;
    const State6 s0 = reference_orbit().initial_state;
    const double tau = 1.0;
    const StmResult r = integrate_with_stm(s0, mu, 0.0, tau);

    const State6 unperturbed = integrate_to(s0, mu, 0.0, tau);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r.state[i] - unperturbed[i]) < 1e-11);

    const double eps = 1e-7;
    for (int col = 0; col < 6; ++col) {
        State6 hi = s0, lo = s0;
        hi[col] += eps;
        lo[col] -= eps;
        const State6 fhi = integrate_to(hi, mu, 0.0, tau);
        const State6 flo = integrate_to(lo, mu, 0.0, tau);
        for (int row = 0; row < 6; ++row) {
            const double fd = (fhi[row] - flo[row]) / (2.0 * eps);
            CHECK(r.stm[6 * row + col] == doctest::Approx(fd).epsilon(2e-5));
        }
    }
}

TEST_CASE("plane crossing search finds the half-period crossing") {
    const double mu = SystemConfig{}.mu;
    const HaloOrbit& orbit = reference_orbit();
    const PlaneCrossing c =
        find_y_plane_crossing(orbit.initial_state, mu, 0.0, 4.0 * std::numbers::pi);
    CHECK(std::abs(c.t - orbit.half_period) < 1e-10);
    CHECK(std::abs(c.state.y) < 1e-13);
}

TEST_CASE("plane crossing search fails cleanly when there is no crossing") {
    const double mu = 0.01;
    const Vec3 l4 = lagrange_point(mu, LagrangePoint::L4);
    CHECK_THROWS_AS(
        find_y_plane_crossing(State6{l4[0], l4[1], l4[2], 0, 0, 0}, mu, 0.0, 2.0),
        ConvergenceError);
}
