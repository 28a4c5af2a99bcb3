#include "halotrace/halo_factory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

namespace halotrace {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t i) {
    SplitMix64 root(seed);
    SplitMix64 sub(root.next() ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    sub.next();
    return sub;
}

State6 richardson_guess(double az_km, const LpCoefficients& coeffs) {
    return eval_lp_state(0.0, coeffs.az_nd_from_km(az_km), coeffs);
}

HaloOrbit differential_correct(const State6& guess, double mu, const CorrectorOptions& opts) {
    const double t_search_max = 4.0 * std::numbers::pi;
    State6 state = guess;
    state.y = 0.0;
    state.vx = 0.0;
    state.vz = 0.0;

    HaloOrbit orbit;
    double t_half = 0.0;
    double residual = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
        const PlaneCrossing crossing =
            find_y_plane_crossing(state, mu, 0.0, t_search_max, opts.integrator);
        t_half = crossing.t;
        const State6& sf = crossing.state;
        residual = std::max(std::abs(sf.vx), std::abs(sf.vz));
        if (residual < opts.tol) {
            orbit.initial_state = state;
            orbit.half_period = t_half;
            orbit.residual = residual;
            orbit.iterations = iter;
            if (opts.trajectory_samples > 0) {
                orbit.trajectory = integrate_sampled(state, mu, 0.0, 2.0 * t_half,
                                                     opts.trajectory_samples, opts.integrator);
            }
            return orbit;
        }
        if (iter == opts.max_iterations) break;

        const StmResult stm = integrate_with_stm(state, mu, 0.0, t_half, opts.integrator);
        const State6 f = eom(stm.state, mu);
        const auto& p = stm.stm;  // row-major: p[6r + c] = d state_r(t) / d state_c(0)
        const double vy_f = stm.state.vy;
        if (std::abs(vy_f) < 1e-12) {
            throw ConvergenceError("corrector: crossing is tangent to the plane (vy ~ 0)");
        }

        // Variations of (vx, vz) at the moving y = 0 crossing w.r.t. (x0, vy0).
        const double m11 = p[6 * 3 + 0] - f.vx / vy_f * p[6 * 1 + 0];
        const double m12 = p[6 * 3 + 4] - f.vx / vy_f * p[6 * 1 + 4];
        const double m21 = p[6 * 5 + 0] - f.vz / vy_f * p[6 * 1 + 0];
        const double m22 = p[6 * 5 + 4] - f.vz / vy_f * p[6 * 1 + 4];
        const double det = m11 * m22 - m12 * m21;
        if (det == 0.0 || !std::isfinite(det)) {
            throw ConvergenceError("corrector: singular correction matrix");
        }
        const double rx = -stm.state.vx;
        const double rz = -stm.state.vz;
        state.x += (rx * m22 - rz * m12) / det;
        state.vy += (m11 * rz - m21 * rx) / det;
    }
    throw ConvergenceError("corrector: residual " + std::to_string(residual) + " after " +
                           std::to_string(opts.max_iterations) + " iterations");
}

TruthSampleSet sample_truth_points(int n, std::uint64_t seed, double az_lo_km,
                                   double az_hi_km, const SystemConfig& config,
                                   const CorrectorOptions& opts) {
    if (n <= 0) throw std::invalid_argument("sample_truth_points: n must be positive");
    if (!(az_lo_km > 0.0 && az_lo_km < az_hi_km)) {
        throw std::invalid_argument("sample_truth_points: need 0 < az_lo_km < az_hi_km");
    }
    config.validate();
    const LpCoefficients coeffs = build_coefficients(config);

    CorrectorOptions sample_opts = opts;
    sample_opts.trajectory_samples = 0;

    TruthSampleSet set;
    set.points.reserve(n);
    set.orbits.reserve(n);

    constexpr int kMaxDraws = 64;
    for (int i = 0; i < n; ++i) {
        SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(i));
        bool done = false;
        for (int attempt = 0; attempt < kMaxDraws && !done; ++attempt) {
            const double az_km = az_lo_km + rng.uniform() * (az_hi_km - az_lo_km);
            const double u_time = rng.uniform();
            try {
                const State6 guess = richardson_guess(az_km, coeffs);
                HaloOrbit orbit = differential_correct(guess, config.mu, sample_opts);
                orbit.az_km = az_km;
                const double period = 2.0 * orbit.half_period;
                const double true_t = u_time * period;
                const State6 at_t = integrate_to(orbit.initial_state, config.mu, 0.0, true_t,
                                                 sample_opts.integrator);
                set.points.push_back({at_t.position(), true_t, az_km, i});
                set.orbits.push_back(std::move(orbit));
                done = true;
            } catch (const std::exception&) {
                ++set.corrector_resamples;
            }
        }
        if (!done) {
            throw ConvergenceError("sample_truth_points: no convergent orbit after " +
                                   std::to_string(kMaxDraws) + " draws for point " +
                                   std::to_string(i));
        }
    }
    return set;
}

void emit_orbit_catalog(const std::vector<HaloOrbit>& orbits, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_orbit_catalog: cannot open " + path);
    out << "orbit_id,az_km,x0,vy0,z0,half_period\n";
    char buf[256];
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const HaloOrbit& o = orbits[i];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, o.az_km,
                      o.initial_state.x, o.initial_state.vy, o.initial_state.z, o.half_period);
        out << buf;
    }
    if (!out.good()) throw std::runtime_error("emit_orbit_catalog: write failed for " + path);
}

}  // namespace halotrace
