// halo_factory.hpp: ground-truth halo orbits. Series initial guesses are
// driven to periodicity with a perpendicular-crossing differential corrector,
// then sampled at random times to produce benchmark truth points.

#ifndef HALOTRACE_HALO_FACTORY_HPP
#define HALOTRACE_HALO_FACTORY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "halotrace/integrate.hpp"
#include "halotrace/lp_series.hpp"

namespace halotrace {

struct CorrectorOptions {
    double tol = 1e-12;          // residual bound on |vx|, |vz| at the half-period crossing
    int max_iterations = 25;
    int trajectory_samples = 512;  // states recorded over one period; 0 skips recording
    IntegratorOptions integrator{};
};

/// A differentially corrected periodic orbit. The initial state is a
/// perpendicular plane crossing (x0, 0, z0, 0, vy0, 0) that recrosses
/// perpendicularly at half_period within the corrector tolerance.
struct HaloOrbit {
    double az_km = 0;           // amplitude label used to build the guess
    State6 initial_state{};
    double half_period = 0;
    double residual = 0;        // max(|vx|, |vz|) at the half-period crossing
    int iterations = 0;
    Trajectory trajectory{};    // one full period, uniform samples (may be empty)
};

/// One benchmark query: a position on a known orbit at a known time.
struct TruthPoint {
    Vec3 position{};
    double true_t = 0;
    double true_az_km = 0;
    int orbit_id = 0;
};

struct TruthSampleSet {
    std::vector<TruthPoint> points;
    std::vector<HaloOrbit> orbits;   // index-aligned with points, no trajectories
    int corrector_resamples = 0;     // draws discarded due to corrector failure
};

/// Series state at t = 0: the (x0, 0, z0, 0, vy0, 0) perpendicular crossing.
State6 richardson_guess(double az_km, const LpCoefficients& coeffs);

/// Fixes z0 and adjusts (x0, vy0) via the state transition matrix until the
/// half-period crossing is perpendicular. Throws ConvergenceError with the
/// final residual if max_iterations is exceeded.
HaloOrbit differential_correct(const State6& guess, double mu,
                               const CorrectorOptions& opts = {});

/// n truth points, one per random orbit with Az uniform over
/// [az_lo_km, az_hi_km] and time uniform over the orbit period.
/// Deterministic in seed; failed corrector draws are resampled and counted.
TruthSampleSet sample_truth_points(int n, std::uint64_t seed, double az_lo_km,
                                   double az_hi_km, const SystemConfig& config,
                                   const CorrectorOptions& opts = {});

/// CSV rows (orbit_id, az_km, x0, vy0, z0, half_period).
void emit_orbit_catalog(const std::vector<HaloOrbit>& orbits, const std::string& path);

/// Deterministic splittable generator (splitmix64).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform double in [0, 1).
    double uniform();
    /// Independent stream for substream index i.
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t i);

private:
    std::uint64_t state_;
};

}  // namespace halotrace

#endif
