// lp_series.hpp: third-order Lindstedt-Poincare (Richardson-style) closed-form
// halo approximation about a collinear libration point.
//
// The series is evaluated in the libration-point frame scaled by gamma (the
// distance from the point to the nearest primary) and converted to
// barycentric rotating-frame coordinates:
//
//   X = x_L + gamma * ( x_const + x_c1 cos O + x_c2 cos 2O + x_c3 cos 3O )
//   Y =       gamma * ( y_s1 sin O + y_s2 sin 2O + y_s3 sin 3O )
//   Z =       gamma * ( z_const + z_c1 cos O + z_c2 cos 2O + z_c3 cos 3O )
//
// with O = omega t and omega = lambda (1 + s1 Ax^2 + s2 Az^2). The phase is
// fixed so that t = 0 is a perpendicular plane crossing (y = 0, zero in-plane
// crossing velocity) at a z extremum, and y <= 0 over the first half period.
// The in-plane amplitude is locked to Az by l1 Ax^2 + l2 Az^2 + Delta = 0.

#ifndef HALOTRACE_LP_SERIES_HPP
#define HALOTRACE_LP_SERIES_HPP

#include <string>

#include "halotrace/cr3bp.hpp"

namespace halotrace {

/// Raised when an out-of-plane amplitude has no real in-plane companion.
struct AmplitudeRangeError : std::domain_error {
    using std::domain_error::domain_error;
};

/// All constants of the third-order construction for one (mu, L#, family).
/// Immutable after build_coefficients; shareable across threads.
struct LpCoefficients {
    double mu = 0;
    double length_unit_km = 0;
    LagrangePoint point = LagrangePoint::L2;

    double gamma = 0;      // |1 - ||L#|||: libration point to nearest primary
    double x_lpoint = 0;   // barycentric x of the collinear point
    double delta_n = 1.0;  // +1 Northern, -1 Southern

    // Legendre expansion constants of the local potential.
    double c2 = 0, c3 = 0, c4 = 0;

    double lambda = 0;  // linearized in-plane frequency
    double k = 0;       // first-harmonic y/x amplitude ratio
    double delta = 0;   // lambda^2 - c2

    // Second- and third-order construction constants.
    double d1 = 0, d2 = 0;
    double a21 = 0, a22 = 0, a23 = 0, a24 = 0;
    double b21 = 0, b22 = 0;
    double d21 = 0;
    double a31 = 0, a32 = 0;
    double b31 = 0, b32 = 0;
    double d31 = 0, d32 = 0;
    double s1 = 0, s2 = 0;
    double a1 = 0, a2 = 0;
    double l1 = 0, l2 = 0;

    /// Frequency including the amplitude correction, omega = lambda * nu.
    double omega(double az_nd) const;
    /// Series period 2 pi / omega.
    double period(double az_nd) const;
    /// In-plane amplitude from the constraint; throws AmplitudeRangeError.
    double ax_from_az(double az_nd) const;
    double az_nd_from_km(double az_km) const { return az_km / (gamma * length_unit_km); }
    double az_km_from_nd(double az_nd) const { return az_nd * gamma * length_unit_km; }

    // Generic triple-sum coefficient names: coefficient of Ax^i Az^j cos(kO)
    // (sin for y). See docs/series_mapping.md for the table.
    double x200() const { return a21; }
    double x020() const { return a22; }
    double x101() const { return 1.0; }
    double x202() const { return a23; }
    double x022() const { return -a24; }
    double x303() const { return -a31; }
    double x123() const { return a32; }
    double y101() const { return -k; }
    double y202() const { return b21; }
    double y022() const { return -b22; }
    double y303() const { return -b31; }
    double y123() const { return b32; }
    double z110() const { return 3.0 * delta_n * d21; }
    double z011() const { return delta_n; }
    double z112() const { return -delta_n * d21; }
    double z213() const { return delta_n * d32; }
    double z033() const { return -delta_n * d31; }
};

/// Out-of-plane amplitude in the three unit systems used around the series.
struct Amplitude {
    double az_km = 0;
    double az_nd = 0;  // az_km / (gamma * length_unit_km)
    double ax_nd = 0;  // from the amplitude constraint
};

/// Builds every constant for the configured collinear point. Throws
/// std::invalid_argument for triangular points.
LpCoefficients build_coefficients(const SystemConfig& config);

/// Amplitude constraint solved for Ax: l1 Ax^2 + l2 Az^2 + Delta = 0.
double amplitude_constraint(double az_nd, const LpCoefficients& coeffs);

Amplitude make_amplitude(double az_km, const LpCoefficients& coeffs);

/// Harmonic coefficients of the series at one amplitude.
struct SeriesTerms {
    double ax = 0, az = 0;
    double omega = 0;
    double x_const = 0, x_c1 = 0, x_c2 = 0, x_c3 = 0;
    double y_s1 = 0, y_s2 = 0, y_s3 = 0;
    double z_const = 0, z_c1 = 0, z_c2 = 0, z_c3 = 0;
};

SeriesTerms series_terms(double az_nd, const LpCoefficients& coeffs);

/// Series position at time t, barycentric rotating frame.
Vec3 eval_lp(double t, double az_nd, const LpCoefficients& coeffs);

/// Series position and velocity at time t.
State6 eval_lp_state(double t, double az_nd, const LpCoefficients& coeffs);

/// Period of the series orbit, 2 pi / omega(az).
double lp_period(double az_nd, const LpCoefficients& coeffs);

/// key=value text of every constant, for inspection and diffing.
std::string dump_coefficients(const LpCoefficients& coeffs);

}  // namespace halotrace

#endif
