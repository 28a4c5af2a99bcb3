// cr3bp.hpp: rotating-frame dynamics of the circular restricted three-body
// problem in normalized units (primary separation = 1, angular rate = 1,
// barycenter at the origin, larger primary at (-mu, 0, 0)).

#ifndef HALOTRACE_CR3BP_HPP
#define HALOTRACE_CR3BP_HPP

#include <array>
#include <stdexcept>
#include <string>

namespace halotrace {

using Vec3 = std::array<double, 3>;

enum class LagrangePoint { L1 = 1, L2 = 2, L3 = 3, L4 = 4, L5 = 5 };
enum class HaloFamily { Northern, Southern };

/// Raised when a state falls inside the guard radius of a primary.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative scheme fails to meet its residual target.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimum allowed distance to either primary before erroring out.
inline constexpr double kSingularityRadius = 1e-12;

/// System selection: mass ratio, libration point, unit scale and halo family.
struct SystemConfig {
    double mu = 3.00348e-6;                 // Sun-Earth
    LagrangePoint lagrange_point = LagrangePoint::L2;
    double length_unit_km = 1.495978707e8;  // km per normalized distance unit
    HaloFamily family = HaloFamily::Northern;

    /// Throws std::invalid_argument unless 0 < mu < 0.5 and length_unit_km > 0.
    void validate() const;
};

/// Position + velocity in the rotating normalized frame.
struct State6 {
    double x = 0, y = 0, z = 0;
    double vx = 0, vy = 0, vz = 0;

    Vec3 position() const { return {x, y, z}; }
    Vec3 velocity() const { return {vx, vy, vz}; }
    bool finite() const;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }
};

/// Effective potential Ubar = (x^2 + y^2)/2 + (1-mu)/r1 + mu/r2.
double effective_potential(const Vec3& pos, double mu);

/// Analytic gradient of the effective potential.
Vec3 potential_gradient(const Vec3& pos, double mu);

/// Time derivative of a state: xddot - 2 ydot = dUbar/dx,
/// yddot + 2 xdot = dUbar/dy, zddot = dUbar/dz.
State6 eom(const State6& state, double mu);

/// 2 Ubar - v^2; conserved along trajectories.
double jacobi_integral(const State6& state, double mu);

/// Row-major 3x3 Hessian of the effective potential.
std::array<double, 9> potential_hessian(const Vec3& pos, double mu);

/// All five equilibrium points, indexed L1..L5. Collinear points are found by
/// Newton's method on dUbar/dx inside an analytic bracket (bisection
/// fallback); triangular points are the exact analytic locations.
std::array<Vec3, 5> lagrange_points(double mu);

/// Convenience accessor for a single point.
Vec3 lagrange_point(double mu, LagrangePoint which);

const char* to_string(LagrangePoint p);
const char* to_string(HaloFamily f);

}  // namespace halotrace

#endif
