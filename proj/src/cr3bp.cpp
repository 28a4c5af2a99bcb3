#include "halotrace/cr3bp.hpp"

#include <cmath>
#include <limits>

namespace halotrace {

namespace {

struct PrimaryDistances {
    double dx1, dx2;   // x offsets from each primary
    double r1, r2;     // distances to the larger / smaller primary
};

PrimaryDistances primary_distances(const Vec3& pos, double mu) {
    PrimaryDistances d;
    d.dx1 = pos[0] + mu;
    d.dx2 = pos[0] - 1.0 + mu;
    const double yz2 = pos[1] * pos[1] + pos[2] * pos[2];
    d.r1 = std::sqrt(d.dx1 * d.dx1 + yz2);
    d.r2 = std::sqrt(d.dx2 * d.dx2 + yz2);
    if (d.r1 < kSingularityRadius || d.r2 < kSingularityRadius) {
        throw SingularityError("state within singularity guard radius of a primary");
    }
    return d;
}

// dUbar/dx restricted to the x-axis; the collinear points are its roots.
double axial_gradient(double x, double mu) {
    const double d1 = x + mu;
    const double d2 = x - 1.0 + mu;
    return x - (1.0 - mu) * d1 / std::abs(d1 * d1 * d1) - mu * d2 / std::abs(d2 * d2 * d2);
}

double axial_gradient_slope(double x, double mu) {
    const double a1 = std::abs(x + mu);
    const double a2 = std::abs(x - 1.0 + mu);
    return 1.0 + 2.0 * (1.0 - mu) / (a1 * a1 * a1) + 2.0 * mu / (a2 * a2 * a2);
}

// Newton iteration with a bisection fallback whenever an update would leave
// the bracket. The bracket endpoints must straddle a sign change.
double solve_collinear(double lo, double hi, double x0, double mu) {
    double flo = axial_gradient(lo, mu);
    double x = x0;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = axial_gradient(x, mu);
        if (std::abs(f) < 1e-14 && iter > 0) return x;
        if ((f > 0) == (flo > 0)) {
            lo = x;
            flo = f;
        } else {
            hi = x;
        }
        double step = f / axial_gradient_slope(x, mu);
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) return x;
        x = next;
    }
    if (std::abs(axial_gradient(x, mu)) > 1e-12) {
        throw ConvergenceError("collinear point iteration did not reach residual 1e-12");
    }
    return x;
}

}  // namespace

void SystemConfig::validate() const {
    if (!(mu > 0.0 && mu < 0.5)) {
        throw std::invalid_argument("SystemConfig: mu must lie in (0, 0.5), got " + std::to_string(mu));
    }
    if (!(length_unit_km > 0.0)) {
        throw std::invalid_argument("SystemConfig: length_unit_km must be positive");
    }
}

bool State6::finite() const {
    for (int i = 0; i < 6; ++i) {
        if (!std::isfinite((*this)[i])) return false;
    }
    return true;
}

double effective_potential(const Vec3& pos, double mu) {
    const auto d = primary_distances(pos, mu);
    return 0.5 * (pos[0] * pos[0] + pos[1] * pos[1]) + (1.0 - mu) / d.r1 + mu / d.r2;
}

Vec3 potential_gradient(const Vec3& pos, double mu) {
    const auto d = primary_distances(pos, mu);
    const double c1 = (1.0 - mu) / (d.r1 * d.r1 * d.r1);
    const double c2 = mu / (d.r2 * d.r2 * d.r2);
    return {pos[0] - c1 * d.dx1 - c2 * d.dx2,
            pos[1] - c1 * pos[1] - c2 * pos[1],
            -c1 * pos[2] - c2 * pos[2]};
}

State6 eom(const State6& state, double mu) {
    const Vec3 g = potential_gradient(state.position(), mu);
    State6 deriv;
    deriv.x = state.vx;
    deriv.y = state.vy;
    deriv.z = state.vz;
    deriv.vx = 2.0 * state.vy + g[0];
    deriv.vy = -2.0 * state.vx + g[1];
    deriv.vz = g[2];
    return deriv;
}

double jacobi_integral(const State6& state, double mu) {
    const double v2 = state.vx * state.vx + state.vy * state.vy + state.vz * state.vz;
    return 2.0 * effective_potential(state.position(), mu) - v2;
}

std::array<double, 9> potential_hessian(const Vec3& pos, double mu) {
    const auto d = primary_distances(pos, mu);
    const double m1 = 1.0 - mu, m2 = mu;
    const double r1_3 = d.r1 * d.r1 * d.r1, r2_3 = d.r2 * d.r2 * d.r2;
    const double r1_5 = r1_3 * d.r1 * d.r1, r2_5 = r2_3 * d.r2 * d.r2;
    const double inv3 = m1 / r1_3 + m2 / r2_3;
    const double i5 = m1 / r1_5 + m2 / r2_5;
    const double x5 = m1 * d.dx1 / r1_5 + m2 * d.dx2 / r2_5;
    const double y = pos[1], z = pos[2];

    const double uxx = 1.0 - inv3 + 3.0 * (m1 * d.dx1 * d.dx1 / r1_5 + m2 * d.dx2 * d.dx2 / r2_5);
    const double uyy = 1.0 - inv3 + 3.0 * y * y * i5;
    const double uzz = -inv3 + 3.0 * z * z * i5;
    const double uxy = 3.0 * y * x5;
    const double uxz = 3.0 * z * x5;
    const double uyz = 3.0 * y * z * i5;
    return {uxx, uxy, uxz,
            uxy, uyy, uyz,
            uxz, uyz, uzz};
}

std::array<Vec3, 5> lagrange_points(double mu) {
    if (!(mu > 0.0 && mu < 0.5)) {
        throw std::invalid_argument("lagrange_points: mu must lie in (0, 0.5)");
    }
    const double eps = 1e-9;
    const double hill = std::cbrt(mu / 3.0);

    // L1 between the primaries, L2 beyond the smaller, L3 beyond the larger.
    const double x1 = solve_collinear(-mu + eps, 1.0 - mu - eps,
                                      1.0 - mu - hill, mu);
    const double x2 = solve_collinear(1.0 - mu + eps, 2.5,
                                      1.0 - mu + hill, mu);
    const double x3 = solve_collinear(-2.5, -mu - eps,
                                      -1.0 - 5.0 / 12.0 * mu, mu);

    const double half = 0.5 - mu;
    const double root3_2 = std::sqrt(3.0) / 2.0;
    return {Vec3{x1, 0.0, 0.0}, Vec3{x2, 0.0, 0.0}, Vec3{x3, 0.0, 0.0},
            Vec3{half, root3_2, 0.0}, Vec3{half, -root3_2, 0.0}};
}

Vec3 lagrange_point(double mu, LagrangePoint which) {
    return lagrange_points(mu)[static_cast<int>(which) - 1];
}

const char* to_string(LagrangePoint p) {
    switch (p) {
        case LagrangePoint::L1: return "L1";
        case LagrangePoint::L2: return "L2";
        case LagrangePoint::L3: return "L3";
        case LagrangePoint::L4: return "L4";
        case LagrangePoint::L5: return "L5";
    }
    return "?";
}

const char* to_string(HaloFamily f) {
    return f == HaloFamily::Northern ? "northern" : "southern";
}

}  // namespace halotrace
