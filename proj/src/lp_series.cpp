#include "halotrace/lp_series.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace halotrace {

namespace {

bool is_collinear(LagrangePoint p) {
    return p == LagrangePoint::L1 || p == LagrangePoint::L2 || p == LagrangePoint::L3;
}

// Legendre constants c_n of the local potential expansion. Equivalent to
// gamma^(n-2)/n! times the n-th axial derivative of the gravity term at the
// libration point.
double legendre_cn(int n, double mu, double gamma, LagrangePoint point) {
    const double g = gamma;
    const double g3 = g * g * g;
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    switch (point) {
        case LagrangePoint::L1:
            return (mu + sgn * (1.0 - mu) * std::pow(g / (1.0 - g), n + 1)) / g3;
        case LagrangePoint::L2:
            return (sgn * mu + sgn * (1.0 - mu) * std::pow(g / (1.0 + g), n + 1)) / g3;
        case LagrangePoint::L3:
            return (1.0 - mu + mu * std::pow(g / (1.0 + g), n + 1)) / g3;
        default:
            throw std::invalid_argument("legendre_cn: collinear points only");
    }
}

}  // namespace

double LpCoefficients::omega(double az_nd) const {
    const double ax = ax_from_az(az_nd);
    const double nu = 1.0 + s1 * ax * ax + s2 * az_nd * az_nd;
    return lambda * nu;
}

double LpCoefficients::period(double az_nd) const {
    return 2.0 * std::numbers::pi / omega(az_nd);
}

double LpCoefficients::ax_from_az(double az_nd) const {
    const double ax2 = -(l2 * az_nd * az_nd + delta) / l1;
    if (!(ax2 >= 0.0)) {
        throw AmplitudeRangeError("no real in-plane amplitude for Az_nd = " + std::to_string(az_nd));
    }
    return std::sqrt(ax2);
}

LpCoefficients build_coefficients(const SystemConfig& config) {
    config.validate();
    if (!is_collinear(config.lagrange_point)) {
        throw std::invalid_argument("build_coefficients: halo series requires a collinear point");
    }

    LpCoefficients c;
    c.mu = config.mu;
    c.length_unit_km = config.length_unit_km;
    c.point = config.lagrange_point;
    c.delta_n = config.family == HaloFamily::Northern ? 1.0 : -1.0;

    const Vec3 lp = lagrange_point(config.mu, config.lagrange_point);
    c.x_lpoint = lp[0];
    switch (config.lagrange_point) {
        case LagrangePoint::L1: c.gamma = (1.0 - config.mu) - lp[0]; break;
        case LagrangePoint::L2: c.gamma = lp[0] - (1.0 - config.mu); break;
        default:                c.gamma = std::abs(lp[0] + config.mu); break;
    }

    c.c2 = legendre_cn(2, config.mu, c.gamma, config.lagrange_point);
    c.c3 = legendre_cn(3, config.mu, c.gamma, config.lagrange_point);
    c.c4 = legendre_cn(4, config.mu, c.gamma, config.lagrange_point);

    // In-plane frequency from lambda^4 + (c2 - 2) lambda^2 - (c2 - 1)(1 + 2 c2) = 0.
    const double c2 = c.c2, c3 = c.c3, c4 = c.c4;
    const double lam2 = 0.5 * (2.0 - c2 + std::sqrt(9.0 * c2 * c2 - 8.0 * c2));
    const double lam = std::sqrt(lam2);
    c.lambda = lam;
    const double k = 2.0 * lam / (lam2 + 1.0 - c2);
    c.k = k;
    c.delta = lam2 - c2;

    const double k2 = k * k;
    c.d1 = 3.0 * lam2 / k * (k * (6.0 * lam2 - 1.0) - 2.0 * lam);
    c.d2 = 8.0 * lam2 / k * (k * (11.0 * lam2 - 1.0) - 2.0 * lam);

    c.a21 = 3.0 * c3 * (k2 - 2.0) / (4.0 * (1.0 + 2.0 * c2));
    c.a22 = 3.0 * c3 / (4.0 * (1.0 + 2.0 * c2));
    c.a23 = -3.0 * c3 * lam / (4.0 * k * c.d1) * (3.0 * k2 * k * lam - 6.0 * k * (k - lam) + 4.0);
    c.a24 = -3.0 * c3 * lam / (4.0 * k * c.d1) * (2.0 + 3.0 * k * lam);
    c.b21 = -3.0 * c3 * lam / (2.0 * c.d1) * (3.0 * k * lam - 4.0);
    c.b22 = 3.0 * c3 * lam / c.d1;
    c.d21 = -c3 / (2.0 * lam2);

    c.a31 = -9.0 * lam / (4.0 * c.d2) * (4.0 * c3 * (k * c.a23 - c.b21) + k * c4 * (4.0 + k2)) +
            (9.0 * lam2 + 1.0 - c2) / (2.0 * c.d2) *
                (3.0 * c3 * (2.0 * c.a23 - k * c.b21) + c4 * (2.0 + 3.0 * k2));
    c.a32 = -1.0 / c.d2 *
            (9.0 * lam / 4.0 * (4.0 * c3 * (k * c.a24 - c.b22) + k * c4) +
             1.5 * (9.0 * lam2 + 1.0 - c2) * (c3 * (k * c.b22 + c.d21 - 2.0 * c.a24) - c4));
    c.b31 = 3.0 / (8.0 * c.d2) *
                (8.0 * lam * (3.0 * c3 * (k * c.b21 - 2.0 * c.a23) - c4 * (2.0 + 3.0 * k2)) +
                 (9.0 * lam2 + 1.0 + 2.0 * c2) * (4.0 * c3 * (k * c.a23 - c.b21) + k * c4 * (4.0 + k2)));
    c.b32 = 1.0 / c.d2 *
            (9.0 * lam * (c3 * (k * c.b22 + c.d21 - 2.0 * c.a24) - c4) +
             3.0 / 8.0 * (9.0 * lam2 + 1.0 + 2.0 * c2) * (4.0 * c3 * (k * c.a24 - c.b22) + k * c4));
    c.d31 = 3.0 / (64.0 * lam2) * (4.0 * c3 * c.a24 + c4);
    c.d32 = 3.0 / (64.0 * lam2) * (4.0 * c3 * (c.a23 - c.d21) + c4 * (4.0 + k2));

    const double denom = 2.0 * lam * (lam * (1.0 + k2) - 2.0 * k);
    c.s1 = (1.5 * c3 * (2.0 * c.a21 * (k2 - 2.0) - c.a23 * (k2 + 2.0) - 2.0 * k * c.b21) -
            0.375 * c4 * (3.0 * k2 * k2 - 8.0 * k2 + 8.0)) / denom;
    c.s2 = (1.5 * c3 * (2.0 * c.a22 * (k2 - 2.0) + c.a24 * (k2 + 2.0) + 2.0 * k * c.b22 + 5.0 * c.d21) +
            0.375 * c4 * (12.0 - k2)) / denom;

    c.a1 = -1.5 * c3 * (2.0 * c.a21 + c.a23 + 5.0 * c.d21) - 0.375 * c4 * (12.0 - k2);
    c.a2 = 1.5 * c3 * (c.a24 - 2.0 * c.a22) + 1.125 * c4;
    c.l1 = c.a1 + 2.0 * lam2 * c.s1;
    c.l2 = c.a2 + 2.0 * lam2 * c.s2;

    return c;
}

double amplitude_constraint(double az_nd, const LpCoefficients& coeffs) {
    return coeffs.ax_from_az(az_nd);
}

Amplitude make_amplitude(double az_km, const LpCoefficients& coeffs) {
    Amplitude a;
    a.az_km = az_km;
    a.az_nd = coeffs.az_nd_from_km(az_km);
    a.ax_nd = coeffs.ax_from_az(a.az_nd);
    return a;
}

SeriesTerms series_terms(double az_nd, const LpCoefficients& c) {
    SeriesTerms t;
    t.az = az_nd;
    t.ax = c.ax_from_az(az_nd);
    const double ax = t.ax, az = az_nd;
    const double ax2 = ax * ax, az2 = az * az;
    t.omega = c.lambda * (1.0 + c.s1 * ax2 + c.s2 * az2);

    t.x_const = c.a21 * ax2 + c.a22 * az2;
    t.x_c1 = ax;
    t.x_c2 = c.a23 * ax2 - c.a24 * az2;
    t.x_c3 = -(c.a31 * ax2 * ax - c.a32 * ax * az2);

    t.y_s1 = -c.k * ax;
    t.y_s2 = c.b21 * ax2 - c.b22 * az2;
    t.y_s3 = -(c.b31 * ax2 * ax - c.b32 * ax * az2);

    t.z_const = 3.0 * c.delta_n * c.d21 * ax * az;
    t.z_c1 = c.delta_n * az;
    t.z_c2 = -c.delta_n * c.d21 * ax * az;
    t.z_c3 = c.delta_n * (c.d32 * ax2 * az - c.d31 * az2 * az);
    return t;
}

Vec3 eval_lp(double t, double az_nd, const LpCoefficients& coeffs) {
    const SeriesTerms s = series_terms(az_nd, coeffs);
    const double th = s.omega * t;
    const double c1 = std::cos(th), c2 = std::cos(2.0 * th), c3 = std::cos(3.0 * th);
    const double s1 = std::sin(th), s2 = std::sin(2.0 * th), s3 = std::sin(3.0 * th);
    return {coeffs.x_lpoint + coeffs.gamma * (s.x_const + s.x_c1 * c1 + s.x_c2 * c2 + s.x_c3 * c3),
            coeffs.gamma * (s.y_s1 * s1 + s.y_s2 * s2 + s.y_s3 * s3),
            coeffs.gamma * (s.z_const + s.z_c1 * c1 + s.z_c2 * c2 + s.z_c3 * c3)};
}

State6 eval_lp_state(double t, double az_nd, const LpCoefficients& coeffs) {
    const SeriesTerms s = series_terms(az_nd, coeffs);
    const double th = s.omega * t;
    const double c1 = std::cos(th), c2 = std::cos(2.0 * th), c3 = std::cos(3.0 * th);
    const double s1 = std::sin(th), s2 = std::sin(2.0 * th), s3 = std::sin(3.0 * th);
    const double g = coeffs.gamma, w = s.omega;
    State6 out;
    out.x = coeffs.x_lpoint + g * (s.x_const + s.x_c1 * c1 + s.x_c2 * c2 + s.x_c3 * c3);
    out.y = g * (s.y_s1 * s1 + s.y_s2 * s2 + s.y_s3 * s3);
    out.z = g * (s.z_const + s.z_c1 * c1 + s.z_c2 * c2 + s.z_c3 * c3);
    out.vx = g * w * (-s.x_c1 * s1 - 2.0 * s.x_c2 * s2 - 3.0 * s.x_c3 * s3);
    out.vy = g * w * (s.y_s1 * c1 + 2.0 * s.y_s2 * c2 + 3.0 * s.y_s3 * c3);
    out.vz = g * w * (-s.z_c1 * s1 - 2.0 * s.z_c2 * s2 - 3.0 * s.z_c3 * s3);
    return out;
}

double lp_period(double az_nd, const LpCoefficients& coeffs) {
    return coeffs.period(az_nd);
}

std::string dump_coefficients(const LpCoefficients& c) {
    std::ostringstream os;
    os.precision(17);
    auto kv = [&os](const char* key, double v) { os << key << "=" << v << "\n"; };
    os << "point=" << to_string(c.point) << "\n";
    kv("mu", c.mu);
    kv("length_unit_km", c.length_unit_km);
    kv("gamma", c.gamma);
    kv("x_lpoint", c.x_lpoint);
    kv("delta_n", c.delta_n);
    kv("c2", c.c2);
    kv("c3", c.c3);
    kv("c4", c.c4);
    kv("lambda", c.lambda);
    kv("k", c.k);
    kv("delta", c.delta);
    kv("d1", c.d1);
    kv("d2", c.d2);
    kv("a21", c.a21);
    kv("a22", c.a22);
    kv("a23", c.a23);
    kv("a24", c.a24);
    kv("b21", c.b21);
    kv("b22", c.b22);
    kv("d21", c.d21);
    kv("a31", c.a31);
    kv("a32", c.a32);
    kv("b31", c.b31);
    kv("b32", c.b32);
    kv("d31", c.d31);
    kv("d32", c.d32);
    kv("s1", c.s1);
    kv("s2", c.s2);
    kv("a1", c.a1);
    kv("a2", c.a2);
    kv("l1", c.l1);
    kv("l2", c.l2);
    kv("x200", c.x200());
    kv("x020", c.x020());
    kv("x101", c.x101());
    kv("x202", c.x202());
    kv("x022", c.x022());
    kv("x303", c.x303());
    kv("x123", c.x123());
    kv("y101", c.y101());
    kv("y202", c.y202());
    kv("y022", c.y022());
    kv("y303", c.y303());
    kv("y123", c.y123());
    kv("z110", c.z110());
    kv("z011", c.z011());
    kv("z112", c.z112());
    kv("z213", c.z213());
    kv("z033", c.z033());
    return os.str();
}

}  // namespace halotrace
