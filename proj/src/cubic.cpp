#include "halotrace/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace halotrace {

namespace {

double eval(double a, double b, double c, double d, double x) {
    return ((a * x + b) * x + c) * x + d;
}

double eval_deriv(double a, double b, double c, double x) {
    return (3.0 * a * x + 2.0 * b) * x + c;
}

double polish(double a, double b, double c, double d, double x) {
    for (int i = 0; i < 3; ++i) {
        const double f = eval(a, b, c, d, x);
        const double df = eval_deriv(a, b, c, x);
        if (df == 0.0) break;
        const double step = f / df;
        if (!std::isfinite(step)) break;
        x -= step;
    }
    return x;
}

}  // namespace

CubicRoots solve_cubic_real(double a, double b, double c, double d) {
    CubicRoots out;
    auto push = [&out](double x) {
        for (int i = 0; i < out.count; ++i) {
            if (x == out.values[i]) return;
        }
        out.values[out.count++] = x;
    };

    const double scale = std::max({std::abs(b), std::abs(c), std::abs(d)});
    if (std::abs(a) <= 1e-9 * scale) {
        // Near-degenerate leading coefficient: the Cardano intermediates
        // cancel catastrophically, so take the quadratic roots plus the far
        // root near -b/a, each polished on the full cubic.
        if (b == 0.0) {
            if (c != 0.0) push(-d / c);  // constant-only has no roots
            std::sort(out.values.begin(), out.values.begin() + out.count);
            return out;
        }
        // Numerically stable quadratic: q = -(c + sign(c) sqrt(disc)) / 2.
        const double disc = c * c - 4.0 * b * d;
        if (disc == 0.0) {
            push(polish(a, b, c, d, -c / (2.0 * b)));
        } else if (disc > 0.0) {
            const double q = -0.5 * (c + std::copysign(std::sqrt(disc), c));
            push(polish(a, b, c, d, q / b));
            push(polish(a, b, c, d, q != 0.0 ? d / q : 0.0));
        }
        if (a != 0.0) {
            const double far = polish(a, b, c, d, -b / a);
            if (std::isfinite(far)) push(far);
        }
        std::sort(out.values.begin(), out.values.begin() + out.count);
        return out;
    }

    // Monic form x^3 + p x^2 + q x + r.
    const double p = b / a, q = c / a, r = d / a;
    const double p2 = p * p;
    const double bigq = (p2 - 3.0 * q) / 9.0;
    const double bigr = (p * (2.0 * p2 - 9.0 * q) + 27.0 * r) / 54.0;
    const double r2 = bigr * bigr;
    const double q3 = bigq * bigq * bigq;

    if (r2 < q3) {
        // Three real roots, trigonometric form.
        const double theta = std::acos(std::clamp(bigr / std::sqrt(q3), -1.0, 1.0));
        const double coef = -2.0 * std::sqrt(bigq);
        const double shift = p / 3.0;
        constexpr double tau = 2.0 * std::numbers::pi;
        push(polish(a, b, c, d, coef * std::cos(theta / 3.0) - shift));
        push(polish(a, b, c, d, coef * std::cos((theta + tau) / 3.0) - shift));
        push(polish(a, b, c, d, coef * std::cos((theta - tau) / 3.0) - shift));
    } else {
        const double u3 = -bigr - std::copysign(std::sqrt(r2 - q3), bigr);
        const double u = std::cbrt(u3);
        const double v = (u == 0.0) ? 0.0 : bigq / u;
        push(polish(a, b, c, d, u + v - p / 3.0));
        if (r2 == q3 && bigq != 0.0) {
            // Double root at the stationary point.
            push(polish(a, b, c, d, -0.5 * (u + v) - p / 3.0));
        }
    }
    std::sort(out.values.begin(), out.values.begin() + out.count);
    return out;
}

}  // namespace halotrace
