// cubic.hpp: real roots of a real polynomial of degree <= 3.

#ifndef HALOTRACE_CUBIC_HPP
#define HALOTRACE_CUBIC_HPP

#include <array>

namespace halotrace {

struct CubicRoots {
    std::array<double, 3> values{};
    int count = 0;
};

/// Distinct real roots of a x^3 + b x^2 + c x + d = 0, ascending. Degenerate
/// leading coefficients fall through to the quadratic / linear cases; roots
/// are polished with Newton steps on the original polynomial.
CubicRoots solve_cubic_real(double a, double b, double c, double d);

}  // namespace halotrace

#endif
