#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "halotrace/cubic.hpp"

using namespace halotrace;

namespace {

double eval(double a, double b, double c, double d, double x) {
    return ((a * x + b) * x + c) * x + d;
}

}  // namespace

TEST_CASE("three distinct known roots") {
    const CubicRoots r = solve_cubic_real(1, -6, 11, -6);  // (x-1)(x-2)(x-3)
    REQUIRE(r.count == 3);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.values[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.values[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("single real root with a complex pair") {
    const CubicRoots r = solve_cubic_real(1, 0, 1, 1);  // x^3 + x + 1
    REQUIRE(r.count == 1);
    CHECK(std::abs(eval(1, 0, 1, 1, r.values[0])) < 1e-13);
    CHECK(r.values[0] < 0.0);
}

TEST_CASE("degenerate leading coefficients fall back to lower degrees") {
    const CubicRoots quad = solve_cubic_real(0, 2, 0, -8);  // 2x^2 - 8
    REQUIRE(quad.count == 2);
    CHECK(quad.values[0] == doctest::Approx(-2.0));
    CHECK(quad.values[1] == doctest::Approx(2.0));

    const CubicRoots lin = solve_cubic_real(0, 0, 4, -2);
    REQUIRE(lin.count == 1);
    CHECK(lin.values[0] == doctest::Approx(0.5));

    const CubicRoots none = solve_cubic_real(0, 1, 0, 1);  // x^2 + 1
    CHECK(none.count == 0);

    CHECK(solve_cubic_real(0, 0, 0, 3).count == 0);
}

TEST_CASE("double root at the stationary point") {
    const CubicRoots r = solve_cubic_real(1, 0, -3, 2);  // (x-1)^2 (x+2)
    REQUIRE(r.count >= 2);
    CHECK(std::abs(r.values[0] + 2.0) < 1e-9);
    bool has_one = false;
    for (int i = 0; i < r.count; ++i) {
        if (std::abs(r.values[i] - 1.0) < 1e-7) has_one = true;
    }
    CHECK(has_one);
}

TEST_CASE("random synthesized roots are recovered") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        double r1 = u(rng), r2 = u(rng), r3 = u(rng);
        // keep roots separated so the expected count is unambiguous
        if (std::abs(r1 - r2) < 0.05 || std::abs(r1 - r3) < 0.05 || std::abs(r2 - r3) < 0.05) {
            continue;
        }
        const double a = 1.0;
        const double b = -(r1 + r2 + r3);
        const double c = r1 * r2 + r1 * r3 + r2 * r3;
        const double d = -r1 * r2 * r3;
        const CubicRoots out = solve_cubic_real(a, b, c, d);
        REQUIRE(out.count == 3);
        double expect[3] = {r1, r2, r3};
        std::sort(expect, expect + 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(out.values[i] == doctest::Approx(expect[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("synthesized complex pairs leave exactly one real root") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double r = u(rng);
        const double p = u(rng);
        const double q = p * p / 4.0 + 0.1 + std::abs(u(rng));  // forces p^2 < 4q
        // (x - r)(x^2 + p x + q)
        const CubicRoots out = solve_cubic_real(1.0, p - r, q - r * p, -r * q);
        REQUIRE(out.count == 1);
        CHECK(out.values[0] == doctest::Approx(r).epsilon(1e-9));
    }
}

TEST_CASE("tiny leading coefficients stay stable") {
    // 1e-14 x^3 + x^2 - 1: two roots near +-1 plus one huge root.
    const CubicRoots r = solve_cubic_real(1e-14, 1, 0, -1);
    bool near_pos = false, near_neg = false;
    for (int i = 0; i < r.count; ++i) {
        if (std::abs(r.values[i] - 1.0) < 1e-6) near_pos = true;
        if (std::abs(r.values[i] + 1.0) < 1e-6) near_neg = true;
    }
    CHECK(near_pos);
    CHECK(near_neg);
}
