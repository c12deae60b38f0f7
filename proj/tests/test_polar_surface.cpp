#include "hypsub/polar_surface.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypsub;
using hypsub::testing::named_seed;

namespace {

PolarSurface build(const std::string& name, int n) {
    return build_polar(named_seed(name), Grid2::box(0, 1, 0, 1, n, n), 5);
}

}  // namespace

TEST_CASE("conjugacy residual stays within 10 h^2 on every preset") {
    for (const char* name : {"intersection", "separable", "three_term", "wave"}) {
        CAPTURE(name);
        const PolarSurface P = build(name, 65);
        const double tol = 10 * P.grid.h2() * std::max(1.0, max_norm(P.g));
        CHECK(P.conjugacy_residual <= tol);
        CHECK(P.nowhere_flat);
        CHECK(P.min_independence_sv > 1e-3);
    }
}

TEST_CASE("wave seed conjugacy residual is second order") {
    const double coarse = build("wave", 33).conjugacy_residual;
    const double fine = build("wave", 65).conjugacy_residual;
    CHECK(coarse / fine >= 3.5);
}

TEST_CASE("sum-of-curves seeds have vanishing Christoffel symbols") {
    const PolarSurface P = build("intersection", 33);
    CHECK(max_abs(P.gamma_u) == 0.0);
    CHECK(max_abs(P.gamma_v) == 0.0);
    CHECK(P.conjugacy_residual < 1e-10);
}

TEST_CASE("metric and angle fields are consistent") {
    const PolarSurface P = build("separable", 33);
    for (int i = 0; i < P.grid.Nu; i += 4)
        for (int j = 0; j < P.grid.Nv; j += 4) {
            const double E = P.E(i, j), F = P.F(i, j), G = P.G(i, j);
            CHECK(P.s(i, j) == doctest::Approx(1 - F * F / (E * G)).epsilon(1e-12));
            CHECK(std::cos(P.theta(i, j)) == doctest::Approx(F / std::sqrt(E * G)).epsilon(1e-10));
            CHECK(E == doctest::Approx(P.gu.at(i, j).squaredNorm()).epsilon(1e-12));
        }
}

TEST_CASE("main symbols match their definition through metric derivatives") {
    // Lambda^u = (F/G) Gamma^u + s_u / (2 s); the curve seeds have Gamma = 0.
    const PolarSurface P = build("intersection", 33);
    double worst = 0;
    for (int i = 0; i < P.grid.Nu; ++i)
        for (int j = 0; j < P.grid.Nv; ++j) {
            worst = std::max(worst, std::abs(P.lambda_u(i, j) - P.s_u(i, j) / (2 * P.s(i, j))));
            worst = std::max(worst, std::abs(P.lambda_v(i, j) - P.s_v(i, j) / (2 * P.s(i, j))));
        }
    CHECK(worst < 1e-12);
    const ScalarField2 su = fd_derivative(P.s, Axis::u, 1, 4);
    CHECK((su.values - P.s_u.values).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("normal connection forms agree with the main symbols") {
    for (const char* name : {"intersection", "wave"}) {
        CAPTURE(name);
        const PolarSurface P = build(name, 65);
        CHECK(normal_connection_forms(P).consistency_residual < 1e-3);
    }
}

TEST_CASE("Brioschi curvature of the round sphere metric is 1") {
    const auto error = [](int n) {
        const Grid2 g = Grid2::box(-0.6, 0.6, 0, 1, n, n);
        const ScalarField2 E = sample(g, [](double, double) { return 1.0; });
        const ScalarField2 F(g);
        const ScalarField2 G = sample(g, [](double u, double) { return std::cos(u) * std::cos(u); });
        return max_abs(map1(brioschi_curvature(E, F, G), [](double k) { return k - 1; }));
    };
    CHECK(error(65) < 1e-5);
    CHECK(error(33) / error(65) > 8);
}

TEST_CASE("flat seeds are detected and optionally rejected") {
    const PolarSurface P = build("flat", 17);
    CHECK(P.flat);
    CHECK_FALSE(P.nowhere_flat);
    BuildOptions opt;
    opt.require_nowhere_flat = true;
    try {
        build_polar(named_seed("flat"), Grid2::box(0, 1, 0, 1, 17, 17), 5, opt);
        FAIL("expected flatness error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::flatness);
    }
}

TEST_CASE("a curve factor above unit modulus is a degenerate seed") {
    RotatingPlaneParams p;
    p.p = {1.2, 0.0};
    try {
        build_polar(intersection_seed(p), Grid2::box(0, 1, 0, 1, 17, 17), 5);
        FAIL("expected degenerate_seed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_seed);
    }
}

TEST_CASE("grids that are too small are rejected") {
    CHECK_THROWS_AS(build_polar(intersection_seed(), Grid2::box(0, 1, 0, 1, 3, 3), 5), Error);
}
