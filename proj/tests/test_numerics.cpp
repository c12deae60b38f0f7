#include "hypsub/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hypsub;

namespace {

Grid2 unit(int n) { return Grid2::box(0, 1, 0, 1, n, n); }

double fd_error(int n, int accuracy) {
    const Grid2 g = unit(n);
    const ScalarField2 f = sample(g, [](double u, double v) { return std::sin(3 * u) * std::cos(2 * v); });
    const ScalarField2 d = fd_derivative(f, Axis::u, 1, accuracy);
    const ScalarField2 exact = sample(g, [](double u, double v) { return 3 * std::cos(3 * u) * std::cos(2 * v); });
    return (d.values - exact.values).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("fd_derivative is exact on low-degree polynomials") {
    const Grid2 g = Grid2::box(-1, 2, 0, 1, 9, 7);
    const ScalarField2 q = sample(g, [](double u, double v) { return 1 + 2 * u - u * u + 3 * u * v + v * v; });
    CHECK(max_abs(map2(fd_derivative(q, Axis::u, 1), sample(g, [](double u, double v) { return 2 - 2 * u + 3 * v; }),
                       std::minus<>())) < 1e-12);
    CHECK(max_abs(map1(fd_derivative(q, Axis::v, 2), [](double x) { return x - 2; })) < 1e-10);
    CHECK(max_abs(map1(fd_mixed(q), [](double x) { return x - 3; })) < 1e-10);

    const ScalarField2 quartic = sample(g, [](double u, double) { return std::pow(u, 4) - u * u * u; });
    const ScalarField2 d4 = fd_derivative(quartic, Axis::u, 1, 4);
    CHECK(max_abs(map2(d4, sample(g, [](double u, double) { return 4 * u * u * u - 3 * u * u; }), std::minus<>())) <
          1e-10);
}

TEST_CASE("fd_derivative converges at its nominal order") {
    const double r2 = fd_error(33, 2) / fd_error(65, 2);
    const double r4 = fd_error(33, 4) / fd_error(65, 4);
    CHECK(r2 > 3.5);
    CHECK(r4 > 12.0);
}

TEST_CASE("fd_derivative rejects short axes and bad orders") {
    const ScalarField2 f(Grid2::box(0, 1, 0, 1, 4, 8));
    CHECK_THROWS_AS(fd_derivative(f, Axis::u, 1), Error);
    CHECK_THROWS_AS(fd_derivative(f, Axis::v, 3), Error);
}

TEST_CASE("goursat_march reproduces h = e^{a v} sin u + v^2 for constant Gu = a") {
    const double a = 0.7;
    const auto exact = [a](double u, double v) { return std::exp(a * v) * std::sin(u) + v * v; };
    const auto error = [&](int n) {
        const Grid2 g = unit(n);
        const ScalarField2 gu = sample(g, [a](double, double) { return a; });
        const ScalarField2 gv(g);
        Eigen::VectorXd bu(g.Nu), bv(g.Nv);
        for (int i = 0; i < g.Nu; ++i) bu(i) = exact(g.u(i), g.v0);
        for (int j = 0; j < g.Nv; ++j) bv(j) = exact(g.u0, g.v(j));
        const ScalarField2 h = goursat_march(gu, gv, bu, bv);
        return (h.values - sample(g, exact).values).cwiseAbs().maxCoeff();
    };
    const double e1 = error(33), e2 = error(65);
    CHECK(e2 < 1e-4);
    CHECK(e1 / e2 > 3.5);
}

TEST_CASE("goursat_march flags disagreeing corner traces") {
    const Grid2 g = unit(9);
    Eigen::VectorXd bu = Eigen::VectorXd::Zero(9), bv = Eigen::VectorXd::Zero(9);
    bv(0) = 1.0;
    try {
        goursat_march(ScalarField2(g), ScalarField2(g), bu, bv);
        FAIL("expected inconsistent_boundary");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::inconsistent_boundary);
    }
}

TEST_CASE("extrapolated march beats the plain march") {
    const auto gu = [](double u, double v) { return 0.3 * std::sin(u + v); };
    const auto gv = [](double u, double v) { return 0.2 * std::cos(u - v); };
    const Grid2 g = unit(17);
    const TraceFn traces = [](const Grid2& gr) {
        Eigen::MatrixXd bu(gr.Nu, 1), bv(gr.Nv, 1);
        for (int i = 0; i < gr.Nu; ++i) bu(i, 0) = std::sin(gr.u(i));
        for (int j = 0; j < gr.Nv; ++j) bv(j, 0) = gr.v(j) * gr.v(j);
        return std::pair{bu, bv};
    };
    // Reference: extrapolated march on a much finer grid, sampled back.
    const Grid2 fine = g.refined(8);
    const VecField ref = goursat_march_extrapolated(gu, gv, fine, traces);
    const VecField ext = goursat_march_extrapolated(gu, gv, g, traces);
    const auto [bu, bv] = traces(g);
    const VecField plain = goursat_march(sample(g, gu), sample(g, gv), bu, bv);
    double e_ext = 0, e_plain = 0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double r = ref.comp[0](8 * i, 8 * j);
            e_ext = std::max(e_ext, std::abs(ext.comp[0](i, j) - r));
            e_plain = std::max(e_plain, std::abs(plain.comp[0](i, j) - r));
        }
    CHECK(e_ext < e_plain / 10);
}

TEST_CASE("numerical_rank, gram_schmidt and orthogonal_complement") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd A(7, 3), B(3, 9);
    for (int i = 0; i < A.size(); ++i) A.data()[i] = n01(rng);
    for (int i = 0; i < B.size(); ++i) B.data()[i] = n01(rng);
    const Eigen::MatrixXd M = A * B;
    CHECK(numerical_rank(M) == 3);

    const Eigen::MatrixXd Q = gram_schmidt(M);
    CHECK(Q.cols() == 3);
    CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);

    const Eigen::MatrixXd C = orthogonal_complement(A);
    CHECK(C.cols() == 4);
    CHECK((C.transpose() * A).norm() < 1e-12);
    CHECK(numerical_rank(Eigen::MatrixXd::Zero(3, 3)) == 0);
}

TEST_CASE("max_principal_angle recovers a known rotation") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 2), B = Eigen::MatrixXd::Zero(4, 2);
    A(0, 0) = A(1, 1) = 1;
    const double phi = 0.3;
    B(0, 0) = 1;
    B(1, 1) = std::cos(phi);
    B(2, 1) = std::sin(phi);
    CHECK(max_principal_angle(A, B) == doctest::Approx(phi).epsilon(1e-12));
    CHECK(max_principal_angle(A, A) < 1e-12);
}

TEST_CASE("quadratic_roots counts and orders real roots") {
    // A x^2 - B x + C
    QuadRoots two = quadratic_roots(1, 3, 2, 1e-12);
    CHECK(two.count == 2);
    CHECK(two.r[0] == doctest::Approx(1));
    CHECK(two.r[1] == doctest::Approx(2));
    QuadRoots none = quadratic_roots(1, 0, 1, 1e-12);
    CHECK(none.count == 0);
    QuadRoots one = quadratic_roots(1, 2, 1, 1e-12);
    CHECK(one.count == 1);
    CHECK(one.r[0] == doctest::Approx(1));
    QuadRoots linear = quadratic_roots(0, 2, 1, 1e-12);
    CHECK(linear.count == 1);
    CHECK(linear.r[0] == doctest::Approx(0.5));
    QuadRoots close = quadratic_roots(1, 2, 1 - 1e-10, 1e-14);
    CHECK(close.count == 2);
    CHECK(close.r[0] < close.r[1]);
}

TEST_CASE("cumulative_integral is fourth order") {
    const auto error = [](int n) {
        const Grid2 g = unit(n);
        const ScalarField2 f = sample(g, [](double u, double v) { return std::exp(u) * (1 + v); });
        const ScalarField2 F = cumulative_integral(f, Axis::u);
        return (F.values - sample(g, [](double u, double v) { return (std::exp(u) - 1) * (1 + v); }).values)
            .cwiseAbs()
            .maxCoeff();
    };
    CHECK(error(33) < 1e-7);
    CHECK(error(17) / error(33) > 12);
}

TEST_CASE("interpolation is exact on cubics") {
    Eigen::VectorXd y(8);
    for (int k = 0; k < 8; ++k) y(k) = k * k * k - 2.0 * k;
    CHECK(cubic_at(y, 3.25) == doctest::Approx(std::pow(3.25, 3) - 6.5));
    CHECK(cubic_midpoint(y, 4) == doctest::Approx(std::pow(4.5, 3) - 9.0));

    const Grid2 g = Grid2::box(0, 2, -1, 1, 11, 9);
    const auto p = [](double u, double v) { return u * u * u * v - 2 * u * v * v + v * v * v + 1; };
    CHECK(interp2(sample(g, p), 0.77, 0.31) == doctest::Approx(p(0.77, 0.31)).epsilon(1e-12));
}

TEST_CASE("Spline1D matches a smooth function and its derivatives") {
    const int n = 65;
    Eigen::VectorXd y(n);
    const double h = 1.0 / (n - 1);
    for (int k = 0; k < n; ++k) y(k) = std::sin(2 * k * h);
    const Spline1D s(0.0, h, y);
    CHECK(s(0.4321) == doctest::Approx(std::sin(0.8642)).epsilon(1e-7));
    CHECK(s.derivative(0.5) == doctest::Approx(2 * std::cos(1.0)).epsilon(1e-4));
    CHECK(s.second_derivative(0.5) == doctest::Approx(-4 * std::sin(1.0)).epsilon(1e-2));
}

TEST_CASE("bisect finds a bracketed root") {
    CHECK(bisect([](double x) { return x * x - 2; }, 0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}
