#include "hypsub/immersion.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypsub;
using hypsub::testing::lab;

TEST_CASE("Gauss identity holds on every preset") {
    for (const char* name : {"intersection", "separable", "three_term", "wave"}) {
        CAPTURE(name);
        CHECK(lab(name).an.gauss_residual <= 1e-3);
    }
}

TEST_CASE("normal spaces of Psi are spanned by g_u, g_v") {
    for (const char* name : {"intersection", "wave"}) {
        CAPTURE(name);
        const DualityCheck d = duality_check(lab(name).chart, 100, 11);
        CHECK(d.points - d.skipped >= 100);
        CHECK(d.max_defect <= 1e-3);
    }
}

TEST_CASE("shape operators have rank one and kill the rulings") {
    for (const char* name : {"intersection", "separable", "three_term"}) {
        CAPTURE(name);
        const ImmersionAnalysis& an = lab(name).an;
        CHECK(an.rank_one_residual <= 1e-2);
        CHECK(an.nullity_residual <= 1e-6);
        CHECK(an.cos_theta_residual <= 1e-10);
        CHECK(an.lambda1.values.minCoeff() > 0);
        CHECK(an.lambda2.values.minCoeff() > 0);
    }
}

TEST_CASE("eta_rho solves the Hessian system and rho solves the wave equation") {
    const ImmersionChart& c = lab("wave").chart;
    CHECK(c.eta.hessian_residual < 1e-4);
    CHECK(c.eta.wave_residual < 1e-4);
    const ImmersionChart& ci = lab("intersection").chart;
    CHECK(ci.eta.wave_residual < 1e-10);
}

TEST_CASE("rulings are orthonormal and orthogonal to g_u, g_v") {
    const ImmersionChart& c = lab("intersection").chart;
    REQUIRE(c.rulings.size() == 1);
    const PolarSurface& P = *c.surface;
    for (int i = 0; i < c.grid().Nu; i += 8)
        for (int j = 0; j < c.grid().Nv; j += 8) {
            const Eigen::VectorXd r = c.rulings[0].at(i, j);
            CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(r.dot(P.gu.at(i, j))) < 1e-10);
            CHECK(std::abs(r.dot(P.gv.at(i, j))) < 1e-10);
        }
}

TEST_CASE("Psi is affine along the rulings") {
    const ImmersionChart& c = lab("three_term").chart;
    const double u = 0.37, v = 0.61;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(c.n() - 2);
    const Eigen::VectorXd p0 = evaluate_psi(c, u, v, t);
    t(0) = 0.05;
    const Eigen::VectorXd p1 = evaluate_psi(c, u, v, t);
    t(0) = 0.1;
    const Eigen::VectorXd p2 = evaluate_psi(c, u, v, t);
    CHECK((p2 - 2 * p1 + p0).norm() < 1e-12);
    CHECK((p1 - p0).norm() == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("surface data carries kappa = lambda^2 / s") {
    const hypsub::testing::Lab& L = lab("separable");
    for (int i = 0; i < L.g.Nu; i += 16)
        for (int j = 0; j < L.g.Nv; j += 16) {
            const double s = std::pow(std::sin(L.S.theta(i, j)), 2);
            CHECK(L.S.kappa_u(i, j) == doctest::Approx(std::pow(L.an.lambda1(i, j), 2) / s).epsilon(1e-10));
            CHECK(L.S.kappa_v(i, j) == doctest::Approx(std::pow(L.an.lambda2(i, j), 2) / s).epsilon(1e-10));
            // Sign-fixed normals may turn theta into pi - theta.
            CHECK(std::abs(std::cos(L.S.theta(i, j))) == doctest::Approx(std::abs(std::cos(L.P->theta(i, j)))).epsilon(1e-6));
        }
}

TEST_CASE("tangent frame is orthonormal with the nullity first") {
    const ImmersionChart& c = lab("intersection").chart;
    const Eigen::MatrixXd T = tangent_frame(c, 10, 20);
    CHECK(T.cols() == c.n());
    CHECK((T.transpose() * T - Eigen::MatrixXd::Identity(c.n(), c.n())).norm() < 1e-10);
    CHECK((T.col(0) - c.rulings[0].at(10, 20)).norm() < 1e-12);
    CHECK(relative_gram_det(coordinate_frame(c, 10, 20)) > 1e-6);
}

TEST_CASE("separable rho requires vanishing Christoffel symbols") {
    const hypsub::testing::Lab& L = lab("intersection", 17);
    const RhoData r = rho_separable(L.g, {});
    CHECK(max_abs(wave_residual(r.rho, L.P->gamma_u, L.P->gamma_v)) < 1e-10);
    CHECK(default_rho(*lab("wave", 17).P).description != r.description);
}
