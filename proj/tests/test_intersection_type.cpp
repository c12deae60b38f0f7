#include "hypsub/intersection_type.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypsub;
using hypsub::testing::lab;

TEST_CASE("shared dimension of the preset curve pairs") {
    const std::pair<const char*, int> cases[] = {{"separable", 1}, {"intersection", 2}, {"three_term", 3}};
    for (const auto& [name, I] : cases) {
        CAPTURE(name);
        const SharedDimension sd = shared_dimension(hypsub::testing::named_seed(name).curves);
        CHECK(sd.I == I);
        CHECK(sd.gap >= 1e3);
        CHECK(sd.factors_u.cols() == I);
        for (int w : windowed_shared_dimension(hypsub::testing::named_seed(name).curves)) CHECK(w == I);
    }
    CHECK(honest_verdict(2) == "honestly deformable");
    CHECK(honest_verdict(1) == "compositions only");
    CHECK(honest_verdict(3) == "honestly rigid");
}

TEST_CASE("kernel_rank of a synthetic k-term kernel") {
    const int n = 40;
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = i / (n - 1.0), v = j / (n - 1.0);
            K(i, j) = std::sin(u) * std::cos(v) + u * u * v + std::exp(u) * v * v * v;
        }
    CHECK(kernel_rank(K).I == 3);
}

TEST_CASE("kernel_rank refuses a singular value next to the threshold") {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(5, 5);
    K(0, 0) = 1;
    K(1, 1) = 3e-7;
    try {
        kernel_rank(K, 1e-7);
        FAIL("expected ambiguous_rank");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ambiguous_rank);
    }
}

TEST_CASE("projected speeds from the kernel match the closed form") {
    const CurvePair c = hypsub::testing::named_seed("intersection").curves;
    const SharedDimension sd = shared_dimension(c);
    REQUIRE(sd.proj_speed1.size() == 65);
    for (int k = 0; k < 65; k += 8) {
        CHECK(sd.proj_speed1(k) == doctest::Approx(c.proj_speed1(k / 64.0)).epsilon(1e-8));
        CHECK(sd.proj_speed2(k) == doctest::Approx(c.proj_speed2(k / 64.0)).epsilon(1e-8));
    }
}

TEST_CASE("the t family sweep: members, honest, positive t inadmissible") {
    const hypsub::testing::Lab& L = lab("intersection");
    std::vector<double> ts = default_t_sweep();
    ts.push_back(0.5);
    ts.push_back(5.0);
    const IntersectionModuli im = intersection_moduli(L.S, *L.P, L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, ts);
    CHECK(im.all_members);
    CHECK(im.all_honest);
    int verdict_samples = 0;
    for (const FamilyMember& m : im.members) {
        CAPTURE(m.t);
        if (m.t > 0) {
            CHECK_FALSE(m.admissible);
        } else if (!m.probe) {
            ++verdict_samples;
            CHECK(m.member);
            CHECK(m.genuineness == Genuineness::genuine_honest);
            CHECK(m.phi_residual < 1e-3);
        }
    }
    CHECK(verdict_samples == 16);
    REQUIRE(im.boundary.size() == 2);
}

TEST_CASE("boundary data have theta_hat in {0, pi} and extend flat") {
    const hypsub::testing::Lab& L = lab("intersection");
    for (const auto& [U, V] : {std::pair{0.0, -1.0}, std::pair{-1.0, 0.0}}) {
        const BoundaryDatum b = boundary_datum(L.S, *L.P, U, V);
        CHECK(b.flat_extension != FlatExtension::none);
        const double c = std::abs(std::cos(b.theta_hat(10, 10)));
        CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
        const double s = std::pow(std::sin(L.S.theta(7, 9)), 2);
        CHECK(b.tau_u(7, 9) == doctest::Approx(1 + s * V));
        CHECK(b.tau_v(7, 9) == doctest::Approx(1 + s * U));
    }
}

TEST_CASE("admissibility of the t family follows the sign of t") {
    const hypsub::testing::Lab& L = lab("intersection");
    const Primitives P = primitives(L.S);
    const auto p1 = L.seed.curves.proj_speed1, p2 = L.seed.curves.proj_speed2;
    CHECK(intersection_admissibility(intersection_family(P, p1, p2, -2.0), L.S).ok);
    const Admissibility a = intersection_admissibility(intersection_family(P, p1, p2, 0.5), L.S);
    CHECK_FALSE(a.ok);
    CHECK(a.inequality == 3);
}

TEST_CASE("separable-variables equation singles out the family") {
    const hypsub::testing::Lab& L = lab("intersection");
    const Primitives P = primitives(L.S);
    const DeformationPair m = intersection_family(P, L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, -1.0);
    CHECK(max_abs(separable_phi_residual(m, L.S)) < 1e-3);
    const DeformationPair z = make_pair(L.S, [](double) { return 0.0; }, [](double) { return 1.0; });
    try {
        separable_phi_residual(z, L.S);
        FAIL("expected reparametrize_window");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::reparametrize_window);
    }
}

TEST_CASE("three-term seed has no nontrivial lattice members") {
    const LatticeScan scan = lattice_scan(lab("three_term").S, {-0.5, 0.0, 0.5, 1.0, 2.0}, {-0.5, 0.0, 0.5});
    CHECK(scan.nontrivial_members == 0);
    CHECK(scan.members > 0);
    CHECK(scan.max_branch_residual <= scan.tol);
    CHECK(scan.min_nontrivial_residual > 10 * scan.tol);
}
