#include "hypsub/intersection_type.hpp"
#include "hypsub/moduli.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypsub;
using hypsub::testing::lab;

namespace {

const auto zero = [](double) { return 0.0; };

DeformationPair family_member(double t) {
    const hypsub::testing::Lab& L = lab("intersection");
    return intersection_family(primitives(L.S), L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, t);
}

}  // namespace

TEST_CASE("primitives integrate the main symbols from p0") {
    const SurfaceData& S = lab("wave").S;
    const Primitives P = primitives(S);
    const ScalarField2 du = fd_derivative(P.int_lu, Axis::u, 1, 4);
    const ScalarField2 dv = fd_derivative(P.int_lv, Axis::v, 1, 4);
    CHECK((du.values - S.lambda_u.values).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((dv.values - S.lambda_v.values).cwiseAbs().maxCoeff() < 1e-5);
    const double s00 = std::pow(std::sin(S.theta(0, 0)), 2);
    CHECK(P.int_lu(0, 0) == doctest::Approx(0.5 * std::log(s00)));
}

TEST_CASE("the zero pair is the identity deformation") {
    const SurfaceData& S = lab("separable").S;
    const DeformationPair pair = make_pair(S, zero, zero);
    const DeformedData d = build_taus(pair, S);
    CHECK(max_abs(map1(d.tau_u, [](double x) { return x - 1; })) == 0.0);
    CHECK(max_abs(map2(d.theta_hat, S.theta, std::minus<>())) < 1e-12);
    const ModuliResidual mr = moduli_residual(pair, S);
    CHECK(mr.max_abs < 1e-12);
    CHECK(mr.member);
}

TEST_CASE("tau fields solve their transport equations") {
    const DeformedData d = build_taus(family_member(-1.0), lab("intersection").S);
    CHECK(d.pde_residual_u < 1e-6);
    CHECK(d.pde_residual_v < 1e-6);
    CHECK(d.tau_u.values.minCoeff() > 0);
}

TEST_CASE("inadmissible pairs name the violated inequality") {
    const SurfaceData& S = lab("intersection").S;
    const DeformationPair pair = make_pair(S, [](double) { return -5.0; }, zero);
    const Admissibility a = check_admissibility(pair, S);
    CHECK_FALSE(a.ok);
    CHECK(a.inequality == 1);
    CHECK(a.margin < 0);
    try {
        build_taus(pair, S);
        FAIL("expected inadmissible_pair");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::inadmissible_pair);
    }
}

TEST_CASE("family members and non-members are told apart") {
    const SurfaceData& S = lab("intersection").S;
    for (double t : {-0.1, -1.0, -10.0}) {
        CAPTURE(t);
        const ModuliResidual mr = moduli_residual(family_member(t), S);
        CHECK(mr.member);
        CHECK(mr.max_abs < 1e-2 * mr.tol);
    }
    const DeformationPair bad = make_pair(
        S, [](double u) { return 1 + 0.8 * std::sin(12 * u); }, [](double v) { return 1 + 0.8 * std::cos(15 * v); });
    CHECK_FALSE(moduli_residual(bad, S).member);
}

TEST_CASE("classify reports honest genuine deformations along the family") {
    const hypsub::testing::Lab& L = lab("intersection");
    const ClassificationReport r = classify(family_member(-1.0), L.S, *L.P);
    CHECK(r.genuineness == Genuineness::genuine_honest);
    CHECK(r.honest);
    CHECK(r.uv_sign == 1);  // U, V < 0 along the family
    CHECK_FALSE(r.is_composition);
    CHECK(r.disc_law_violations == 0);
    CHECK(r.root_count_violations == 0);
    CHECK(r.max_disc_mismatch < 1e-8);
    CHECK(r.max_cr_residual < 1e-8);
    for (const HRootSample& h : r.h_samples) CHECK(h.count == 0);
}

TEST_CASE("classify recognises compositions on a coordinate branch") {
    const hypsub::testing::Lab& L = lab("intersection");
    const DeformationPair pair = make_pair(L.S, zero, [](double) { return 0.5; });
    const ClassificationReport r = classify(pair, L.S, *L.P);
    CHECK(r.uv_sign == 0);
    CHECK(r.genuineness == Genuineness::unique_singular_SC_extension);
    CHECK(r.root_count_violations == 0);
}

TEST_CASE("classify refuses non-members") {
    const hypsub::testing::Lab& L = lab("intersection");
    const DeformationPair bad = make_pair(
        L.S, [](double u) { return 1 + 0.8 * std::sin(12 * u); }, [](double v) { return 1 + 0.8 * std::cos(15 * v); });
    try {
        classify(bad, L.S, *L.P);
        FAIL("expected precondition");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::precondition);
    }
}

TEST_CASE("boundary data extend to flat hypersurfaces") {
    const hypsub::testing::Lab& L = lab("intersection");
    const DeformationPair a = make_pair(L.S, zero, [](double) { return -1.0; });
    CHECK(flat_extension_branch(a, *L.P) != FlatExtension::none);
    const DeformationPair b = make_pair(L.S, [](double) { return 0.3; }, [](double) { return 0.4; });
    CHECK(flat_extension_branch(b, *L.P) == FlatExtension::none);
}

TEST_CASE("angle-preserving scan on the Lambda = 0 seed") {
    const AnglePreservingReport r = angle_preserving_scan(lab("lambda_zero").S);
    CHECK(r.which == AnglePreservingCase::family_lambda_zero);
    REQUIRE(r.pairs.size() >= 2);
    CHECK(r.all_members);
    CHECK(r.all_uv_negative);
    for (double m : r.root_mismatch) CHECK(m < 1e-6);
}

TEST_CASE("angle-preserving scan finds nothing on the intersection seed") {
    const AnglePreservingReport r = angle_preserving_scan(lab("intersection").S);
    CHECK(r.pairs.empty());
    CHECK(r.which == AnglePreservingCase::none);
}

TEST_CASE("angle-preserving scan on constant-theta data") {
    const Grid2 g = Grid2::box(0, 1, 0, 1, 65, 65);
    SurfaceData S;
    S.theta = sample(g, [](double, double) { return 1.0; });
    S.lambda_u = sample(g, [](double u, double v) { return 1.0 / (2 * (1 + u + v)); });
    S.lambda_v = S.lambda_u;
    S.kappa_u = sample(g, [](double, double) { return 1.0; });
    S.kappa_v = S.kappa_u;
    const AnglePreservingReport r = angle_preserving_scan(S);
    CHECK(r.which == AnglePreservingCase::family_constant_theta);
    CHECK(r.all_members);
}

TEST_CASE("sbcasy residual vanishes on tau = 1") {
    const SurfaceData& S = lab("separable").S;
    CHECK(sbcasy_residual(sample(S.grid(), [](double, double) { return 1.0; }), S) < 1e-12);
}
