#include "hypsub/intersection_type.hpp"
#include "hypsub/reconstruct.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hypsub;
using hypsub::testing::lab;

namespace {

SurfaceData member_data(double t) {
    const hypsub::testing::Lab& L = lab("intersection");
    const DeformationPair pair =
        intersection_family(primitives(L.S), L.seed.curves.proj_speed1, L.seed.curves.proj_speed2, t);
    return build_taus(pair, L.S).S_hat;
}

}  // namespace

TEST_CASE("identity data reproduce the base chart up to a rigid motion") {
    for (const char* name : {"intersection", "separable", "wave"}) {
        CAPTURE(name);
        const hypsub::testing::Lab& L = lab(name);
        const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, L.S);
        CHECK(r.compatibility_residual <= r.tol_compat);
        CHECK(r.gram_relative_error <= 50 * L.g.h2());
        CHECK(congruence(L.chart, r).congruent());
    }
}

TEST_CASE("a family member is isometric but not congruent") {
    const hypsub::testing::Lab& L = lab("intersection");
    const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, member_data(-1.0));
    CHECK(r.gram_relative_error <= 50 * L.g.h2());
    CHECK(r.orthonormality_drift < 1e-5);
    const Alignment al = congruence(L.chart, r);
    CHECK(al.max_distance > 1e-2 * al.diameter);
    CHECK(affine_rank(r) == r.ambient_dim());
}

TEST_CASE("re-orthonormalizing the frame does not change the result") {
    const hypsub::testing::Lab& L = lab("intersection");
    ReconstructOptions opt;
    opt.reorthonormalize = true;
    const ReconstructedChart a = reconstruct_from_data(L.chart, L.an, member_data(-0.3));
    const ReconstructedChart b = reconstruct_from_data(L.chart, L.an, member_data(-0.3), opt);
    CHECK(procrustes(point_cloud(a.Z), point_cloud(b.Z)).max_distance < 1e-5 * a.diameter);
}

TEST_CASE("boundary data reconstruct into a hyperplane") {
    const hypsub::testing::Lab& L = lab("intersection");
    for (const auto& [U, V] : {std::pair{0.0, -1.0}, std::pair{-1.0, 0.0}}) {
        const BoundaryDatum b = boundary_datum(L.S, *L.P, U, V);
        const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, b.S_hat);
        CHECK(affine_rank(r) == L.chart.n() + 1);
    }
}

TEST_CASE("incompatible data are rejected") {
    const hypsub::testing::Lab& L = lab("intersection");
    const DeformationPair bad = make_pair(
        L.S, [](double u) { return 1 + 0.8 * std::sin(12 * u); }, [](double v) { return 1 + 0.8 * std::cos(15 * v); });
    try {
        reconstruct_from_data(L.chart, L.an, build_taus(bad, L.S).S_hat);
        FAIL("expected data_inconsistency");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data_inconsistency);
    }
}

TEST_CASE("procrustes recovers a random rigid motion") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd X(30, 4), M(4, 4);
    for (int i = 0; i < X.size(); ++i) X.data()[i] = n01(rng);
    for (int i = 0; i < M.size(); ++i) M.data()[i] = n01(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ();
    Eigen::VectorXd shift(4);
    shift << 1, -2, 0.5, 3;
    const Eigen::MatrixXd Y = (X * Q).rowwise() + shift.transpose();
    const Alignment al = procrustes(X, Y);
    CHECK(al.max_distance < 1e-10);
    CHECK(al.congruent());
    CHECK(diameter(X) == doctest::Approx(al.diameter));
}

TEST_CASE("reconstructed Psi is affine in the ruling parameter") {
    const hypsub::testing::Lab& L = lab("intersection");
    const ReconstructedChart r = reconstruct_from_data(L.chart, L.an, member_data(-2.0));
    Eigen::VectorXd t = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd p0 = evaluate_psi(r, 0.4, 0.6, t);
    t(0) = 0.08;
    const Eigen::VectorXd p1 = evaluate_psi(r, 0.4, 0.6, t);
    CHECK((p1 - p0).norm() == doctest::Approx(0.08).epsilon(1e-6));
}
