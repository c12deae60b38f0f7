#include "hypsub/hypersurface.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace hypsub;
using hypsub::testing::lab;

namespace {

double s_at(const SurfaceData& S, int i, int j) { return std::pow(std::sin(S.theta(i, j)), 2); }

}  // namespace

TEST_CASE("intersection seed is discrete class with roots 1/s - 1 and 1/s") {
    const SurfaceData& S = lab("intersection").S;
    const HypersurfaceReport r = hypersurface_admission(S);
    CHECK(r.verdict == HypersurfaceClass::discrete_class);
    CHECK_FALSE(r.ambiguous);
    CHECK(r.identity_residual < 1e-5);
    REQUIRE(r.admissible_mus.size() == 2);
    double worst = 0;
    for (int i = 0; i < S.grid().Nu; ++i)
        for (int j = 0; j < S.grid().Nv; ++j) {
            const double s = s_at(S, i, j);
            worst = std::max(worst, std::abs(r.admissible_mus[0].mu(i, j) - (1 / s - 1)) / (1 / s - 1));
            worst = std::max(worst, std::abs(r.admissible_mus[1].mu(i, j) - 1 / s) / (1 / s));
        }
    CHECK(worst < 1e-3);
    for (const RootField& m : r.admissible_mus) CHECK(m.satisfies_hh);
}

TEST_CASE("P vanishes at its admissible roots") {
    const HypersurfaceReport r = hypersurface_admission(lab("intersection").S);
    for (const RootField& m : r.admissible_mus) {
        const ScalarField2 P = evaluate_P(r, m.mu);
        CHECK(max_abs_masked(P, r.mask) < 1e-8 * std::max(1.0, r.P_norm));
    }
}

TEST_CASE("separable cos theta gives the continuous class") {
    const SurfaceData& S = lab("separable").S;
    const HypersurfaceReport r = hypersurface_admission(S);
    CHECK(r.verdict == HypersurfaceClass::continuous_class);
    CHECK(r.P_norm <= r.P_tol);
    // mu = lambda(v) + 1/s with lambda = K / (b^2 - K), b the v-factor of cos theta up to a constant.
    for (double K : {0.0, 0.05, -0.1}) {
        CAPTURE(K);
        ScalarField2 mu(S.grid());
        for (int i = 0; i < S.grid().Nu; ++i)
            for (int j = 0; j < S.grid().Nv; ++j) {
                const double b = std::cos(S.theta(0, j));
                mu(i, j) = K / (b * b - K) + 1 / s_at(S, i, j);
            }
        const auto [ru, rv] = hh_residual(r, mu);
        CHECK(std::max(ru, rv) <= r.hh_tol);
    }
    ScalarField2 mu = map1(S.theta, [](double t) { return -1 + 1 / std::pow(std::sin(t), 2); });
    const auto [ru, rv] = hh_residual(r, mu);
    CHECK(std::max(ru, rv) <= r.hh_tol);
}

TEST_CASE("integrated mu is path independent and lands on the closed form") {
    const SurfaceData& S = lab("separable").S;
    const HypersurfaceReport r = hypersurface_admission(S);
    const double mu0 = 1 / s_at(S, 0, 0);
    const MuIntegration mi = integrate_mu(r, mu0);
    CHECK(mi.consistency < 1e-5);
    double worst = 0;
    for (int i = 0; i < S.grid().Nu; ++i)
        for (int j = 0; j < S.grid().Nv; ++j) worst = std::max(worst, std::abs(mi.mu(i, j) - 1 / s_at(S, i, j)));
    CHECK(worst < 1e-5);
}

TEST_CASE("integrate_mu follows the chosen root on the discrete class") {
    const SurfaceData& S = lab("intersection").S;
    const HypersurfaceReport r = hypersurface_admission(S);
    const MuIntegration mi = integrate_mu(r, r.admissible_mus[1].mu(0, 0), 1);
    CHECK(mi.branch_mismatch >= 0);
    CHECK(mi.branch_mismatch < 1e-4);
    CHECK(mi.consistency < 1e-4);
}

TEST_CASE("mixed root counts are reported as ambiguous, not as a class") {
    const HypersurfaceReport r = hypersurface_admission(lab("three_term").S);
    CHECK(r.verdict != HypersurfaceClass::discrete_class);
    CHECK(r.verdict != HypersurfaceClass::continuous_class);
    CHECK(r.nodes > 0);
}

TEST_CASE("a tolerance override changes the P threshold") {
    const SurfaceData& S = lab("intersection").S;
    HypersurfaceOptions opt;
    opt.tol = 1e9;
    const HypersurfaceReport r = hypersurface_admission(S, opt);
    CHECK(r.P_tol == 1e9);
    CHECK(r.verdict == HypersurfaceClass::continuous_class);
}
