#pragma once

#include "hypsub/surface_data.hpp"

#include <array>
#include <string>

namespace hypsub {

// The six deformation invariants. R_inv uses rho = ln|tan theta| and is only
// meaningful where mask is true (|cos theta| >= kFlatMask).
struct InvariantSet {
    ScalarField2 G_inv, C_u1, C_v1, C_u2, C_v2, R_inv;
    Mask mask;

    static constexpr std::array<const char*, 6> names = {"G", "C_u1", "C_v1", "C_u2", "C_v2", "R"};
    const ScalarField2& operator[](int k) const;
};

constexpr double kFlatMask = 1e-6;

// accuracy selects the difference stencils (2 or 4) used for the derivatives.
InvariantSet compute_invariants(const SurfaceData& S, int accuracy = 4);

// max |inv_k(S) - inv_k(S_hat)| over nodes unmasked in both.
std::array<double, 6> invariance_residual(const SurfaceData& S, const SurfaceData& S_hat, int accuracy = 4);

// 100 (du^2 + dv^2) scale
double default_tol_inv(const Grid2& g, double scale);

// Field scale of the invariant set (max over the six fields).
double invariant_scale(const InvariantSet& inv);

// default_tol_inv with each invariant's own field scale.
std::array<double, 6> invariant_tolerances(const InvariantSet& inv);

}  // namespace hypsub
