#pragma once

#include "hypsub/grid.hpp"

namespace hypsub {

// The quintuple {theta, Lambda^u, Lambda^v, kappa^u, kappa^v} on the leaf-space grid.
struct SurfaceData {
    ScalarField2 theta, lambda_u, lambda_v, kappa_u, kappa_v;

    const Grid2& grid() const { return theta.grid; }
};

}  // namespace hypsub
