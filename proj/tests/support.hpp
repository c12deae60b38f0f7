#pragma once

#include "hypsub/immersion.hpp"
#include "hypsub/polar_surface.hpp"

#include <string>

namespace hypsub::testing {

// Seed, polar surface, chart and analysis for one preset, built once per process.
struct Lab {
    Grid2 g;
    SeedFamily seed;
    PolarSurfacePtr P;
    ImmersionChart chart;
    ImmersionAnalysis an;
    SurfaceData S;
};

// intersection, separable, three_term, wave, lambda_zero (separable with constant a, b), flat (a = 0).
SeedFamily named_seed(const std::string& name);
const Lab& lab(const std::string& name, int nodes = 65);

}  // namespace hypsub::testing
