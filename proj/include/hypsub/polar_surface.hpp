#pragma once

#include "hypsub/curves.hpp"
#include "hypsub/numerics.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace hypsub {

enum class SeedKind { wave_solutions, sum_of_curves, separable_angle };

const char* to_string(SeedKind k);

// Closed-form description of a polar surface. sum_of_curves and separable_angle
// use `curves` directly; wave_solutions marches N solutions of h_uv = Gu h_u + Gv h_v
// whose traces on v = v0 and u = u0 are those of alpha1(u) + alpha2(v).
struct SeedFamily {
    SeedKind kind = SeedKind::sum_of_curves;
    CurvePair curves;
    std::function<double(double, double)> gamma_u, gamma_v;
    std::map<std::string, double> params;  // recorded in reports
    std::string label;
};

struct BuildOptions {
    double rank_tol = kDefaultRankTol;
    bool require_nowhere_flat = false;
    double flat_tol = 1e-8;  // |cos theta| below this counts as flat
};

struct PolarSurface {
    Grid2 grid;
    int ambient_dim = 0;
    SeedKind kind = SeedKind::sum_of_curves;

    // g and its derivatives up to order two. Analytic for curve seeds; for wave
    // seeds g is marched with Richardson extrapolation and differenced at fourth order.
    VecField g, gu, gv, guu, guv, gvv;
    ScalarField2 gamma_u, gamma_v;
    std::function<double(double, double)> gamma_u_fn, gamma_v_fn;  // wave seeds only
    ScalarField2 E, F, G;
    ScalarField2 E_u, E_v, F_u, F_v, G_u, G_v;
    ScalarField2 s, s_u, s_v, theta;
    ScalarField2 lambda_u, lambda_v;

    bool nowhere_flat = false;
    bool flat = false;  // F == 0 at every node
    double conjugacy_residual = 0.0;  // second-order stencils, interior nodes
    double min_independence_sv = 0.0;  // smallest relative 4th singular value of (gu,gv,guu,gvv)
};

using PolarSurfacePtr = std::shared_ptr<const PolarSurface>;

PolarSurface build_polar(const SeedFamily& seed, const Grid2& grid, int ambient_dim, const BuildOptions& opt = {});

// Fills lambda_u, lambda_v and s from the metric; degenerate-angle error when s vanishes.
struct MainSymbols {
    ScalarField2 lambda_u, lambda_v, s;
};
MainSymbols main_symbols(PolarSurface& surface);

struct NormalConnection {
    ScalarField2 psi1_u, psi1_v, psi2_u, psi2_v;
    // max |psi2(d_u)/tan(theta) - Lambda^u| and the v counterpart.
    double consistency_residual = 0.0;
};
NormalConnection normal_connection_forms(const PolarSurface& surface);

// ||g_uv - Gu g_u - Gv g_v|| on interior nodes, with second-order stencils.
double conjugacy_residual(const VecField& g, const ScalarField2& gamma_u, const ScalarField2& gamma_v);

// Gaussian curvature of the metric (E,F,G) by the Brioschi formula, fourth-order differences.
ScalarField2 brioschi_curvature(const ScalarField2& E, const ScalarField2& F, const ScalarField2& G);

// Seed presets shared by tests, tools and the pipeline.
SeedFamily intersection_seed(const RotatingPlaneParams& p = {});
SeedFamily separable_seed(const SeparableParams& p = {});
SeedFamily three_term_seed(const ThreeTermParams& p = {});
SeedFamily wave_seed(double gu_amp = 0.3, double gv_amp = 0.2, const RotatingPlaneParams& traces = {});

}  // namespace hypsub
