#pragma once

#include "hypsub/numerics.hpp"
#include "hypsub/surface_data.hpp"

#include <string>
#include <vector>

namespace hypsub {

enum class HypersurfaceClass { continuous_class, discrete_class, rigid, none };
const char* to_string(HypersurfaceClass c);

// Positive root of P on the whole window, with its residuals in
// mu_u = mu a - b, mu_v = mu (mu c - d).
struct RootField {
    ScalarField2 mu;
    double hh_residual_u = 0.0, hh_residual_v = 0.0;
    bool satisfies_hh = false;
};

struct HypersurfaceReport {
    ScalarField2 a, b, c, d;
    // P(mu) = A mu^2 - B mu + C with A = ac + c_u, B = 2bc + d_u + a_v, C = bd + b_v.
    ScalarField2 P_A, P_B, P_C;
    Mask mask;  // nodes with s away from 0 and 1
    double identity_residual = 0.0;  // expanded coefficients against direct differencing, relative
    double P_norm = 0.0, P_tol = 0.0;
    double hh_tol = 0.0;
    std::vector<RootField> admissible_mus;  // positive roots, ascending
    int min_positive_roots = 0, max_positive_roots = 0;
    int root_count_nodes[3] = {0, 0, 0};  // unmasked nodes with 0, 1, 2 positive roots
    bool ambiguous = false;  // P-norm within a decade of tol, or root count varies over the window
    HypersurfaceClass verdict = HypersurfaceClass::none;
    std::string note;
    // Sufficient nonexistence inequalities: discriminant < 0, or sign patterns of (A,B,C).
    int nonexistence_nodes = 0, nodes = 0;
};

struct HypersurfaceOptions {
    double tol = 0.0;  // <= 0: 100 (du^2 + dv^2) scale, scale = max(1, |a|, |b|, |c|, |d|)
    double mask_eps = 1e-6;
};

HypersurfaceReport hypersurface_admission(const SurfaceData& S, const HypersurfaceOptions& opt = {});

// Value of P at mu, pointwise, from a report's coefficients.
ScalarField2 evaluate_P(const HypersurfaceReport& rep, const ScalarField2& mu);

// Residuals of the first-order system for a given mu field.
std::pair<double, double> hh_residual(const HypersurfaceReport& rep, const ScalarField2& mu);

struct MuIntegration {
    ScalarField2 mu;  // along v = v0 in u, then along each u = const in v
    ScalarField2 mu_alt;  // along u = u0 in v, then along each v = const in u
    double consistency = 0.0;  // max |mu - mu_alt| / max(1, |mu|)
    double hh_residual_u = 0.0, hh_residual_v = 0.0;
    double branch_mismatch = -1.0;  // against the chosen root field; -1 when none given
    int refinements = 0;  // step halvings taken in the Riccati direction
};

// root_branch indexes rep.admissible_mus (or -1 for none).
MuIntegration integrate_mu(const HypersurfaceReport& rep, double mu0, int root_branch = -1);
MuIntegration integrate_mu(const SurfaceData& S, double mu0, int root_branch = -1);

}  // namespace hypsub
