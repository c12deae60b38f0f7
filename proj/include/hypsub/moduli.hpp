#pragma once

#include "hypsub/numerics.hpp"
#include "hypsub/polar_surface.hpp"
#include "hypsub/surface_data.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hypsub {

// A candidate deformation: U(u), V(v) as spline samplers on the window axes,
// together with the primitives fixed at p0 = (u0, v0):
//   IntLu = int_{u0}^u Lambda^u dt + ln s(u0,v)/2,  IntLv = int_{v0}^v Lambda^v dt + ln s(u,v0)/2.
struct DeformationPair {
    Spline1D U, V;
    ScalarField2 int_lu, int_lv;
    std::string label;

    const Grid2& grid() const { return int_lu.grid; }
    double U_at(int i) const { return U.knots()(i); }
    double V_at(int j) const { return V.knots()(j); }
};

struct Primitives {
    ScalarField2 int_lu, int_lv;
};
Primitives primitives(const SurfaceData& S);

DeformationPair make_pair(const SurfaceData& S, const std::function<double(double)>& U,
                          const std::function<double(double)>& V, std::string label = {});
// Same, reusing precomputed primitives (scans over many pairs).
DeformationPair make_pair(const Primitives& P, const std::function<double(double)>& U,
                          const std::function<double(double)>& V, std::string label = {});

struct Admissibility {
    bool ok = true;
    int inequality = 0;  // 1: U > -e^{-2IntLv}, 2: V > -e^{-2IntLu}, 3: tau^u tau^v > cos^2 theta
    int i = -1, j = -1;  // first violating node
    double margin = 0.0;  // smallest slack over all nodes and inequalities
    std::string message;
};
Admissibility check_admissibility(const DeformationPair& pair, const SurfaceData& S);

struct DeformedData {
    ScalarField2 tau_u, tau_v, theta_hat;
    SurfaceData S_hat;
    double pde_residual_u = 0.0;  // max |tau^u_u - 2 Lambda^u (tau^u - 1)|
    double pde_residual_v = 0.0;
};

// Throws inadmissible_pair naming the violated inequality and node.
DeformedData build_taus(const DeformationPair& pair, const SurfaceData& S);

// 100 (du^2 + dv^2) scale
double default_tol_mod(const Grid2& g, double scale);

struct ModuliResidual {
    ScalarField2 residual;  // H_UV(rho_UV) - H_00(rho_00), zero on masked nodes
    Mask mask;
    double max_abs = 0.0;
    double scale = 1.0;  // field scale of H_00(rho_00)
    double tol = 0.0;
    bool member = false;
};
// tol <= 0 selects default_tol_mod.
ModuliResidual moduli_residual(const DeformationPair& pair, const SurfaceData& S, double tol = 0.0);

enum class CompositionBranch { none, u_branch, v_branch, both };
enum class FlatExtension { none, Gu_U0, Gv_V0, Gu_Vm1, Gv_Um1 };
enum class Genuineness {
    genuine_honest,
    genuine_not_honest,
    genuine_mixed,  // UV > 0 but the composition test fires on part of the window
    unique_singular_SC_extension,
    two_SC_extensions,
    sign_varies,  // sign(UV) not constant on the window
};

const char* to_string(CompositionBranch b);
const char* to_string(FlatExtension f);
const char* to_string(Genuineness g);

struct HRootSample {
    int i = 0, j = 0;
    double UV = 0.0;
    double A = 0.0, B = 0.0, C = 0.0;  // h(t) = A t^2 - B t + C
    double disc = 0.0;  // B^2 - 4AC from the coefficients
    double disc_closed = 0.0;  // -4k (tau^u - 1)(tau^v - 1)
    int count = 0;
    double roots[2] = {0.0, 0.0};
    double cr_residual = 0.0;  // worst mismatch of h(1/cos) and h(cos) against their closed forms
    double special_gap = 0.0;  // min |h(cos theta_hat)|, |h(1/cos theta_hat)| relative to the coefficient scale
};

struct ClassificationReport {
    double moduli_residual = 0.0, tol_mod = 0.0;

    // Composition (derivative residuals of the two quotient expressions).
    bool is_composition = false;  // one branch vanishes on the whole window
    CompositionBranch branch = CompositionBranch::none;
    int nodes = 0, composition_nodes_u = 0, composition_nodes_v = 0, composition_nodes = 0;
    double min_comp_u = 0.0, min_comp_v = 0.0;  // smallest |derivative| over the window
    double tol_comp = 0.0;

    FlatExtension flat_extension = FlatExtension::none;

    int uv_sign = 0;  // +1, 0, -1; 2 when the sign varies
    Genuineness genuineness = Genuineness::sign_varies;
    bool honest = false;
    std::string note;

    std::vector<HRootSample> h_samples;
    int disc_law_violations = 0;  // sign(disc) != sign(-UV)
    int root_count_violations = 0;  // 0/1/2 roots for UV >0/=0/<0
    double max_disc_mismatch = 0.0;  // |disc - disc_closed| relative
    double max_cr_residual = 0.0;
};

struct ClassifyOptions {
    double tol_mod = 0.0;  // <= 0: default
    double tol_comp = 0.0;  // <= 0: 10 (du^2 + dv^2) scale of the quotient expressions
    int sample_stride = 0;  // <= 0: about nine samples per axis
    double uv_zero = 1e-12;
    double flat_tol = 1e-9;
};

// Flat-hypersurface extension branch; usable on boundary data (e.g. U = 0, V = -1)
// where build_taus rejects the pair.
FlatExtension flat_extension_branch(const DeformationPair& pair, const PolarSurface& surface,
                                    const ClassifyOptions& opt = {});

// Throws precondition when the pair fails membership.
ClassificationReport classify(const DeformationPair& pair, const SurfaceData& S, const PolarSurface& surface,
                              const ClassifyOptions& opt = {});

// Angle-preserving deformations (theta_hat = theta, i.e. tau^u = 1/tau^v = tau).
enum class AnglePreservingCase {
    generic_tau,  // tau = Lambda^u s_v / (Lambda^v s_u)
    constant_theta_tau,  // theta constant, tau from the integrability condition
    family_su_zero,  // s_u = Lambda^u = Lambda^v_u = 0: constant U
    family_sv_zero,  // s_v = Lambda^v = Lambda^u_v = 0: constant V
    family_lambda_zero,  // Lambda^u = Lambda^v = 0: constant tau
    family_constant_theta,  // theta constant, Lambda^v_u = Lambda^u_v = -2 Lambda^u Lambda^v != 0
    none,
};
const char* to_string(AnglePreservingCase c);

struct AnglePreservingOptions {
    std::vector<double> family_params;  // tau_0 (or c) values; defaults chosen per case
    double zero_tol = 0.0;  // <= 0: 1e-2 (du^2 + dv^2) scale
    double tol_mod = 0.0;
};

struct AnglePreservingReport {
    AnglePreservingCase which = AnglePreservingCase::none;
    std::string verdict;
    double zero_tol = 0.0;
    // Candidate tau for the single-deformation cases.
    ScalarField2 tau;
    double sbcasy_residual = 0.0, sbcasy_tol = 0.0;
    std::vector<DeformationPair> pairs;
    std::vector<double> params;
    std::vector<double> residuals;  // moduli residual per pair
    std::vector<double> root_mismatch;  // max | |h root| - sqrt(tau) | per pair
    bool all_members = true;
    bool all_uv_negative = true;
};

AnglePreservingReport angle_preserving_scan(const SurfaceData& S, const AnglePreservingOptions& opt = {});

// Residuals of tau_u = 2 Lambda^u (tau - 1), tau_v = 2 Lambda^v tau (tau - 1).
double sbcasy_residual(const ScalarField2& tau, const SurfaceData& S);

}  // namespace hypsub
