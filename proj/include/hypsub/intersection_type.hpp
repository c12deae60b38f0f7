#pragma once

#include "hypsub/curves.hpp"
#include "hypsub/moduli.hpp"
#include "hypsub/numerics.hpp"
#include "hypsub/polar_surface.hpp"
#include "hypsub/surface_data.hpp"

#include <string>
#include <vector>

namespace hypsub {

// Sampling window for kernel matrices K[i,j] = <alpha1'(u_i), alpha2'(v_j)>.
struct KernelWindow {
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    int n = 65;
};

struct SharedDimension {
    int I = 0;
    Eigen::VectorXd singular_values;  // of K, descending
    double gap = 0.0;  // sigma_I / sigma_{I+1}; infinity when sigma_{I+1} is exactly zero
    Eigen::MatrixXd factors_u, factors_v;  // K ~ factors_u * factors_v^T, I columns each
    Eigen::MatrixXd shared_plane;  // N x I orthonormal basis; empty unless I == 2
    Eigen::VectorXd proj_speed1, proj_speed2;  // |P alpha_i'|^2 at the window samples (I == 2)
};

// Numerical rank of a sampled kernel. Throws ambiguous_rank when some relative
// singular value falls within a decade of rank_tol.
SharedDimension kernel_rank(const Eigen::MatrixXd& K, double rank_tol = kDefaultRankTol);

SharedDimension shared_dimension(const CurvePair& pair, const KernelWindow& w = {},
                                 double rank_tol = kDefaultRankTol);

// I on a 2 x 2 layout of overlapping sub-windows (local shared dimension).
std::vector<int> windowed_shared_dimension(const CurvePair& pair, const KernelWindow& w = {},
                                           double rank_tol = kDefaultRankTol);

// "honestly deformable" for I = 2, "compositions only" for I = 1, "honestly rigid" otherwise.
std::string honest_verdict(int I);

// U_t = (p1/t - 1)^{-1}, V_t = (t p2 - 1)^{-1} with p_i the squared projected speeds.
DeformationPair intersection_family(const Primitives& P, const std::function<double(double)>& p1,
                                    const std::function<double(double)>& p2, double t);

// The three inequalities U, V > -1/s and (U+1)(V+1) > cos^2 theta U V at every node.
Admissibility intersection_admissibility(const DeformationPair& pair, const SurfaceData& S);

struct FamilyMember {
    double t = 0.0;
    bool probe = false;  // |t| outside [0.1, 10]: near-boundary probe, reported but not part of the verdict
    bool admissible = false;
    Admissibility admissibility;
    double moduli_residual = 0.0, tol_mod = 0.0;
    bool member = false;
    Genuineness genuineness = Genuineness::sign_varies;
    bool honest = false;
    double phi_residual = 0.0;  // separable-variables equation
};

// Limit data of the family: t -> 0- gives (U,V) = (0,-1), t -> -inf gives (-1,0).
struct BoundaryDatum {
    std::string label;
    double U = 0.0, V = 0.0;
    ScalarField2 tau_u, tau_v, theta_hat;
    SurfaceData S_hat;
    FlatExtension flat_extension = FlatExtension::none;
};

struct IntersectionModuli {
    std::vector<double> t_samples;
    std::vector<FamilyMember> members;
    std::vector<BoundaryDatum> boundary;
    bool all_members = false, all_honest = false;  // over non-probe t < 0
};

// 16 log-spaced t in [-10, -0.1] plus the probes -1e3 and -1e-3.
std::vector<double> default_t_sweep();

IntersectionModuli intersection_moduli(const SurfaceData& S, const PolarSurface& surface,
                                       const std::function<double(double)>& p1,
                                       const std::function<double(double)>& p2,
                                       const std::vector<double>& ts = default_t_sweep());

// Exact boundary datum for constant (U,V) in {(0,-1), (-1,0)}, built on the
// sum-of-curves primitives (tau^u = 1 + sV, tau^v = 1 + sU).
BoundaryDatum boundary_datum(const SurfaceData& S, const PolarSurface& surface, double U, double V);

// 2 phi (1 - phi) phi_uv + (2 phi - 1) phi_u phi_v with phi = cos^2 theta U/(U+1) V/(V+1).
// Throws reparametrize_window when U or V touches 0 or -1.
ScalarField2 separable_phi_residual(const DeformationPair& pair, const SurfaceData& S);

// Lattice scan U = a0 + a1 (u - u0), V = b0 + b1 (v - v0) for members of the moduli space.
struct LatticeHit {
    double a0, a1, b0, b1;
    double residual;
    bool member;
    bool composition_branch;  // U == 0 or V == 0
};
struct LatticeScan {
    std::vector<LatticeHit> hits;  // admissible lattice points
    int members = 0, nontrivial_members = 0;
    double tol = 0.0;
    double min_nontrivial_residual = 0.0;  // smallest residual off the composition branches
    double max_branch_residual = 0.0;  // largest residual on the composition branches
};
// tol <= 0 selects 1e-2 tol_mod: the scan looks for isolated members, and the
// membership threshold alone admits discretization-level false positives.
LatticeScan lattice_scan(const SurfaceData& S, const std::vector<double>& values, const std::vector<double>& slopes,
                         double tol = 0.0);

}  // namespace hypsub
