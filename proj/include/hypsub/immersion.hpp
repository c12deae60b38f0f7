#pragma once

#include "hypsub/polar_surface.hpp"
#include "hypsub/surface_data.hpp"

#include <vector>

namespace hypsub {

// A solution rho of the wave equation of the polar surface with its derivatives.
struct RhoData {
    ScalarField2 rho, rho_u, rho_v, rho_uu, rho_uv, rho_vv;
    std::string description;
};

// rho = phi(u) + psi(v) with cubic phi, psi (coefficients of x, x^2, x^3).
// Solves the wave equation only when both Christoffel symbols vanish.
struct RhoSpec {
    Eigen::Vector3d pu{-0.13, -0.2, 0.69};
    Eigen::Vector3d pv{-0.55, 0.81, -0.33};
};
RhoData rho_separable(const Grid2& g, const RhoSpec& spec);

// rho marched (extrapolated) from the traces phi(u) on v = v0 and psi(v) on u = u0, then
// differentiated with fourth-order stencils.
RhoData rho_wave(const PolarSurface& surface, const RhoSpec& spec);

// Pick the appropriate constructor for the surface kind.
RhoData default_rho(const PolarSurface& surface, const RhoSpec& spec = {});

struct EtaSolution {
    VecField eta_rho, grad_rho;
    VecField n1, n2;  // normal parts of g_uu and g_vv
    double hessian_residual = 0.0;  // max over the three Hessian components
    double wave_residual = 0.0;     // max |rho_uv - Gu rho_u - Gv rho_v|
};

EtaSolution solve_eta_rho(const PolarSurface& surface, const RhoData& rho);

struct ImmersionChart {
    PolarSurfacePtr surface;
    RhoData rho;
    EtaSolution eta;
    VecField Z;                     // grad rho + eta_rho, the t = 0 cross-section
    VecField Z_u, Z_v;              // fourth-order differences
    std::vector<VecField> rulings;  // orthonormal frame of the complement of T g + N^1 g
    std::vector<VecField> rulings_u, rulings_v;
    double t_extent = 0.1;          // rulings sampled on [-t_extent, t_extent]

    int n() const { return surface->ambient_dim - 2; }
    int ambient_dim() const { return surface->ambient_dim; }
    const Grid2& grid() const { return surface->grid; }
};

ImmersionChart build_chart(PolarSurfacePtr surface, const RhoData& rho, double t_extent = 0.1);

// Psi(u,v,t) = Z(u,v) + sum t_i rulings_i(u,v), bicubic in (u,v).
// Regularity error when the Gram determinant of dPsi falls below 1e-10 times the
// product of its diagonal.
Eigen::VectorXd evaluate_psi(const ImmersionChart& chart, double u, double v, const Eigen::VectorXd& t);

// Columns d_u Psi, d_v Psi, d_t1 Psi, ... at (u,v,t).
Eigen::MatrixXd psi_jacobian(const ImmersionChart& chart, double u, double v, const Eigen::VectorXd& t);

// Gram determinant relative to the product of the diagonal entries.
double relative_gram_det(const Eigen::MatrixXd& jacobian);

// Largest principal angle (radians) between the orthogonal complement of
// span{d Psi} at (u,v,t) and span{g_u, g_v} at (u,v).
double normal_space_defect(const ImmersionChart& chart, double u, double v, const Eigen::VectorXd& t);

struct DualityCheck {
    int points = 0, skipped = 0;  // skipped: non-regular samples
    double max_defect = 0.0;
};
// Uniform samples of (u,v,t) over the chart box, drawn from a seeded generator.
DualityCheck duality_check(const ImmersionChart& chart, int points, unsigned long long seed);

struct ImmersionAnalysis {
    VecField xi1, xi2;  // unit normals, signs fixed so lambda_i > 0
    int sign1 = 1, sign2 = 1;
    ScalarField2 theta;  // angle between xi1 and xi2
    ScalarField2 lambda1, lambda2;
    ScalarField2 omega;  // angle between the kernel directions Y1, Y2
    ScalarField2 scal_frame, scal_formula;
    ScalarField2 psi1_u, psi1_v, psi2_u, psi2_v;
    // Shape operators in the orthonormal tangent frame of the chart (see tangent_frame).
    std::vector<Eigen::MatrixXd> B1, B2;
    double cos_theta_residual = 0.0;  // | <xi1,xi2> - cos theta |
    double nullity_residual = 0.0;    // max |b(d_t, .)| relative to lambda
    double rank_one_residual = 0.0;   // max |second eigenvalue| / |first| on the Delta-perp block
    double gauss_residual = 0.0;      // relative: max|scal_frame - scal_formula| / max|scal_formula|
    double min_gram_det = 0.0;
};

// Orthonormal tangent frame at node (i,j): Gram-Schmidt of (rulings, Z_u, Z_v).
// The first n-2 columns span the nullity, the last two its orthogonal complement.
Eigen::MatrixXd tangent_frame(const ImmersionChart& chart, int i, int j);

// Coordinate tangent vectors (Z_u, Z_v, rulings) at node (i,j) and t = 0.
Eigen::MatrixXd coordinate_frame(const ImmersionChart& chart, int i, int j);

ImmersionAnalysis analyze(const ImmersionChart& chart, double hyperbolicity_tol = 1e-4);

// S(f) on the t = 0 cross-section: theta between the sign-fixed normals, main
// symbols from the polar surface, kappa = lambda^2 / s.
SurfaceData surface_data(const ImmersionChart& chart, const ImmersionAnalysis& an);

}  // namespace hypsub
