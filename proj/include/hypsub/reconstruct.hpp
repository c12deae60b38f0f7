#pragma once

#include "hypsub/immersion.hpp"
#include "hypsub/numerics.hpp"
#include "hypsub/surface_data.hpp"

#include <vector>

namespace hypsub {

struct ReconstructOptions {
    bool reorthonormalize = false;  // re-orthonormalize the moving frame after every step
    double tol_compat = 0.0;        // <= 0: du^2 + dv^2, relative to the cross-section diameter
    int compat_stride = 4;          // path-independence is compared on every stride-th node
};

// A deformed immersion on the t = 0 cross-section, with its moving frame.
// frame[0..n-3] are the ruling directions, frame[n-2], frame[n-1] span the
// nullity complement, frame[n] = xi_hat_1 and frame[n+1] = eta_hat_1.
struct ReconstructedChart {
    Grid2 grid;
    int n = 0;
    double t_extent = 0.1;
    VecField Z;
    VecField Z_u, Z_v;  // fourth-order differences of Z
    std::vector<VecField> frame;
    double diameter = 0.0;                // of the base cross-section
    double compatibility_residual = 0.0;  // u-then-v against v-then-u, relative to diameter
    double tol_compat = 0.0;
    double orthonormality_drift = 0.0;  // max |F^T F - I| before any re-orthonormalization
    double gram_relative_error = 0.0;   // against the base chart

    int ambient_dim() const { return n + 2; }
    const VecField& ruling(int k) const { return frame[static_cast<size_t>(k)]; }
};

// Integrates the Gauss-Weingarten frame system for the deformed data. The
// tangent connection and the tangent coordinates of d_u, d_v are shared with the
// base; the second fundamental form is the rescaled base form and the normal
// connection comes from theta_hat and Lambda_hat. Throws data_inconsistency when
// the two marching orders disagree by more than tol_compat.
ReconstructedChart reconstruct_from_data(const ImmersionChart& base, const ImmersionAnalysis& an,
                                         const SurfaceData& deformed, const ReconstructOptions& opt = {});

// Psi_hat(u,v,t) = Z_hat(u,v) + sum t_k ruling_k(u,v), bicubic in (u,v).
Eigen::VectorXd evaluate_psi(const ReconstructedChart& chart, double u, double v, const Eigen::VectorXd& t);

// Max over nodes of |Gram_hat - Gram| / |Gram| (entrywise max norms) for the
// coordinate fields (d_u, d_v, d_t1, ...) on the cross-section.
double gram_relative_error(const ImmersionChart& base, const ReconstructedChart& r);

// Orthogonal Procrustes: the orthogonal map and shift aligning Y onto X (rows are points).
struct Alignment {
    Eigen::MatrixXd R;
    Eigen::VectorXd shift;
    double max_distance = 0.0;  // after alignment
    double rms_distance = 0.0;
    double diameter = 0.0;      // of X
    bool congruent(double rel_tol = 1e-4) const { return max_distance <= rel_tol * diameter; }
};
Alignment procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// Nodes of a vector field as rows.
Eigen::MatrixXd point_cloud(const VecField& f);
double diameter(const Eigen::MatrixXd& points);

Alignment congruence(const ImmersionChart& base, const ReconstructedChart& r);

// Numerical rank of {Z(p) - Z(p0)} together with all frame tangents: n + 1 when
// the immersion lies in an affine hyperplane.
int affine_rank(const ReconstructedChart& r, double rank_tol = kDefaultRankTol);

}  // namespace hypsub
