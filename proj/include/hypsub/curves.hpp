#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace hypsub {

// A regular curve in R^N given through its first two derivatives. Positions are
// recovered by Gauss-Legendre quadrature of d1 starting from `origin` at x = 0.
struct Curve {
    std::function<Eigen::VectorXd(double)> d1;
    std::function<Eigen::VectorXd(double)> d2;
    Eigen::VectorXd origin;

    int dim() const { return static_cast<int>(origin.size()); }
    Eigen::VectorXd position(double x) const;
    // Positions at x0 + k*h, k = 0..n-1 (rows), integrated cell by cell.
    Eigen::MatrixXd sample_positions(double x0, double h, int n) const;
};

// g(u,v) = alpha1(u) + alpha2(v).
struct CurvePair {
    Curve alpha1, alpha2;
    std::string family;
    // Squared norm of the projection of alpha_i' on the shared plane, when the
    // family carries it in closed form (shared dimension 2 only).
    std::function<double(double)> proj_speed1, proj_speed2;

    int dim() const { return alpha1.dim(); }
};

struct Affine1 {
    double c0 = 0.0, c1 = 0.0;
    double operator()(double x) const { return c0 + c1 * x; }
};

// Shared dimension 1: <alpha1', alpha2'> = a(u) b(v). Each curve is unit speed:
// alpha1' = a e0 + sqrt(1-a^2)(cos k1 u e1 + sin k1 u e2),
// alpha2' = b e0 + sqrt(1-b^2)(cos k2 v e3 + sin k2 v e4).
// a = 0 gives orthogonal curves (flat case); constant a, b give constant angle.
struct SeparableParams {
    Affine1 a{0.6, 0.15}, b{0.5, 0.1};
    double k1 = 2.0, k2 = 2.5;
};
CurvePair separable_angle_pair(const SeparableParams& p, int N = 5);

// Shared dimension 2 with shared plane span{e0,e1}:
// alpha1' = p(u)(cos phi1 e0 + sin phi1 e1) + sqrt(1-p^2)(cos k1 u e2 + sin k1 u e3),
// alpha2' = q(v)(cos phi2 e0 + sin phi2 e1) + sqrt(1-q^2) e4.
struct RotatingPlaneParams {
    Affine1 p{0.8, 0.1}, q{0.7, 0.1};
    Affine1 phi1{0.4, 0.5}, phi2{0.0, -0.3};
    double k1 = 2.0;
};
CurvePair rotating_plane_pair(const RotatingPlaneParams& p, int N = 5);

// Shared dimension 3: circles w(u) about e2 and z(v) about e0 on the unit sphere of span{e0,e1,e2},
// alpha1' = r1 w + sqrt(1-r1^2) e3, alpha2' = r2 z + sqrt(1-r2^2) e4.
struct ThreeTermParams {
    double r1 = 0.85, r2 = 0.8;
    double c1 = 0.5, c2 = 0.4;  // circle latitudes
    double k1 = 2.0, k2 = 1.5, delta = 0.3;
};
CurvePair three_term_pair(const ThreeTermParams& p, int N = 5);

}  // namespace hypsub
