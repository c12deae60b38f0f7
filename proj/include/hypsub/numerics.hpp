#pragma once

#include "hypsub/errors.hpp"
#include "hypsub/grid.hpp"

#include <Eigen/SVD>

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace hypsub {

enum class Axis { u, v };

namespace detail {

// Derivative of samples f[0..n) with spacing h along one line.
// accuracy 2: centered 3-point interior, one-sided 3-point (first) / 4-point (second) ends.
// accuracy 4: centered 5-point interior, one-sided 5/6-point ends.
template <typename Scalar, typename Get, typename Put>
void diff_line(int n, Scalar h, int order, int accuracy, Get f, Put out) {
    if (accuracy == 2) {
        if (order == 1) {
            out(0, (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h));
            for (int i = 1; i < n - 1; ++i) out(i, (f(i + 1) - f(i - 1)) / (2 * h));
            out(n - 1, (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h));
        } else {
            const Scalar h2 = h * h;
            out(0, (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / h2);
            for (int i = 1; i < n - 1; ++i) out(i, (f(i + 1) - 2 * f(i) + f(i - 1)) / h2);
            out(n - 1, (2 * f(n - 1) - 5 * f(n - 2) + 4 * f(n - 3) - f(n - 4)) / h2);
        }
        return;
    }
    if (order == 1) {
        const Scalar c = 12 * h;
        out(0, (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / c);
        out(1, (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4)) / c);
        for (int i = 2; i < n - 2; ++i) out(i, (f(i - 2) - 8 * f(i - 1) + 8 * f(i + 1) - f(i + 2)) / c);
        out(n - 2, (3 * f(n - 1) + 10 * f(n - 2) - 18 * f(n - 3) + 6 * f(n - 4) - f(n - 5)) / c);
        out(n - 1, (25 * f(n - 1) - 48 * f(n - 2) + 36 * f(n - 3) - 16 * f(n - 4) + 3 * f(n - 5)) / c);
    } else {
        const Scalar c = 12 * h * h;
        out(0, (45 * f(0) - 154 * f(1) + 214 * f(2) - 156 * f(3) + 61 * f(4) - 10 * f(5)) / c);
        out(1, (10 * f(0) - 15 * f(1) - 4 * f(2) + 14 * f(3) - 6 * f(4) + f(5)) / c);
        for (int i = 2; i < n - 2; ++i)
            out(i, (-f(i - 2) + 16 * f(i - 1) - 30 * f(i) + 16 * f(i + 1) - f(i + 2)) / c);
        out(n - 2, (10 * f(n - 1) - 15 * f(n - 2) - 4 * f(n - 3) + 14 * f(n - 4) - 6 * f(n - 5) + f(n - 6)) / c);
        out(n - 1,
            (45 * f(n - 1) - 154 * f(n - 2) + 214 * f(n - 3) - 156 * f(n - 4) + 61 * f(n - 5) - 10 * f(n - 6)) / c);
    }
}

inline int min_samples(int order, int accuracy) {
    if (accuracy == 2) return order == 1 ? 3 : 5;
    return order == 1 ? 5 : 6;
}

}  // namespace detail

// Finite-difference derivative along one axis. Second-order accurate by default
// (exact on polynomials of degree <= 2); accuracy = 4 selects the 5-point family.
template <typename Scalar>
Field2<Scalar> fd_derivative(const Field2<Scalar>& f, Axis axis, int order, int accuracy = 2) {
    if (order != 1 && order != 2) throw Error(ErrorKind::size, "derivative order must be 1 or 2");
    if (accuracy != 2 && accuracy != 4) throw Error(ErrorKind::size, "accuracy must be 2 or 4");
    const int n = axis == Axis::u ? f.grid.Nu : f.grid.Nv;
    const int need = std::max(5, detail::min_samples(order, accuracy));
    if (n < need)
        throw Error(ErrorKind::size, "fd_derivative needs " + std::to_string(need) + " samples along axis, got " +
                                         std::to_string(n));
    Field2<Scalar> out(f.grid);
    const Scalar h = static_cast<Scalar>(axis == Axis::u ? f.grid.du : f.grid.dv);
    if (axis == Axis::u) {
        for (int j = 0; j < f.grid.Nv; ++j)
            detail::diff_line<Scalar>(
                n, h, order, accuracy, [&](int i) { return f.values(i, j); },
                [&](int i, Scalar x) { out.values(i, j) = x; });
    } else {
        for (int i = 0; i < f.grid.Nu; ++i)
            detail::diff_line<Scalar>(
                n, h, order, accuracy, [&](int j) { return f.values(i, j); },
                [&](int j, Scalar x) { out.values(i, j) = x; });
    }
    return out;
}

template <typename Scalar>
VecField2<Scalar> fd_derivative(const VecField2<Scalar>& f, Axis axis, int order, int accuracy = 2) {
    VecField2<Scalar> out(f.grid, f.dim());
    for (int k = 0; k < f.dim(); ++k)
        out.comp[k] = fd_derivative(Field2<Scalar>(f.grid, f.comp[k]), axis, order, accuracy).values;
    return out;
}

// Mixed derivative d_u d_v.
template <typename Scalar>
Field2<Scalar> fd_mixed(const Field2<Scalar>& f, int accuracy = 2) {
    return fd_derivative(fd_derivative(f, Axis::u, 1, accuracy), Axis::v, 1, accuracy);
}

template <typename Scalar>
VecField2<Scalar> fd_mixed(const VecField2<Scalar>& f, int accuracy = 2) {
    return fd_derivative(fd_derivative(f, Axis::u, 1, accuracy), Axis::v, 1, accuracy);
}

// Goursat problem for h_uv = Gu h_u + Gv h_v with h given on v = v0 (boundary_u,
// indexed by i) and on u = u0 (boundary_v, indexed by j). Each cell is closed by
// the centered corner scheme with Christoffel symbols averaged over its corners.
template <typename Scalar>
Field2<Scalar> goursat_march(const Field2<Scalar>& gamma_u, const Field2<Scalar>& gamma_v,
                             const VectorX<Scalar>& boundary_u, const VectorX<Scalar>& boundary_v,
                             Scalar corner_tol = Scalar(1e-12)) {
    const Grid2& g = gamma_u.grid;
    validate_grid(g);
    if (gamma_v.grid != g) throw Error(ErrorKind::size, "Christoffel fields live on different grids");
    if (boundary_u.size() != g.Nu || boundary_v.size() != g.Nv)
        throw Error(ErrorKind::size, "boundary traces do not match grid");
    using std::abs;
    const Scalar scale = std::max<Scalar>(Scalar(1), std::max(abs(boundary_u(0)), abs(boundary_v(0))));
    if (abs(boundary_u(0) - boundary_v(0)) > corner_tol * scale)
        throw Error(ErrorKind::inconsistent_boundary, "traces disagree at the corner (u0,v0)");

    Field2<Scalar> h(g);
    h.values.col(0) = boundary_u;
    h.values.row(0) = boundary_v.transpose();
    const Scalar du = static_cast<Scalar>(g.du), dv = static_cast<Scalar>(g.dv);
    for (int i = 0; i + 1 < g.Nu; ++i) {
        for (int j = 0; j + 1 < g.Nv; ++j) {
            const Scalar gu = (gamma_u(i, j) + gamma_u(i + 1, j) + gamma_u(i, j + 1) + gamma_u(i + 1, j + 1)) / 4;
            const Scalar gv = (gamma_v(i, j) + gamma_v(i + 1, j) + gamma_v(i, j + 1) + gamma_v(i + 1, j + 1)) / 4;
            const Scalar h00 = h(i, j), h10 = h(i + 1, j), h01 = h(i, j + 1);
            const Scalar a = gu * dv / 2, b = gv * du / 2;
            const Scalar rhs = h10 + h01 - h00 + a * (h10 - h00 - h01) + b * (h01 - h00 - h10);
            const Scalar den = 1 - a - b;
            if (abs(den) < Scalar(1e-12)) throw Error(ErrorKind::degeneracy, "corner scheme singular; refine grid");
            h(i + 1, j + 1) = rhs / den;
        }
    }
    return h;
}

// Componentwise march for ambient-vector solutions.
VecField goursat_march(const ScalarField2& gamma_u, const ScalarField2& gamma_v, const Eigen::MatrixXd& boundary_u,
                       const Eigen::MatrixXd& boundary_v);

// March on `grid` and on its 2x refinement and combine (4 h_fine - h_coarse)/3.
// The corner scheme has an even error expansion, so this lifts it to fourth order.
// `traces(g)` returns the boundary rows for grid g as {boundary_u, boundary_v}.
using TraceFn = std::function<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>(const Grid2&)>;
VecField goursat_march_extrapolated(const std::function<double(double, double)>& gamma_u,
                                    const std::function<double(double, double)>& gamma_v, const Grid2& grid,
                                    const TraceFn& traces);

// Q(h) = h_uv - Gu h_u - Gv h_v measured with second-order stencils.
ScalarField2 wave_residual(const ScalarField2& h, const ScalarField2& gamma_u, const ScalarField2& gamma_v);

constexpr double kDefaultRankTol = 1e-7;

template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0 || m.cols() == 0) throw Error(ErrorKind::size, "empty matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m.template cast<double>());
    return svd.singularValues();
}

// Number of singular values above tol * sigma_max.
template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& m, double tol = kDefaultRankTol) {
    const Eigen::VectorXd sv = singular_values(m);
    if (!sv.allFinite()) throw Error(ErrorKind::degeneracy, "non-finite entries in rank computation");
    const double smax = sv(0);
    if (smax == 0.0) return 0;
    int r = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) > tol * smax) ++r;
    return r;
}

// Orthonormal basis of span(cols) via modified Gram-Schmidt, dropping columns whose
// residual falls below drop_tol times their original norm.
Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& cols, double drop_tol = 1e-10);

// Orthonormal basis of the orthogonal complement of span(cols) in R^N.
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& cols, double tol = 1e-10);

// Largest principal angle between the column spans of A and B (equal dimensions).
double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Bracketed bisection: root of f on [a,b] with f(a) f(b) <= 0.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol = 1e-14, int max_iter = 200);

// Real roots of A x^2 - B x + C, ascending. Discriminants with |D| <= disc_tol are
// treated as a double root refined by bisection on the derivative sign change.
struct QuadRoots {
    int count = 0;
    double r[2] = {0.0, 0.0};
    double disc = 0.0;
};
QuadRoots quadratic_roots(double A, double B, double C, double disc_tol);

// Cumulative integral along u (axis u) or v, starting at 0 on the first line.
// Trapezoid rule with endpoint derivative correction (fourth order on smooth data).
ScalarField2 cumulative_integral(const ScalarField2& f, Axis axis);

// Value at the midpoint between samples k and k+1 from a cubic through 4 neighbours.
double cubic_midpoint(const Eigen::VectorXd& y, int k);

// Cubic Lagrange interpolation at fractional index x in [0, n-1].
double cubic_at(const Eigen::VectorXd& y, double x);

// Bicubic Lagrange interpolation of a field at (u,v) inside the grid box.
double interp2(const ScalarField2& f, double u, double v);
Eigen::VectorXd interp2(const VecField& f, double u, double v);

// Natural cubic spline on uniform knots; used as a one-variable sampler.
class Spline1D {
public:
    Spline1D() = default;
    Spline1D(double x0, double h, Eigen::VectorXd y);
    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;  // piecewise linear; zero at the end knots
    double x0() const { return x0_; }
    double h() const { return h_; }
    const Eigen::VectorXd& knots() const { return y_; }

private:
    int segment(double x) const;
    double x0_ = 0.0, h_ = 1.0;
    Eigen::VectorXd y_, m_;  // values and second derivatives at knots
};

}  // namespace hypsub
