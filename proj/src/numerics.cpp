#include "hypsub/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace hypsub {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::size: return "size error";
        case ErrorKind::inconsistent_boundary: return "inconsistent boundary";
        case ErrorKind::degenerate_seed: return "degenerate seed";
        case ErrorKind::flatness: return "flatness";
        case ErrorKind::degenerate_angle: return "degenerate angle";
        case ErrorKind::degeneracy: return "degeneracy";
        case ErrorKind::regularity: return "regularity";
        case ErrorKind::hyperbolicity_violation: return "hyperbolicity violation";
        case ErrorKind::data_inconsistency: return "data inconsistency";
        case ErrorKind::inadmissible_pair: return "inadmissible pair";
        case ErrorKind::boundary: return "boundary";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::empty_domain: return "empty domain";
        case ErrorKind::sign: return "sign";
        case ErrorKind::escape: return "escape";
        case ErrorKind::ambiguous_rank: return "ambiguous rank";
        case ErrorKind::reparametrize_window: return "reparametrize window";
        case ErrorKind::config: return "config";
    }
    return "error";
}

bool is_numerical(ErrorKind k) { return k != ErrorKind::config && k != ErrorKind::precondition; }

void validate_grid(const Grid2& g) {
    if (!(g.du > 0.0) || !(g.dv > 0.0)) throw Error(ErrorKind::size, "grid spacings must be positive");
    if (g.Nu < 5 || g.Nv < 5) throw Error(ErrorKind::size, "grid needs at least 5 nodes per axis");
}

double max_abs_masked(const ScalarField2& f, const Mask& mask) {
    double m = 0.0;
    for (int i = 0; i < f.grid.Nu; ++i)
        for (int j = 0; j < f.grid.Nv; ++j)
            if (mask(i, j)) m = std::max(m, std::abs(f(i, j)));
    return m;
}

double max_norm(const VecField& f) {
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(f.grid.Nu, f.grid.Nv);
    for (const auto& c : f.comp) sq.array() += c.array().square();
    return std::sqrt(sq.maxCoeff());
}

VecField goursat_march(const ScalarField2& gamma_u, const ScalarField2& gamma_v, const Eigen::MatrixXd& boundary_u,
                       const Eigen::MatrixXd& boundary_v) {
    if (boundary_u.cols() != boundary_v.cols()) throw Error(ErrorKind::size, "trace dimension mismatch");
    VecField out(gamma_u.grid, static_cast<int>(boundary_u.cols()));
    for (int k = 0; k < out.dim(); ++k)
        out.comp[k] =
            goursat_march<double>(gamma_u, gamma_v, boundary_u.col(k), boundary_v.col(k)).values;
    return out;
}

VecField goursat_march_extrapolated(const std::function<double(double, double)>& gamma_u,
                                    const std::function<double(double, double)>& gamma_v, const Grid2& grid,
                                    const TraceFn& traces) {
    const auto run = [&](const Grid2& g) {
        const auto [bu, bv] = traces(g);
        return goursat_march(sample(g, gamma_u), sample(g, gamma_v), bu, bv);
    };
    const VecField coarse = run(grid);
    const VecField fine = run(grid.refined(2));
    VecField out(grid, coarse.dim());
    for (int k = 0; k < out.dim(); ++k)
        for (int i = 0; i < grid.Nu; ++i)
            for (int j = 0; j < grid.Nv; ++j)
                out.comp[k](i, j) = (4 * fine.comp[k](2 * i, 2 * j) - coarse.comp[k](i, j)) / 3;
    return out;
}

ScalarField2 wave_residual(const ScalarField2& h, const ScalarField2& gamma_u, const ScalarField2& gamma_v) {
    const ScalarField2 hu = fd_derivative(h, Axis::u, 1);
    const ScalarField2 hv = fd_derivative(h, Axis::v, 1);
    const ScalarField2 huv = fd_derivative(hu, Axis::v, 1);
    ScalarField2 q(h.grid);
    q.values = huv.values.array() - gamma_u.values.array() * hu.values.array() -
               gamma_v.values.array() * hv.values.array();
    return q;
}

Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& cols, double drop_tol) {
    Eigen::MatrixXd q(cols.rows(), cols.cols());
    int r = 0;
    for (int k = 0; k < cols.cols(); ++k) {
        Eigen::VectorXd x = cols.col(k);
        const double n0 = x.norm();
        if (n0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (int m = 0; m < r; ++m) x -= q.col(m).dot(x) * q.col(m);
        const double n1 = x.norm();
        if (n1 <= drop_tol * n0) continue;
        q.col(r++) = x / n1;
    }
    return q.leftCols(r);
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& cols, double tol) {
    const int N = static_cast<int>(cols.rows());
    Eigen::MatrixXd all(N, cols.cols() + N);
    all << cols, Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd q = gram_schmidt(all, tol);
    const int r = static_cast<int>(gram_schmidt(cols, tol).cols());
    return q.rightCols(q.cols() - r);
}

double max_principal_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    const Eigen::MatrixXd qa = gram_schmidt(A), qb = gram_schmidt(B);
    if (qa.cols() != qb.cols()) return M_PI / 2;
    const Eigen::VectorXd c = singular_values(qa.transpose() * qb);
    const double cmin = std::clamp(c.minCoeff(), -1.0, 1.0);
    // acos is ill-conditioned near 1; use the sine of the complement instead.
    const Eigen::MatrixXd resid = qb - qa * (qa.transpose() * qb);
    const double smax = std::min(1.0, singular_values(resid)(0));
    return cmin > 0.7 ? std::asin(smax) : std::acos(cmin);
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter) {
    double fa = f(a);
    if (fa == 0.0) return a;
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

QuadRoots quadratic_roots(double A, double B, double C, double disc_tol) {
    QuadRoots out;
    const double mag = std::abs(B) + std::abs(C);
    if (std::abs(A) <= 1e-14 * mag) {
        if (B != 0.0) {
            out.count = 1;
            out.r[0] = C / B;
        }
        out.disc = B * B;
        return out;
    }
    const double D = B * B - 4 * A * C;
    out.disc = D;
    if (D < -disc_tol) return out;
    const double vertex = B / (2 * A);
    if (D <= disc_tol) {
        out.count = 1;
        out.r[0] = vertex;
        return out;
    }
    double r1, r2;
    const double q = 0.5 * (B + std::copysign(std::sqrt(D), B));
    r1 = q / A;
    r2 = C / q;
    if (r1 > r2) std::swap(r1, r2);
    if (D < 1e6 * disc_tol) {
        // close roots: polish each on its side of the vertex
        const auto P = [&](double x) { return (A * x - B) * x + C; };
        const double w = 2 * (r2 - r1) + 1e-12 * std::max(1.0, std::abs(vertex));
        if (P(vertex - w) * P(vertex) <= 0) r1 = bisect(P, vertex - w, vertex);
        if (P(vertex) * P(vertex + w) <= 0) r2 = bisect(P, vertex, vertex + w);
    }
    out.count = 2;
    out.r[0] = r1;
    out.r[1] = r2;
    return out;
}

ScalarField2 cumulative_integral(const ScalarField2& f, Axis axis) {
    const Grid2& g = f.grid;
    const ScalarField2 df = fd_derivative(f, axis, 1, 4);
    ScalarField2 out(g);
    if (axis == Axis::u) {
        const double h = g.du;
        for (int j = 0; j < g.Nv; ++j) {
            double acc = 0.0;
            for (int i = 1; i < g.Nu; ++i) {
                acc += 0.5 * h * (f(i - 1, j) + f(i, j));
                out(i, j) = acc - h * h / 12.0 * (df(i, j) - df(0, j));
            }
        }
    } else {
        const double h = g.dv;
        for (int i = 0; i < g.Nu; ++i) {
            double acc = 0.0;
            for (int j = 1; j < g.Nv; ++j) {
                acc += 0.5 * h * (f(i, j - 1) + f(i, j));
                out(i, j) = acc - h * h / 12.0 * (df(i, j) - df(i, 0));
            }
        }
    }
    return out;
}

namespace {

// Lagrange weights for nodes 0..3 at position x.
void lagrange4(double x, double w[4]) {
    w[0] = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    w[1] = x * (x - 2) * (x - 3) / 2.0;
    w[2] = -x * (x - 1) * (x - 3) / 2.0;
    w[3] = x * (x - 1) * (x - 2) / 6.0;
}

// First stencil node and local coordinate for fractional index x on n samples.
int stencil(double x, int n, double& local) {
    int k = static_cast<int>(std::floor(x)) - 1;
    k = std::clamp(k, 0, n - 4);
    local = x - k;
    return k;
}

}  // namespace

double cubic_midpoint(const Eigen::VectorXd& y, int k) { return cubic_at(y, k + 0.5); }

double cubic_at(const Eigen::VectorXd& y, double x) {
    const int n = static_cast<int>(y.size());
    if (n < 4) throw Error(ErrorKind::size, "cubic interpolation needs 4 samples");
    double local, w[4];
    const int k = stencil(x, n, local);
    lagrange4(local, w);
    return w[0] * y(k) + w[1] * y(k + 1) + w[2] * y(k + 2) + w[3] * y(k + 3);
}

namespace {

struct Bicubic {
    int i0, j0;
    double wu[4], wv[4];
    Bicubic(const Grid2& g, double u, double v) {
        double lu, lv;
        i0 = stencil((u - g.u0) / g.du, g.Nu, lu);
        j0 = stencil((v - g.v0) / g.dv, g.Nv, lv);
        lagrange4(lu, wu);
        lagrange4(lv, wv);
    }
    double apply(const Eigen::MatrixXd& m) const {
        double s = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) s += wu[a] * wv[b] * m(i0 + a, j0 + b);
        return s;
    }
};

}  // namespace

double interp2(const ScalarField2& f, double u, double v) { return Bicubic(f.grid, u, v).apply(f.values); }

Eigen::VectorXd interp2(const VecField& f, double u, double v) {
    const Bicubic b(f.grid, u, v);
    Eigen::VectorXd x(f.dim());
    for (int k = 0; k < f.dim(); ++k) x(k) = b.apply(f.comp[k]);
    return x;
}

Spline1D::Spline1D(double x0, double h, Eigen::VectorXd y) : x0_(x0), h_(h), y_(std::move(y)) {
    const int n = static_cast<int>(y_.size());
    if (n < 2) throw Error(ErrorKind::size, "spline needs at least 2 knots");
    m_ = Eigen::VectorXd::Zero(n);
    if (n == 2) return;
    // Thomas algorithm for the natural-spline moment system.
    const int k = n - 2;
    Eigen::VectorXd c(k), d(k);
    for (int i = 0; i < k; ++i) d(i) = 6.0 * (y_(i + 2) - 2 * y_(i + 1) + y_(i)) / (h_ * h_);
    c(0) = 1.0 / 4.0;
    d(0) /= 4.0;
    for (int i = 1; i < k; ++i) {
        const double den = 4.0 - c(i - 1);
        c(i) = 1.0 / den;
        d(i) = (d(i) - d(i - 1)) / den;
    }
    m_(k) = d(k - 1);
    for (int i = k - 2; i >= 0; --i) m_(i + 1) = d(i) - c(i) * m_(i + 2);
}

int Spline1D::segment(double x) const {
    const int n = static_cast<int>(y_.size());
    return std::clamp(static_cast<int>(std::floor((x - x0_) / h_)), 0, n - 2);
}

double Spline1D::operator()(double x) const {
    const int i = segment(x);
    const double t = (x - (x0_ + i * h_)) / h_;
    const double a = 1 - t;
    return a * y_(i) + t * y_(i + 1) + h_ * h_ / 6.0 * ((a * a * a - a) * m_(i) + (t * t * t - t) * m_(i + 1));
}

double Spline1D::derivative(double x) const {
    const int i = segment(x);
    const double t = (x - (x0_ + i * h_)) / h_;
    const double a = 1 - t;
    return (y_(i + 1) - y_(i)) / h_ + h_ / 6.0 * (-(3 * a * a - 1) * m_(i) + (3 * t * t - 1) * m_(i + 1));
}

double Spline1D::second_derivative(double x) const {
    const int i = segment(x);
    const double t = (x - (x0_ + i * h_)) / h_;
    return (1 - t) * m_(i) + t * m_(i + 1);
}

}  // namespace hypsub
