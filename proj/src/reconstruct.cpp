#include "hypsub/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace hypsub {

namespace {

using Mat = Eigen::MatrixXd;

// Cubic interpolation of node data at the midpoint of [k, k+1] on a line of n nodes.
Mat midpoint(int k, int n, const std::function<const Mat&(int)>& at) {
    if (n < 4) return 0.5 * (at(k) + at(k + 1));
    if (k == 0) return (5 * at(0) + 15 * at(1) - 5 * at(2) + at(3)) / 16;
    if (k == n - 2) return (5 * at(n - 1) + 15 * at(n - 2) - 5 * at(n - 3) + at(n - 4)) / 16;
    return (-at(k - 1) + 9 * at(k) + 9 * at(k + 1) - at(k + 2)) / 16;
}

// One RK4 step of A' = A M(x) with M given at both ends and the midpoint.
Mat rk4_step(const Mat& A, const Mat& M0, const Mat& Mh, const Mat& M1, double h) {
    const Mat k1 = A * M0;
    const Mat k2 = (A + h / 2 * k1) * Mh;
    const Mat k3 = (A + h / 2 * k2) * Mh;
    const Mat k4 = (A + h * k3) * M1;
    return A + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

struct Marcher {
    const Grid2& g;
    int N;
    const std::vector<Mat>& Mu;
    const std::vector<Mat>& Mv;
    bool reorth;
    double drift = 0.0;

    const Mat& mu(int i, int j) const { return Mu[static_cast<size_t>(i) * g.Nv + j]; }
    const Mat& mv(int i, int j) const { return Mv[static_cast<size_t>(i) * g.Nv + j]; }

    void fix(Mat& A) {
        const Mat F = A.topLeftCorner(N, N);
        drift = std::max(drift, (F.transpose() * F - Mat::Identity(N, N)).cwiseAbs().maxCoeff());
        if (!reorth) return;
        Eigen::JacobiSVD<Mat> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
        A.topLeftCorner(N, N) = svd.matrixU() * svd.matrixV().transpose();
    }
    Mat step_u(const Mat& A, int i, int j) {
        const Mat mid = midpoint(i, g.Nu, [&](int k) -> const Mat& { return mu(k, j); });
        Mat out = rk4_step(A, mu(i, j), mid, mu(i + 1, j), g.du);
        fix(out);
        return out;
    }
    Mat step_v(const Mat& A, int i, int j) {
        const Mat mid = midpoint(j, g.Nv, [&](int k) -> const Mat& { return mv(i, k); });
        Mat out = rk4_step(A, mv(i, j), mid, mv(i, j + 1), g.dv);
        fix(out);
        return out;
    }

    // Along v = v0 in u, then up every u-line (u_first), or the transpose order.
    std::vector<Mat> march(const Mat& A0, bool u_first) {
        std::vector<Mat> out(static_cast<size_t>(g.Nu) * g.Nv);
        auto at = [&](int i, int j) -> Mat& { return out[static_cast<size_t>(i) * g.Nv + j]; };
        at(0, 0) = A0;
        if (u_first) {
            for (int i = 0; i + 1 < g.Nu; ++i) at(i + 1, 0) = step_u(at(i, 0), i, 0);
            for (int i = 0; i < g.Nu; ++i)
                for (int j = 0; j + 1 < g.Nv; ++j) at(i, j + 1) = step_v(at(i, j), i, j);
        } else {
            for (int j = 0; j + 1 < g.Nv; ++j) at(0, j + 1) = step_v(at(0, j), 0, j);
            for (int j = 0; j < g.Nv; ++j)
                for (int i = 0; i + 1 < g.Nu; ++i) at(i + 1, j) = step_u(at(i, j), i, j);
        }
        return out;
    }
};

}  // namespace

ReconstructedChart reconstruct_from_data(const ImmersionChart& base, const ImmersionAnalysis& an,
                                         const SurfaceData& deformed, const ReconstructOptions& opt) {
    const Grid2& g = base.grid();
    if (deformed.grid() != g) throw Error(ErrorKind::size, "deformed data live on a different grid");
    const int n = base.n(), N = base.ambient_dim();
    const SurfaceData S = surface_data(base, an);

    // Orthonormal base tangent frame as fields, for the shared connection.
    std::vector<VecField> E(static_cast<size_t>(n), VecField(g, N));
    std::vector<Mat> Et(static_cast<size_t>(g.Nu) * g.Nv);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const Mat q = tangent_frame(base, i, j);
            Et[static_cast<size_t>(i) * g.Nv + j] = q;
            for (int a = 0; a < n; ++a) E[static_cast<size_t>(a)].set(i, j, q.col(a));
        }
    std::vector<VecField> E_u, E_v;
    for (const VecField& e : E) {
        E_u.push_back(fd_derivative(e, Axis::u, 1, 4));
        E_v.push_back(fd_derivative(e, Axis::v, 1, 4));
    }
    const ScalarField2 th_u = fd_derivative(deformed.theta, Axis::u, 1, 4);

    std::vector<Mat> Mu(Et.size()), Mv(Et.size());
    Mat A0 = Mat::Identity(N + 1, N + 1);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const size_t id = static_cast<size_t>(i) * g.Nv + j;
            const Mat& q = Et[id];
            const double st = std::sin(S.theta(i, j));
            const double th = deformed.theta(i, j), ch = std::cos(th), sh = std::sin(th);
            const double rtu = std::sqrt(deformed.kappa_u(i, j) / S.kappa_u(i, j));
            const double rtv = std::sqrt(deformed.kappa_v(i, j) / S.kappa_v(i, j));
            const Mat B1 = rtu * (sh / st) * an.B1[id];
            const Mat B2 = (rtv * an.B2[id] - ch * rtu * an.B1[id]) / st;
            const double psi_u = (sh / ch) * deformed.lambda_u(i, j) - th_u(i, j);
            const double psi_v = -(sh / ch) * deformed.lambda_v(i, j);
            const Eigen::VectorXd c[2] = {q.transpose() * base.Z_u.at(i, j), q.transpose() * base.Z_v.at(i, j)};
            for (int dir = 0; dir < 2; ++dir) {
                const std::vector<VecField>& dE = dir == 0 ? E_u : E_v;
                Mat M = Mat::Zero(N + 1, N + 1);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) M(a, b) = q.col(a).dot(dE[static_cast<size_t>(b)].at(i, j));
                M.topLeftCorner(n, n) = 0.5 * (M.topLeftCorner(n, n) - M.topLeftCorner(n, n).transpose()).eval();
                const Eigen::RowVectorXd r1 = c[dir].transpose() * B1, r2 = c[dir].transpose() * B2;
                M.block(n, 0, 1, n) = r1;
                M.block(n + 1, 0, 1, n) = r2;
                M.block(0, n, n, 1) = -r1.transpose();
                M.block(0, n + 1, n, 1) = -r2.transpose();
                const double psi = dir == 0 ? psi_u : psi_v;
                M(n + 1, n) = psi;
                M(n, n + 1) = -psi;
                M.block(0, N, n, 1) = c[dir];
                (dir == 0 ? Mu : Mv)[id] = M;
            }
            if (i == 0 && j == 0) {
                const Eigen::VectorXd x1 = an.xi1.at(0, 0), x2 = an.xi2.at(0, 0);
                const double cf = std::cos(S.theta(0, 0));
                A0.block(0, 0, N, n) = q;
                A0.block(0, n, N, 1) = x1;
                A0.block(0, n + 1, N, 1) = (x2 - cf * x1) / st;
                A0.block(0, N, N, 1) = base.Z.at(0, 0);
            }
        }
    if (!Mu[0].allFinite() || !Mv[0].allFinite())
        throw Error(ErrorKind::degeneracy, "non-finite connection data (flat or degenerate angle)");

    Marcher m{g, N, Mu, Mv, opt.reorthonormalize};
    const std::vector<Mat> A = m.march(A0, true);
    const double drift_primary = m.drift;
    const std::vector<Mat> B = m.march(A0, false);

    ReconstructedChart r;
    r.grid = g;
    r.n = n;
    r.t_extent = base.t_extent;
    r.Z = VecField(g, N);
    r.frame.assign(static_cast<size_t>(N), VecField(g, N));
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const Mat& a = A[static_cast<size_t>(i) * g.Nv + j];
            r.Z.set(i, j, a.block(0, N, N, 1));
            for (int k = 0; k < N; ++k) r.frame[static_cast<size_t>(k)].set(i, j, a.block(0, k, N, 1));
        }
    r.Z_u = fd_derivative(r.Z, Axis::u, 1, 4);
    r.Z_v = fd_derivative(r.Z, Axis::v, 1, 4);
    r.diameter = diameter(point_cloud(base.Z));
    r.orthonormality_drift = drift_primary;

    const int stride = std::max(1, opt.compat_stride);
    double gap = 0.0;
    for (int i = 0; i < g.Nu; i += stride)
        for (int j = 0; j < g.Nv; j += stride) {
            const size_t id = static_cast<size_t>(i) * g.Nv + j;
            gap = std::max(gap, (A[id].block(0, N, N, 1) - B[id].block(0, N, N, 1)).norm());
        }
    r.compatibility_residual = gap / r.diameter;
    r.tol_compat = opt.tol_compat > 0 ? opt.tol_compat : g.h2();
    if (!(r.compatibility_residual <= r.tol_compat))
        throw Error(ErrorKind::data_inconsistency,
                    "marching orders disagree by " + std::to_string(r.compatibility_residual) +
                        " of the diameter (tol_compat " + std::to_string(r.tol_compat) + ")");
    r.gram_relative_error = gram_relative_error(base, r);
    return r;
}

Eigen::VectorXd evaluate_psi(const ReconstructedChart& c, double u, double v, const Eigen::VectorXd& t) {
    const Grid2& g = c.grid;
    const double eps = 1e-12;
    if (u < g.u0 - eps || u > g.u_end() + eps || v < g.v0 - eps || v > g.v_end() + eps)
        throw Error(ErrorKind::precondition, "(u,v) outside the grid box");
    if (t.size() != c.n - 2) throw Error(ErrorKind::size, "ruling parameter has wrong dimension");
    Eigen::VectorXd p = interp2(c.Z, u, v);
    for (int k = 0; k < t.size(); ++k) p += t(k) * interp2(c.ruling(k), u, v);
    return p;
}

double gram_relative_error(const ImmersionChart& base, const ReconstructedChart& r) {
    const Grid2& g = base.grid();
    if (r.grid != g) throw Error(ErrorKind::size, "reconstruction lives on a different grid");
    const int n = base.n();
    double worst = 0.0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const Mat J = coordinate_frame(base, i, j);
            Mat Jh(J.rows(), n);
            Jh.col(0) = r.Z_u.at(i, j);
            Jh.col(1) = r.Z_v.at(i, j);
            for (int k = 0; k < n - 2; ++k) Jh.col(2 + k) = r.ruling(k).at(i, j);
            const Mat G0 = J.transpose() * J, G1 = Jh.transpose() * Jh;
            worst = std::max(worst, (G1 - G0).cwiseAbs().maxCoeff() / G0.cwiseAbs().maxCoeff());
        }
    return worst;
}

Eigen::MatrixXd point_cloud(const VecField& f) {
    const Grid2& g = f.grid;
    Mat P(static_cast<Eigen::Index>(g.Nu) * g.Nv, f.dim());
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) P.row(static_cast<Eigen::Index>(i) * g.Nv + j) = f.at(i, j).transpose();
    return P;
}

double diameter(const Eigen::MatrixXd& P) {
    double d2 = 0.0;
    for (Eigen::Index a = 0; a < P.rows(); ++a)
        d2 = std::max(d2, (P.bottomRows(P.rows() - a).rowwise() - P.row(a)).rowwise().squaredNorm().maxCoeff());
    return std::sqrt(d2);
}

Alignment procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols() || X.rows() == 0)
        throw Error(ErrorKind::size, "point clouds must have matching nonzero shapes");
    const Eigen::RowVectorXd mx = X.colwise().mean(), my = Y.colwise().mean();
    const Mat Xc = X.rowwise() - mx, Yc = Y.rowwise() - my;
    Eigen::JacobiSVD<Mat> svd(Yc.transpose() * Xc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Alignment al;
    al.R = svd.matrixU() * svd.matrixV().transpose();  // y R ~ x, reflections allowed
    al.shift = (mx - my * al.R).transpose();
    const Mat D = (Y * al.R).rowwise() + al.shift.transpose() - X;
    const Eigen::VectorXd dist = D.rowwise().norm();
    al.max_distance = dist.maxCoeff();
    al.rms_distance = std::sqrt(dist.squaredNorm() / static_cast<double>(dist.size()));
    al.diameter = diameter(X);
    return al;
}

Alignment congruence(const ImmersionChart& base, const ReconstructedChart& r) {
    return procrustes(point_cloud(base.Z), point_cloud(r.Z));
}

int affine_rank(const ReconstructedChart& r, double rank_tol) {
    const Grid2& g = r.grid;
    const int N = r.ambient_dim();
    const Eigen::Index nodes = static_cast<Eigen::Index>(g.Nu) * g.Nv;
    Mat rows(nodes * (r.n + 1), N);
    const Eigen::VectorXd z0 = r.Z.at(0, 0);
    Eigen::Index k = 0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            rows.row(k++) = (r.Z.at(i, j) - z0).transpose();
            for (int a = 0; a < r.n; ++a) rows.row(k++) = r.frame[static_cast<size_t>(a)].at(i, j).transpose();
        }
    return numerical_rank(rows, rank_tol);
}

}  // namespace hypsub
