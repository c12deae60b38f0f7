#include "hypsub/immersion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace hypsub {

namespace {

double poly(const Eigen::Vector3d& c, double x) { return x * (c(0) + x * (c(1) + x * c(2))); }
double dpoly(const Eigen::Vector3d& c, double x) { return c(0) + x * (2 * c(1) + 3 * x * c(2)); }
double ddpoly(const Eigen::Vector3d& c, double x) { return 2 * c(1) + 6 * x * c(2); }

Eigen::Matrix2d metric_at(const PolarSurface& S, int i, int j) {
    Eigen::Matrix2d m;
    m << S.E(i, j), S.F(i, j), S.F(i, j), S.G(i, j);
    return m;
}

}  // namespace

RhoData rho_separable(const Grid2& g, const RhoSpec& spec) {
    RhoData r;
    r.rho = sample(g, [&](double u, double v) { return poly(spec.pu, u) + poly(spec.pv, v); });
    r.rho_u = sample(g, [&](double u, double) { return dpoly(spec.pu, u); });
    r.rho_v = sample(g, [&](double, double v) { return dpoly(spec.pv, v); });
    r.rho_uu = sample(g, [&](double u, double) { return ddpoly(spec.pu, u); });
    r.rho_vv = sample(g, [&](double, double v) { return ddpoly(spec.pv, v); });
    r.rho_uv = ScalarField2(g);
    r.description = "separable cubic";
    return r;
}

RhoData rho_wave(const PolarSurface& S, const RhoSpec& spec) {
    const Grid2& g = S.grid;
    if (!S.gamma_u_fn || !S.gamma_v_fn) throw Error(ErrorKind::precondition, "surface carries no Christoffel functions");
    const auto traces = [&spec](const Grid2& gr) {
        Eigen::MatrixXd bu(gr.Nu, 1), bv(gr.Nv, 1);
        for (int i = 0; i < gr.Nu; ++i) bu(i, 0) = poly(spec.pu, gr.u(i)) + poly(spec.pv, gr.v0);
        for (int j = 0; j < gr.Nv; ++j) bv(j, 0) = poly(spec.pu, gr.u0) + poly(spec.pv, gr.v(j));
        return std::make_pair(bu, bv);
    };
    RhoData r;
    r.rho = goursat_march_extrapolated(S.gamma_u_fn, S.gamma_v_fn, g, traces).component(0);
    r.rho_u = fd_derivative(r.rho, Axis::u, 1, 4);
    r.rho_v = fd_derivative(r.rho, Axis::v, 1, 4);
    r.rho_uu = fd_derivative(r.rho, Axis::u, 2, 4);
    r.rho_vv = fd_derivative(r.rho, Axis::v, 2, 4);
    r.rho_uv = fd_mixed(r.rho, 4);
    r.description = "marched from cubic traces";
    return r;
}

RhoData default_rho(const PolarSurface& S, const RhoSpec& spec) {
    return S.kind == SeedKind::wave_solutions ? rho_wave(S, spec) : rho_separable(S.grid, spec);
}

EtaSolution solve_eta_rho(const PolarSurface& S, const RhoData& rho) {
    const Grid2& g = S.grid;
    const int N = S.ambient_dim;
    EtaSolution out;
    out.eta_rho = VecField(g, N);
    out.grad_rho = VecField(g, N);
    out.n1 = VecField(g, N);
    out.n2 = VecField(g, N);
    double hres = 0.0, wres = 0.0;
    Eigen::MatrixXd T(N, 2);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            T << S.gu.at(i, j), S.gv.at(i, j);
            const Eigen::Matrix2d Ginv = metric_at(S, i, j).inverse();
            const Eigen::VectorXd guu = S.guu.at(i, j), gvv = S.gvv.at(i, j), guv = S.guv.at(i, j);
            const auto normal_part = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
                return x - T * (Ginv * (T.transpose() * x));
            };
            const Eigen::VectorXd n1 = normal_part(guu), n2 = normal_part(gvv), n12 = normal_part(guv);
            const Eigen::VectorXd grad = T * (Ginv * Eigen::Vector2d(rho.rho_u(i, j), rho.rho_v(i, j)));
            const double Huu = rho.rho_uu(i, j) - grad.dot(guu);
            const double Hvv = rho.rho_vv(i, j) - grad.dot(gvv);
            const double Huv = rho.rho_uv(i, j) - grad.dot(guv);
            Eigen::Matrix2d A;
            A << n1.dot(n1), n1.dot(n2), n2.dot(n1), n2.dot(n2);
            if (A.determinant() <= 1e-12 * A(0, 0) * A(1, 1))
                throw Error(ErrorKind::degeneracy, "normal parts of g_uu, g_vv are dependent at node (" +
                                                       std::to_string(i) + "," + std::to_string(j) + ")");
            const Eigen::Vector2d xy = A.ldlt().solve(Eigen::Vector2d(Huu, Hvv));
            const Eigen::VectorXd eta = xy(0) * n1 + xy(1) * n2;
            out.eta_rho.set(i, j, eta);
            out.grad_rho.set(i, j, grad);
            out.n1.set(i, j, n1);
            out.n2.set(i, j, n2);
            hres = std::max({hres, std::abs(eta.dot(guu) - Huu), std::abs(eta.dot(gvv) - Hvv),
                             std::abs(eta.dot(n12) - Huv)});
            wres = std::max(wres, std::abs(rho.rho_uv(i, j) - S.gamma_u(i, j) * rho.rho_u(i, j) -
                                           S.gamma_v(i, j) * rho.rho_v(i, j)));
        }
    out.hessian_residual = hres;
    out.wave_residual = wres;
    return out;
}

ImmersionChart build_chart(PolarSurfacePtr surface, const RhoData& rho, double t_extent) {
    const PolarSurface& S = *surface;
    const Grid2& g = S.grid;
    const int N = S.ambient_dim;
    if (N < 5) throw Error(ErrorKind::size, "immersion needs ambient dimension >= 5");
    ImmersionChart c;
    c.surface = surface;
    c.rho = rho;
    c.t_extent = t_extent;
    c.eta = solve_eta_rho(S, rho);
    c.Z = VecField(g, N);
    for (int k = 0; k < N; ++k) c.Z.comp[k] = c.eta.grad_rho.comp[k] + c.eta.eta_rho.comp[k];

    // Fixed ambient directions chosen at the anchor, projected at every node.
    Eigen::MatrixXd M0(N, 4);
    M0 << S.gu.at(0, 0), S.gv.at(0, 0), c.eta.n1.at(0, 0), c.eta.n2.at(0, 0);
    const Eigen::MatrixXd C0 = orthogonal_complement(M0);
    const int m = N - 4;
    c.rulings.assign(m, VecField(g, N));
    Eigen::MatrixXd cols(N, N);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            cols << S.gu.at(i, j), S.gv.at(i, j), c.eta.n1.at(i, j), c.eta.n2.at(i, j), C0;
            const Eigen::MatrixXd q = gram_schmidt(cols, 1e-8);
            if (q.cols() != N)
                throw Error(ErrorKind::degeneracy, "ruling frame lost rank at node (" + std::to_string(i) + "," +
                                                       std::to_string(j) + ")");
            for (int k = 0; k < m; ++k) c.rulings[k].set(i, j, q.col(4 + k));
        }
    c.Z_u = fd_derivative(c.Z, Axis::u, 1, 4);
    c.Z_v = fd_derivative(c.Z, Axis::v, 1, 4);
    for (int k = 0; k < m; ++k) {
        c.rulings_u.push_back(fd_derivative(c.rulings[k], Axis::u, 1, 4));
        c.rulings_v.push_back(fd_derivative(c.rulings[k], Axis::v, 1, 4));
    }
    return c;
}

Eigen::MatrixXd psi_jacobian(const ImmersionChart& c, double u, double v, const Eigen::VectorXd& t) {
    const int m = c.n() - 2;
    if (t.size() != m) throw Error(ErrorKind::size, "ruling parameter has wrong dimension");
    Eigen::MatrixXd J(c.ambient_dim(), c.n());
    Eigen::VectorXd pu = interp2(c.Z_u, u, v), pv = interp2(c.Z_v, u, v);
    for (int k = 0; k < m; ++k) {
        pu += t(k) * interp2(c.rulings_u[k], u, v);
        pv += t(k) * interp2(c.rulings_v[k], u, v);
        J.col(2 + k) = interp2(c.rulings[k], u, v);
    }
    J.col(0) = pu;
    J.col(1) = pv;
    return J;
}

double relative_gram_det(const Eigen::MatrixXd& J) {
    const Eigen::MatrixXd Gm = J.transpose() * J;
    return Gm.determinant() / Gm.diagonal().prod();
}

Eigen::VectorXd evaluate_psi(const ImmersionChart& c, double u, double v, const Eigen::VectorXd& t) {
    const Grid2& g = c.grid();
    const double eps = 1e-12;
    if (u < g.u0 - eps || u > g.u_end() + eps || v < g.v0 - eps || v > g.v_end() + eps)
        throw Error(ErrorKind::precondition, "(u,v) outside the grid box");
    if (t.size() != c.n() - 2) throw Error(ErrorKind::size, "ruling parameter has wrong dimension");
    if (t.cwiseAbs().maxCoeff() > c.t_extent * (1 + 1e-12))
        throw Error(ErrorKind::precondition, "ruling parameter outside t_extent");
    const double det = relative_gram_det(psi_jacobian(c, u, v, t));
    if (!(det > 1e-10)) throw Error(ErrorKind::regularity, "Gram determinant " + std::to_string(det));
    Eigen::VectorXd p = interp2(c.Z, u, v);
    for (int k = 0; k < t.size(); ++k) p += t(k) * interp2(c.rulings[k], u, v);
    return p;
}

double normal_space_defect(const ImmersionChart& c, double u, double v, const Eigen::VectorXd& t) {
    const Eigen::MatrixXd J = psi_jacobian(c, u, v, t);
    if (!(relative_gram_det(J) > 1e-10)) throw Error(ErrorKind::regularity, "sample point is not regular");
    Eigen::MatrixXd gg(c.ambient_dim(), 2);
    gg.col(0) = interp2(c.surface->gu, u, v);
    gg.col(1) = interp2(c.surface->gv, u, v);
    return max_principal_angle(orthogonal_complement(J), gram_schmidt(gg));
}

DualityCheck duality_check(const ImmersionChart& c, int points, unsigned long long seed) {
    const Grid2& g = c.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(g.u0, g.u_end()), V(g.v0, g.v_end()), T(-c.t_extent, c.t_extent);
    DualityCheck d;
    while (d.points < points) {
        const double u = U(rng), v = V(rng);
        Eigen::VectorXd t(c.n() - 2);
        for (int k = 0; k < t.size(); ++k) t(k) = T(rng);
        try {
            d.max_defect = std::max(d.max_defect, normal_space_defect(c, u, v, t));
            ++d.points;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::regularity || ++d.skipped > 10 * points) throw;
        }
    }
    return d;
}

Eigen::MatrixXd coordinate_frame(const ImmersionChart& c, int i, int j) {
    const int n = c.n();
    Eigen::MatrixXd J(c.ambient_dim(), n);
    J.col(0) = c.Z_u.at(i, j);
    J.col(1) = c.Z_v.at(i, j);
    for (int k = 0; k < n - 2; ++k) J.col(2 + k) = c.rulings[k].at(i, j);
    return J;
}

Eigen::MatrixXd tangent_frame(const ImmersionChart& c, int i, int j) {
    const int n = c.n();
    Eigen::MatrixXd cols(c.ambient_dim(), n);
    for (int k = 0; k < n - 2; ++k) cols.col(k) = c.rulings[k].at(i, j);
    cols.col(n - 2) = c.Z_u.at(i, j);
    cols.col(n - 1) = c.Z_v.at(i, j);
    const Eigen::MatrixXd q = gram_schmidt(cols, 1e-10);
    if (q.cols() != n)
        throw Error(ErrorKind::regularity,
                    "cross-section singular at node (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return q;
}

ImmersionAnalysis analyze(const ImmersionChart& c, double hyperbolicity_tol) {
    const PolarSurface& S = *c.surface;
    const Grid2& g = S.grid;
    const int N = S.ambient_dim, n = c.n(), m = n - 2;
    const VecField Zuu = fd_derivative(c.Z, Axis::u, 2, 4);
    const VecField Zvv = fd_derivative(c.Z, Axis::v, 2, 4);
    const VecField Zuv = fd_mixed(c.Z, 4);

    ImmersionAnalysis an;
    an.xi1 = VecField(g, N);
    an.xi2 = VecField(g, N);
    for (ScalarField2* f : {&an.theta, &an.lambda1, &an.lambda2, &an.omega, &an.scal_frame, &an.scal_formula,
                            &an.psi1_u, &an.psi1_v, &an.psi2_u, &an.psi2_v})
        *f = ScalarField2(g);
    an.B1.resize(static_cast<size_t>(g.Nu) * g.Nv);
    an.B2.resize(an.B1.size());
    std::vector<double> tr1(an.B1.size()), tr2(an.B1.size());
    std::vector<Eigen::VectorXd> Y1(an.B1.size()), Y2(an.B1.size());
    an.min_gram_det = 1.0;

    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const size_t id = static_cast<size_t>(i) * g.Nv + j;
            const double E = S.E(i, j), G = S.G(i, j);
            const Eigen::VectorXd gu = S.gu.at(i, j), gv = S.gv.at(i, j);
            const Eigen::VectorXd guu = S.guu.at(i, j), guv = S.guv.at(i, j), gvv = S.gvv.at(i, j);
            // xi1 = gv/sqrt(G), xi2 = gu/sqrt(E) and their coordinate derivatives
            const double rG = std::sqrt(G), rE = std::sqrt(E);
            const Eigen::VectorXd d1[2] = {guv / rG - gv * S.G_u(i, j) / (2 * G * rG),
                                           gvv / rG - gv * S.G_v(i, j) / (2 * G * rG)};
            const Eigen::VectorXd d2[2] = {guu / rE - gu * S.E_u(i, j) / (2 * E * rE),
                                           guv / rE - gu * S.E_v(i, j) / (2 * E * rE)};
            const Eigen::MatrixXd J = coordinate_frame(c, i, j);
            an.min_gram_det = std::min(an.min_gram_det, relative_gram_det(J));
            const Eigen::MatrixXd Et = tangent_frame(c, i, j);
            const Eigen::MatrixXd P = (J.transpose() * J).ldlt().solve(J.transpose() * Et);

            double lam_scale = 0.0;
            const auto shape = [&](const Eigen::VectorXd* d, double& nullity) {
                Eigen::MatrixXd Bc = Eigen::MatrixXd::Zero(n, n);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < 2; ++b) Bc(a, b) = -J.col(a).dot(d[b]);
                for (int a = 2; a < n; ++a) nullity = std::max(nullity, Bc.row(a).cwiseAbs().maxCoeff());
                const Eigen::MatrixXd sym = 0.5 * (Bc + Bc.transpose());
                return Eigen::MatrixXd(P.transpose() * sym * P);
            };
            double null1 = 0.0, null2 = 0.0;
            const Eigen::MatrixXd B1 = shape(d1, null1), B2 = shape(d2, null2);
            const auto block = [&](const Eigen::MatrixXd& B, double& trace, Eigen::VectorXd& Y) {
                const Eigen::Matrix2d Mb = B.block(m, m, 2, 2);
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Mb);
                const Eigen::Vector2d ev = es.eigenvalues();
                const int big = std::abs(ev(0)) > std::abs(ev(1)) ? 0 : 1;
                const double ratio = std::abs(ev(1 - big)) / std::abs(ev(big));
                an.rank_one_residual = std::max(an.rank_one_residual, ratio);
                if (!(ratio <= hyperbolicity_tol))
                    throw Error(ErrorKind::hyperbolicity_violation,
                                "shape operator not of rank one on the nullity complement at node (" +
                                    std::to_string(i) + "," + std::to_string(j) + "), eigenvalue ratio " +
                                    std::to_string(ratio));
                trace = Mb.trace();
                Y = Et.middleCols(m, 2) * es.eigenvectors().col(1 - big);
                lam_scale = std::max(lam_scale, std::abs(trace));
            };
            block(B1, tr1[id], Y1[id]);
            block(B2, tr2[id], Y2[id]);
            an.nullity_residual = std::max(an.nullity_residual, std::max(null1, null2) / lam_scale);
            an.B1[id] = B1;
            an.B2[id] = B2;
            an.xi1.set(i, j, gv / rG);
            an.xi2.set(i, j, gu / rE);

            // Gauss equation over an orthonormal tangent basis, second derivatives by differences.
            Eigen::MatrixXd Q(N, 2);
            Q << gu, gv;
            Q = gram_schmidt(Q);
            std::vector<Eigen::VectorXd> H(static_cast<size_t>(n) * n, Eigen::VectorXd::Zero(N));
            const auto at = [&](int a, int b) -> Eigen::VectorXd& { return H[static_cast<size_t>(a) * n + b]; };
            at(0, 0) = Zuu.at(i, j);
            at(1, 1) = Zvv.at(i, j);
            at(0, 1) = at(1, 0) = Zuv.at(i, j);
            for (int k = 0; k < m; ++k) {
                at(0, 2 + k) = at(2 + k, 0) = c.rulings_u[k].at(i, j);
                at(1, 2 + k) = at(2 + k, 1) = c.rulings_v[k].at(i, j);
            }
            std::vector<Eigen::Vector2d> h(H.size());
            for (size_t k = 0; k < H.size(); ++k) h[k] = Q.transpose() * H[k];
            const auto alpha = [&](int a, int b) {
                Eigen::Vector2d s = Eigen::Vector2d::Zero();
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) s += P(p, a) * P(q, b) * h[static_cast<size_t>(p) * n + q];
                return s;
            };
            double scal = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) scal += alpha(a, a).dot(alpha(b, b)) - alpha(a, b).squaredNorm();
            an.scal_frame(i, j) = scal;
        }

    const size_t id0 = 0;
    an.sign1 = tr1[id0] >= 0 ? 1 : -1;
    an.sign2 = tr2[id0] >= 0 ? 1 : -1;
    double max_formula = 0.0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const size_t id = static_cast<size_t>(i) * g.Nv + j;
            if (tr1[id] * an.sign1 <= 0 || tr2[id] * an.sign2 <= 0)
                throw Error(ErrorKind::hyperbolicity_violation,
                            "principal curvature changes sign at node (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
            an.lambda1(i, j) = std::abs(tr1[id]);
            an.lambda2(i, j) = std::abs(tr2[id]);
            an.B1[id] *= an.sign1;
            an.B2[id] *= an.sign2;
            const Eigen::VectorXd x1 = an.sign1 * an.xi1.at(i, j), x2 = an.sign2 * an.xi2.at(i, j);
            an.xi1.set(i, j, x1);
            an.xi2.set(i, j, x2);
            const double cf = an.sign1 * an.sign2 * S.F(i, j) / std::sqrt(S.E(i, j) * S.G(i, j));
            an.theta(i, j) = std::acos(std::clamp(cf, -1.0, 1.0));
            an.cos_theta_residual = std::max(an.cos_theta_residual, std::abs(x1.dot(x2) - cf));
            const double cw = std::abs(Y1[id].dot(Y2[id])) / (Y1[id].norm() * Y2[id].norm());
            an.omega(i, j) = std::acos(std::min(1.0, cw));
            const double sw2 = 1 - cw * cw, st2 = 1 - cf * cf;
            an.scal_formula(i, j) = -sw2 * cf / st2 * an.lambda1(i, j) * an.lambda2(i, j);
            max_formula = std::max(max_formula, std::abs(an.scal_formula(i, j)));

            // Normal connection of the sign-fixed normals: psi^i = <d xi_i, eta_i>.
            const double E = S.E(i, j), G = S.G(i, j), rG = std::sqrt(G), rE = std::sqrt(E);
            const Eigen::VectorXd gu = S.gu.at(i, j), gv = S.gv.at(i, j);
            const Eigen::VectorXd guu = S.guu.at(i, j), guv = S.guv.at(i, j), gvv = S.gvv.at(i, j);
            const double sn = std::sqrt(st2);
            const Eigen::VectorXd e1 = (x2 - cf * x1) / sn, e2 = (cf * x2 - x1) / sn;
            const Eigen::VectorXd dx1u = an.sign1 * (guv / rG - gv * S.G_u(i, j) / (2 * G * rG));
            const Eigen::VectorXd dx1v = an.sign1 * (gvv / rG - gv * S.G_v(i, j) / (2 * G * rG));
            const Eigen::VectorXd dx2u = an.sign2 * (guu / rE - gu * S.E_u(i, j) / (2 * E * rE));
            const Eigen::VectorXd dx2v = an.sign2 * (guv / rE - gu * S.E_v(i, j) / (2 * E * rE));
            an.psi1_u(i, j) = dx1u.dot(e1);
            an.psi1_v(i, j) = dx1v.dot(e1);
            an.psi2_u(i, j) = dx2u.dot(e2);
            an.psi2_v(i, j) = dx2v.dot(e2);
        }
    double diff = 0.0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) diff = std::max(diff, std::abs(an.scal_frame(i, j) - an.scal_formula(i, j)));
    an.gauss_residual = max_formula > 1e-12 ? diff / max_formula : diff;
    return an;
}

SurfaceData surface_data(const ImmersionChart& c, const ImmersionAnalysis& an) {
    const PolarSurface& S = *c.surface;
    SurfaceData d;
    d.theta = an.theta;
    d.lambda_u = S.lambda_u;
    d.lambda_v = S.lambda_v;
    d.kappa_u = ScalarField2(S.grid);
    d.kappa_v = ScalarField2(S.grid);
    d.kappa_u.values = an.lambda1.values.array().square() / S.s.values.array();
    d.kappa_v.values = an.lambda2.values.array().square() / S.s.values.array();
    return d;
}

}  // namespace hypsub
