#include "hypsub/intersection_type.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hypsub {

namespace {

Eigen::MatrixXd sample_rows(const std::function<Eigen::VectorXd(double)>& f, double a, double b, int n) {
    Eigen::MatrixXd M(n, f(a).size());
    for (int k = 0; k < n; ++k) M.row(k) = f(a + (b - a) * k / (n - 1)).transpose();
    return M;
}

std::string spectrum_str(const Eigen::VectorXd& rel) {
    std::string out = "relative spectrum:";
    char buf[32];
    for (int k = 0; k < std::min<int>(8, rel.size()); ++k) {
        std::snprintf(buf, sizeof buf, " %.3e", rel(k));
        out += buf;
    }
    return out;
}

}  // namespace

SharedDimension kernel_rank(const Eigen::MatrixXd& K, double rank_tol) {
    if (K.rows() == 0 || K.cols() == 0) throw Error(ErrorKind::size, "empty kernel matrix");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SharedDimension d;
    d.singular_values = svd.singularValues();
    const double smax = d.singular_values(0);
    if (smax == 0.0) return d;
    const Eigen::VectorXd rel = d.singular_values / smax;
    for (int k = 0; k < rel.size(); ++k) {
        if (rel(k) > rank_tol / 10 && rel(k) < 10 * rank_tol)
            throw Error(ErrorKind::ambiguous_rank, "singular value within a decade of the rank tolerance; " + spectrum_str(rel));
        if (rel(k) > rank_tol) ++d.I;
    }
    d.gap = d.I < rel.size() ? (rel(d.I) == 0 ? std::numeric_limits<double>::infinity() : rel(d.I - 1) / rel(d.I))
                             : std::numeric_limits<double>::infinity();
    d.factors_u = svd.matrixU().leftCols(d.I) * d.singular_values.head(d.I).asDiagonal();
    d.factors_v = svd.matrixV().leftCols(d.I);
    return d;
}

SharedDimension shared_dimension(const CurvePair& pair, const KernelWindow& w, double rank_tol) {
    if (w.n < 2 || !(w.u1 > w.u0) || !(w.v1 > w.v0)) throw Error(ErrorKind::size, "invalid kernel window");
    const Eigen::MatrixXd A1 = sample_rows(pair.alpha1.d1, w.u0, w.u1, w.n);
    const Eigen::MatrixXd A2 = sample_rows(pair.alpha2.d1, w.v0, w.v1, w.n);
    SharedDimension d = kernel_rank(A1 * A2.transpose(), rank_tol);
    if (d.I == 2) {
        // Project span{alpha1'} onto span{alpha2'}; its principal plane is the shared plane.
        Eigen::BDCSVD<Eigen::MatrixXd> s2(A2, Eigen::ComputeThinV);
        const int r2 = numerical_rank(A2, rank_tol);
        const Eigen::MatrixXd Q2 = s2.matrixV().leftCols(r2);
        const Eigen::MatrixXd proj = A1 * Q2 * Q2.transpose();
        Eigen::BDCSVD<Eigen::MatrixXd> sp(proj, Eigen::ComputeThinV);
        d.shared_plane = sp.matrixV().leftCols(2);
        d.proj_speed1 = (A1 * d.shared_plane).rowwise().squaredNorm();
        d.proj_speed2 = (A2 * d.shared_plane).rowwise().squaredNorm();
    }
    return d;
}

std::vector<int> windowed_shared_dimension(const CurvePair& pair, const KernelWindow& w, double rank_tol) {
    const double lu = 0.6 * (w.u1 - w.u0), lv = 0.6 * (w.v1 - w.v0);
    std::vector<int> out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            KernelWindow s = w;
            s.u0 = a == 0 ? w.u0 : w.u1 - lu;
            s.u1 = s.u0 + lu;
            s.v0 = b == 0 ? w.v0 : w.v1 - lv;
            s.v1 = s.v0 + lv;
            out.push_back(shared_dimension(pair, s, rank_tol).I);
        }
    return out;
}

std::string honest_verdict(int I) {
    if (I == 2) return "honestly deformable";
    if (I == 1) return "compositions only";
    return "honestly rigid";
}

DeformationPair intersection_family(const Primitives& P, const std::function<double(double)>& p1,
                                    const std::function<double(double)>& p2, double t) {
    if (t == 0.0) throw Error(ErrorKind::precondition, "family parameter t must be nonzero");
    char label[48];
    std::snprintf(label, sizeof label, "t=%.6g", t);
    return make_pair(
        P, [&](double u) { return 1.0 / (p1(u) / t - 1.0); }, [&](double v) { return 1.0 / (t * p2(v) - 1.0); },
        label);
}

Admissibility intersection_admissibility(const DeformationPair& pair, const SurfaceData& S) {
    const Grid2& g = S.grid();
    if (pair.grid() != g) throw Error(ErrorKind::size, "deformation pair built on a different window");
    Admissibility a;
    a.margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double U = pair.U_at(i), V = pair.V_at(j);
            const double c = std::cos(S.theta(i, j)), s = 1 - c * c;
            const double slack[3] = {U + 1 / s, V + 1 / s, (U + 1) * (V + 1) - c * c * U * V};
            for (int k = 0; k < 3; ++k) {
                a.margin = std::min(a.margin, slack[k]);
                if (a.ok && !(slack[k] > 0)) {
                    a.ok = false;
                    a.inequality = k + 1;
                    a.i = i;
                    a.j = j;
                }
            }
        }
    if (!a.ok) {
        static const char* names[3] = {"U > -1/s", "V > -1/s", "(U+1)(V+1) > cos^2 theta U V"};
        char buf[160];
        std::snprintf(buf, sizeof buf, "violates %s at node (%d,%d) at (u,v)=(%.6g,%.6g)", names[a.inequality - 1], a.i,
                      a.j, g.u(a.i), g.v(a.j));
        a.message = buf;
    }
    return a;
}

std::vector<double> default_t_sweep() {
    std::vector<double> ts;
    for (int k = 0; k < 16; ++k) ts.push_back(-std::pow(10.0, -1.0 + 2.0 * k / 15.0));
    ts.push_back(-1e3);
    ts.push_back(-1e-3);
    return ts;
}

BoundaryDatum boundary_datum(const SurfaceData& S, const PolarSurface& surface, double U, double V) {
    if (max_abs(surface.gamma_u) > 1e-9 || max_abs(surface.gamma_v) > 1e-9)
        throw Error(ErrorKind::precondition, "boundary data are defined for sum-of-curves polar surfaces");
    const Grid2& g = S.grid();
    BoundaryDatum b;
    b.U = U;
    b.V = V;
    b.label = U == 0.0 ? "t->0-" : "t->-inf";
    b.tau_u = ScalarField2(g);
    b.tau_v = ScalarField2(g);
    b.theta_hat = ScalarField2(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double c = std::cos(S.theta(i, j)), s = 1 - c * c;
            b.tau_u(i, j) = 1 + s * V;
            b.tau_v(i, j) = 1 + s * U;
            b.theta_hat(i, j) = c > 0 ? 0.0 : M_PI;
        }
    b.S_hat.theta = b.theta_hat;
    b.S_hat.lambda_u = map2(S.lambda_u, b.tau_u, [](double l, double t) { return l / t; });
    b.S_hat.lambda_v = map2(S.lambda_v, b.tau_v, [](double l, double t) { return l / t; });
    b.S_hat.kappa_u = map2(S.kappa_u, b.tau_u, [](double k, double t) { return k * t; });
    b.S_hat.kappa_v = map2(S.kappa_v, b.tau_v, [](double k, double t) { return k * t; });
    const DeformationPair p = make_pair(S, [&](double) { return U; }, [&](double) { return V; });
    b.flat_extension = flat_extension_branch(p, surface);
    return b;
}

ScalarField2 separable_phi_residual(const DeformationPair& pair, const SurfaceData& S) {
    const Grid2& g = S.grid();
    for (int i = 0; i < g.Nu; ++i)
        if (std::abs(pair.U_at(i)) < 1e-12 || std::abs(pair.U_at(i) + 1) < 1e-12)
            throw Error(ErrorKind::reparametrize_window, "U touches 0 or -1 on the window");
    for (int j = 0; j < g.Nv; ++j)
        if (std::abs(pair.V_at(j)) < 1e-12 || std::abs(pair.V_at(j) + 1) < 1e-12)
            throw Error(ErrorKind::reparametrize_window, "V touches 0 or -1 on the window");
    ScalarField2 phi(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double c = std::cos(S.theta(i, j));
            const double U = pair.U_at(i), V = pair.V_at(j);
            phi(i, j) = c * c * U / (U + 1) * V / (V + 1);
        }
    const ScalarField2 pu = fd_derivative(phi, Axis::u, 1, 4), pv = fd_derivative(phi, Axis::v, 1, 4);
    const ScalarField2 puv = fd_mixed(phi, 4);
    ScalarField2 r(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double f = phi(i, j);
            r(i, j) = 2 * f * (1 - f) * puv(i, j) + (2 * f - 1) * pu(i, j) * pv(i, j);
        }
    return r;
}

IntersectionModuli intersection_moduli(const SurfaceData& S, const PolarSurface& surface,
                                       const std::function<double(double)>& p1,
                                       const std::function<double(double)>& p2, const std::vector<double>& ts) {
    IntersectionModuli out;
    out.t_samples = ts;
    const Primitives P = primitives(S);
    out.all_members = out.all_honest = true;
    for (double t : ts) {
        FamilyMember m;
        m.t = t;
        m.probe = std::abs(t) > 10 || std::abs(t) < 0.1;
        const DeformationPair pair = intersection_family(P, p1, p2, t);
        m.admissibility = intersection_admissibility(pair, S);
        m.admissible = m.admissibility.ok;
        if (m.admissible) {
            const ModuliResidual mr = moduli_residual(pair, S);
            m.moduli_residual = mr.max_abs;
            m.tol_mod = mr.tol;
            m.member = mr.member;
            if (m.member) {
                const ClassificationReport cr = classify(pair, S, surface);
                m.genuineness = cr.genuineness;
                m.honest = cr.honest;
            }
            try {
                m.phi_residual = max_abs(separable_phi_residual(pair, S));
            } catch (const Error&) {
                m.phi_residual = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (t < 0 && !m.probe) {
            out.all_members = out.all_members && m.member;
            out.all_honest = out.all_honest && m.honest;
        }
        out.members.push_back(m);
    }
    out.boundary.push_back(boundary_datum(S, surface, 0.0, -1.0));
    out.boundary.push_back(boundary_datum(S, surface, -1.0, 0.0));
    return out;
}

LatticeScan lattice_scan(const SurfaceData& S, const std::vector<double>& values, const std::vector<double>& slopes,
                         double tol) {
    const Primitives P = primitives(S);
    const Grid2& g = S.grid();
    LatticeScan scan;
    scan.min_nontrivial_residual = std::numeric_limits<double>::infinity();
    for (double a0 : values)
        for (double a1 : slopes)
            for (double b0 : values)
                for (double b1 : slopes) {
                    const bool u_zero = a0 == 0 && a1 == 0, v_zero = b0 == 0 && b1 == 0;
                    if (u_zero && v_zero) continue;
                    const DeformationPair p = make_pair(
                        P, [&](double u) { return a0 + a1 * (u - g.u0); }, [&](double v) { return b0 + b1 * (v - g.v0); });
                    if (!check_admissibility(p, S).ok) continue;
                    ModuliResidual mr;
                    try {
                        mr = moduli_residual(p, S);
                    } catch (const Error&) {
                        continue;
                    }
                    scan.tol = tol > 0 ? tol : 1e-2 * mr.tol;
                    LatticeHit h{a0, a1, b0, b1, mr.max_abs, mr.max_abs <= scan.tol, u_zero || v_zero};
                    if (h.composition_branch)
                        scan.max_branch_residual = std::max(scan.max_branch_residual, h.residual);
                    else
                        scan.min_nontrivial_residual = std::min(scan.min_nontrivial_residual, h.residual);
                    scan.members += h.member;
                    scan.nontrivial_members += h.member && !h.composition_branch;
                    scan.hits.push_back(h);
                }
    return scan;
}

}  // namespace hypsub
