#include "hypsub/polar_surface.hpp"

#include <cmath>
#include <sstream>

namespace hypsub {

const char* to_string(SeedKind k) {
    switch (k) {
        case SeedKind::wave_solutions: return "wave_solutions";
        case SeedKind::sum_of_curves: return "sum_of_curves";
        case SeedKind::separable_angle: return "separable_angle";
    }
    return "unknown";
}

namespace {

std::string node_str(const Grid2& g, int i, int j) {
    std::ostringstream os;
    os << "node (" << i << "," << j << ") at (u,v)=(" << g.u(i) << "," << g.v(j) << ")";
    return os.str();
}

void fill_from_curves(PolarSurface& S, const CurvePair& c) {
    const Grid2& g = S.grid;
    const int N = S.ambient_dim;
    const Eigen::MatrixXd p1 = c.alpha1.sample_positions(g.u0, g.du, g.Nu);
    const Eigen::MatrixXd p2 = c.alpha2.sample_positions(g.v0, g.dv, g.Nv);
    for (VecField* f : {&S.g, &S.gu, &S.gv, &S.guu, &S.guv, &S.gvv}) *f = VecField(g, N);
    std::vector<Eigen::VectorXd> d1u(g.Nu), d2u(g.Nu), d1v(g.Nv), d2v(g.Nv);
    for (int i = 0; i < g.Nu; ++i) {
        d1u[i] = c.alpha1.d1(g.u(i));
        d2u[i] = c.alpha1.d2(g.u(i));
    }
    for (int j = 0; j < g.Nv; ++j) {
        d1v[j] = c.alpha2.d1(g.v(j));
        d2v[j] = c.alpha2.d2(g.v(j));
    }
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j)
            for (int k = 0; k < N; ++k) {
                S.g.comp[k](i, j) = p1(i, k) + p2(j, k);
                S.gu.comp[k](i, j) = d1u[i](k);
                S.guu.comp[k](i, j) = d2u[i](k);
                S.gv.comp[k](i, j) = d1v[j](k);
                S.gvv.comp[k](i, j) = d2v[j](k);
            }
    S.gamma_u = ScalarField2(g);
    S.gamma_v = ScalarField2(g);
}

void fill_from_wave(PolarSurface& S, const SeedFamily& seed) {
    const Grid2& g = S.grid;
    if (!seed.gamma_u || !seed.gamma_v) throw Error(ErrorKind::config, "wave seed needs both Christoffel functions");
    S.gamma_u = sample(g, seed.gamma_u);
    S.gamma_v = sample(g, seed.gamma_v);
    S.gamma_u_fn = seed.gamma_u;
    S.gamma_v_fn = seed.gamma_v;
    const CurvePair& c = seed.curves;
    S.g = goursat_march_extrapolated(seed.gamma_u, seed.gamma_v, g, [&c](const Grid2& gr) {
        const Eigen::MatrixXd p1 = c.alpha1.sample_positions(gr.u0, gr.du, gr.Nu);
        const Eigen::MatrixXd p2 = c.alpha2.sample_positions(gr.v0, gr.dv, gr.Nv);
        return std::make_pair(Eigen::MatrixXd(p1.rowwise() + p2.row(0)), Eigen::MatrixXd(p2.rowwise() + p1.row(0)));
    });
    S.gu = fd_derivative(S.g, Axis::u, 1, 4);
    S.gv = fd_derivative(S.g, Axis::v, 1, 4);
    S.guu = fd_derivative(S.g, Axis::u, 2, 4);
    S.gvv = fd_derivative(S.g, Axis::v, 2, 4);
    S.guv = fd_mixed(S.g, 4);
}

}  // namespace

double conjugacy_residual(const VecField& g, const ScalarField2& gamma_u, const ScalarField2& gamma_v) {
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(g.grid.Nu, g.grid.Nv);
    for (int k = 0; k < g.dim(); ++k)
        sq.array() += wave_residual(g.component(k), gamma_u, gamma_v).values.array().square();
    return std::sqrt(sq.block(1, 1, g.grid.Nu - 2, g.grid.Nv - 2).maxCoeff());
}

PolarSurface build_polar(const SeedFamily& seed, const Grid2& grid, int N, const BuildOptions& opt) {
    validate_grid(grid);
    if (seed.curves.dim() != N)
        throw Error(ErrorKind::size, "seed curves live in R^" + std::to_string(seed.curves.dim()) +
                                         ", requested ambient dimension " + std::to_string(N));
    PolarSurface S;
    S.grid = grid;
    S.ambient_dim = N;
    S.kind = seed.kind;
    if (seed.kind == SeedKind::wave_solutions)
        fill_from_wave(S, seed);
    else
        fill_from_curves(S, seed.curves);

    S.E = dot(S.gu, S.gu);
    S.F = dot(S.gu, S.gv);
    S.G = dot(S.gv, S.gv);
    const auto lin = [](const ScalarField2& a, double ca, const ScalarField2& b, double cb) {
        ScalarField2 out(a.grid);
        out.values = ca * a.values + cb * b.values;
        return out;
    };
    S.E_u = lin(dot(S.gu, S.guu), 2.0, S.E, 0.0);
    S.E_v = lin(dot(S.gu, S.guv), 2.0, S.E, 0.0);
    S.F_u = lin(dot(S.guu, S.gv), 1.0, dot(S.gu, S.guv), 1.0);
    S.F_v = lin(dot(S.guv, S.gv), 1.0, dot(S.gu, S.gvv), 1.0);
    S.G_u = lin(dot(S.gv, S.guv), 2.0, S.G, 0.0);
    S.G_v = lin(dot(S.gv, S.gvv), 2.0, S.G, 0.0);

    double min_sv = 1.0, min_abs_cos = 1.0, max_abs_cos = 0.0;
    Eigen::MatrixXd M(N, 4);
    for (int i = 0; i < grid.Nu; ++i)
        for (int j = 0; j < grid.Nv; ++j) {
            const double E = S.E(i, j), F = S.F(i, j), G = S.G(i, j);
            if (!(E > 0) || !(G > 0) || !(E * G - F * F > 0))
                throw Error(ErrorKind::degenerate_seed, "metric not positive definite at " + node_str(grid, i, j));
            M << S.gu.at(i, j), S.gv.at(i, j), S.guu.at(i, j), S.gvv.at(i, j);
            const Eigen::VectorXd sv = singular_values(M);
            if (numerical_rank(M, opt.rank_tol) < 4)
                throw Error(ErrorKind::degenerate_seed,
                            "g_u, g_v, g_uu, g_vv dependent at " + node_str(grid, i, j));
            min_sv = std::min(min_sv, sv(3) / sv(0));
            const double c = std::abs(F) / std::sqrt(E * G);
            min_abs_cos = std::min(min_abs_cos, c);
            max_abs_cos = std::max(max_abs_cos, c);
        }
    S.min_independence_sv = min_sv;
    S.nowhere_flat = min_abs_cos > opt.flat_tol;
    S.flat = max_abs_cos <= opt.flat_tol;
    if (opt.require_nowhere_flat && !S.nowhere_flat)
        throw Error(ErrorKind::flatness, "F vanishes somewhere on the window (min |cos theta| = " +
                                             std::to_string(min_abs_cos) + ")");

    S.theta = ScalarField2(grid);
    for (int i = 0; i < grid.Nu; ++i)
        for (int j = 0; j < grid.Nv; ++j)
            S.theta(i, j) = std::acos(std::clamp(S.F(i, j) / std::sqrt(S.E(i, j) * S.G(i, j)), -1.0, 1.0));
    main_symbols(S);
    S.conjugacy_residual = conjugacy_residual(S.g, S.gamma_u, S.gamma_v);
    return S;
}

MainSymbols main_symbols(PolarSurface& S) {
    const Grid2& g = S.grid;
    S.s = ScalarField2(g);
    S.s_u = ScalarField2(g);
    S.s_v = ScalarField2(g);
    S.lambda_u = ScalarField2(g);
    S.lambda_v = ScalarField2(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double E = S.E(i, j), F = S.F(i, j), G = S.G(i, j);
            const double EG = E * G;
            const double s = 1.0 - F * F / EG;
            if (!(s > 1e-12))
                throw Error(ErrorKind::degenerate_angle, "sin^2(theta) = " + std::to_string(s) + " at " + node_str(g, i, j));
            // s = 1 - F^2/(EG)
            const double su = -(2 * F * S.F_u(i, j) * EG - F * F * (S.E_u(i, j) * G + E * S.G_u(i, j))) / (EG * EG);
            const double sv = -(2 * F * S.F_v(i, j) * EG - F * F * (S.E_v(i, j) * G + E * S.G_v(i, j))) / (EG * EG);
            S.s(i, j) = s;
            S.s_u(i, j) = su;
            S.s_v(i, j) = sv;
            S.lambda_u(i, j) = F / G * S.gamma_u(i, j) + su / (2 * s);
            S.lambda_v(i, j) = F / E * S.gamma_v(i, j) + sv / (2 * s);
        }
    return {S.lambda_u, S.lambda_v, S.s};
}

NormalConnection normal_connection_forms(const PolarSurface& S) {
    const Grid2& g = S.grid;
    NormalConnection nc;
    for (ScalarField2* f : {&nc.psi1_u, &nc.psi1_v, &nc.psi2_u, &nc.psi2_v}) *f = ScalarField2(g);
    double resid = 0.0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double E = S.E(i, j), F = S.F(i, j), G = S.G(i, j), EG = E * G;
            const double sn = std::sin(S.theta(i, j)), cs = std::cos(S.theta(i, j));
            const double c_u = S.F_u(i, j) / std::sqrt(EG) - F * (S.E_u(i, j) * G + E * S.G_u(i, j)) / (2 * EG * std::sqrt(EG));
            const double c_v = S.F_v(i, j) / std::sqrt(EG) - F * (S.E_v(i, j) * G + E * S.G_v(i, j)) / (2 * EG * std::sqrt(EG));
            const double th_u = -c_u / sn, th_v = -c_v / sn;
            nc.psi1_u(i, j) = sn * std::sqrt(E / G) * S.gamma_u(i, j);
            nc.psi2_v(i, j) = -sn * std::sqrt(G / E) * S.gamma_v(i, j);
            nc.psi2_u(i, j) = nc.psi1_u(i, j) + th_u;
            nc.psi1_v(i, j) = nc.psi2_v(i, j) - th_v;
            if (std::abs(cs) < 1e-6) continue;
            const double tn = sn / cs;
            resid = std::max(resid, std::abs(nc.psi2_u(i, j) / tn - S.lambda_u(i, j)));
            resid = std::max(resid, std::abs(-nc.psi1_v(i, j) / tn - S.lambda_v(i, j)));
        }
    nc.consistency_residual = resid;
    return nc;
}

ScalarField2 brioschi_curvature(const ScalarField2& E, const ScalarField2& F, const ScalarField2& G) {
    const auto d = [](const ScalarField2& f, Axis a, int o) { return fd_derivative(f, a, o, 4); };
    const ScalarField2 Eu = d(E, Axis::u, 1), Ev = d(E, Axis::v, 1), Evv = d(E, Axis::v, 2);
    const ScalarField2 Fu = d(F, Axis::u, 1), Fv = d(F, Axis::v, 1), Fuv = fd_mixed(F, 4);
    const ScalarField2 Gu = d(G, Axis::u, 1), Gv = d(G, Axis::v, 1), Guu = d(G, Axis::u, 2);
    ScalarField2 K(E.grid);
    for (int i = 0; i < E.grid.Nu; ++i)
        for (int j = 0; j < E.grid.Nv; ++j) {
            Eigen::Matrix3d m1, m2;
            m1 << -0.5 * Evv(i, j) + Fuv(i, j) - 0.5 * Guu(i, j), 0.5 * Eu(i, j), Fu(i, j) - 0.5 * Ev(i, j),
                Fv(i, j) - 0.5 * Gu(i, j), E(i, j), F(i, j), 0.5 * Gv(i, j), F(i, j), G(i, j);
            m2 << 0.0, 0.5 * Ev(i, j), 0.5 * Gu(i, j), 0.5 * Ev(i, j), E(i, j), F(i, j), 0.5 * Gu(i, j), F(i, j), G(i, j);
            const double W = E(i, j) * G(i, j) - F(i, j) * F(i, j);
            K(i, j) = (m1.determinant() - m2.determinant()) / (W * W);
        }
    return K;
}

SeedFamily intersection_seed(const RotatingPlaneParams& p) {
    SeedFamily s;
    s.kind = SeedKind::sum_of_curves;
    s.curves = rotating_plane_pair(p);
    s.label = "intersection_I2";
    s.params = {{"p0", p.p.c0}, {"p1", p.p.c1}, {"q0", p.q.c0}, {"q1", p.q.c1},
                {"phi1_0", p.phi1.c0}, {"phi1_1", p.phi1.c1}, {"phi2_0", p.phi2.c0}, {"phi2_1", p.phi2.c1},
                {"k1", p.k1}};
    return s;
}

SeedFamily separable_seed(const SeparableParams& p) {
    SeedFamily s;
    s.kind = SeedKind::separable_angle;
    s.curves = separable_angle_pair(p);
    s.label = "separable_I1";
    s.params = {{"a0", p.a.c0}, {"a1", p.a.c1}, {"b0", p.b.c0}, {"b1", p.b.c1}, {"k1", p.k1}, {"k2", p.k2}};
    return s;
}

SeedFamily three_term_seed(const ThreeTermParams& p) {
    SeedFamily s;
    s.kind = SeedKind::sum_of_curves;
    s.curves = three_term_pair(p);
    s.label = "three_term_I3";
    s.params = {{"r1", p.r1}, {"r2", p.r2}, {"c1", p.c1}, {"c2", p.c2}, {"k1", p.k1}, {"k2", p.k2}, {"delta", p.delta}};
    return s;
}

SeedFamily wave_seed(double gu_amp, double gv_amp, const RotatingPlaneParams& traces) {
    SeedFamily s;
    s.kind = SeedKind::wave_solutions;
    s.curves = rotating_plane_pair(traces);
    s.gamma_u = [gu_amp](double u, double v) { return gu_amp * std::cos(u + v); };
    s.gamma_v = [gv_amp](double u, double v) { return gv_amp * std::sin(u - v); };
    s.label = "wave";
    s.params = {{"gamma_u_amp", gu_amp}, {"gamma_v_amp", gv_amp}};
    return s;
}

}  // namespace hypsub
