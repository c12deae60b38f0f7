#include "hypsub/moduli.hpp"
#include "hypsub/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hypsub {

namespace {

ScalarField2 sin2(const ScalarField2& theta) {
    return map1(theta, [](double t) {
        const double s = std::sin(t);
        return s * s;
    });
}

ScalarField2 d_u(const ScalarField2& f) { return fd_derivative(f, Axis::u, 1, 4); }
ScalarField2 d_v(const ScalarField2& f) { return fd_derivative(f, Axis::v, 1, 4); }

void require_grid(const DeformationPair& pair, const SurfaceData& S) {
    if (pair.grid() != S.grid()) throw Error(ErrorKind::size, "deformation pair built on a different window");
}

std::string node_str(const Grid2& g, int i, int j) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "node (%d,%d) at (u,v)=(%.6g,%.6g)", i, j, g.u(i), g.v(j));
    return buf;
}

Spline1D axis_spline(double x0, double h, int n, const std::function<double(int)>& f) {
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) y(k) = f(k);
    return Spline1D(x0, h, std::move(y));
}

// H(rho) with tau weights; tau = 1 gives the operator of the undeformed data.
ScalarField2 apply_H(const SurfaceData& S, const ScalarField2& tu, const ScalarField2& tv) {
    const Grid2& g = S.grid();
    ScalarField2 rho(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double c = std::max(std::abs(std::cos(S.theta(i, j))), kFlatMask);
            const double arg = tu(i, j) * tv(i, j) / (c * c) - 1.0;
            if (!(arg > 1e-14))
                throw Error(ErrorKind::boundary, "tau^u tau^v reaches cos^2 theta at " + node_str(g, i, j));
            rho(i, j) = 0.5 * std::log(arg);
        }
    const ScalarField2 ru = d_u(rho), rv = d_v(rho), ruv = fd_mixed(rho, 4);
    ScalarField2 H(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double c = std::cos(S.theta(i, j));
            H(i, j) = ruv(i, j) + c * c / (tu(i, j) * tv(i, j)) * ru(i, j) * rv(i, j) -
                      S.lambda_v(i, j) / tv(i, j) * ru(i, j) - S.lambda_u(i, j) / tu(i, j) * rv(i, j);
        }
    return H;
}

int sign_with_tol(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

HRootSample h_sample(double c, double ch, double tu, double tv) {
    HRootSample h;
    const double k = (1 - ch * ch) / (1 - c * c);
    h.A = k * tv - 1;
    h.B = 2 * ch * (k * tu * tv - 1);
    h.C = k * tu - 1;
    const double scale = std::max({std::abs(h.A), std::abs(h.B), std::abs(h.C), 1.0});
    const QuadRoots q = quadratic_roots(h.A, h.B, h.C, 1e-12 * scale * scale);
    h.disc = h.B * h.B - 4 * h.A * h.C;
    h.disc_closed = -4 * k * (tu - 1) * (tv - 1);
    h.count = q.count;
    h.roots[0] = q.r[0];
    h.roots[1] = q.r[1];
    const auto P = [&](double t) { return (h.A * t - h.B) * t + h.C; };
    const double h_inv = P(1 / ch), h_cos = P(ch);
    const double cr_inv = k * tu * (tv - 1) * (tv - c * c) / (c * c);
    const double cr_cos = k * (tu - 1) * (tu - c * c) / tu;
    h.cr_residual = std::max(std::abs(h_inv - cr_inv), std::abs(h_cos - cr_cos)) / scale;
    h.special_gap = std::min(std::abs(h_inv), std::abs(h_cos)) / scale;
    return h;
}

struct CompositionTest {
    ScalarField2 cu, cv;
    double tol = 0.0;
};

// Derivatives of the two quotients whose vanishing characterizes compositions.
CompositionTest composition_test(const DeformationPair& pair, const SurfaceData& S, const DeformedData& D,
                                 double tol) {
    const Grid2& g = S.grid();
    const ScalarField2 s = sin2(S.theta);
    ScalarField2 qu(g), qv(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            qu(i, j) = (D.tau_v(i, j) - 1 + s(i, j)) / (D.tau_v(i, j) * std::exp(2 * pair.int_lu(i, j)));
            qv(i, j) = (D.tau_u(i, j) - 1 + s(i, j)) / (D.tau_u(i, j) * std::exp(2 * pair.int_lv(i, j)));
        }
    CompositionTest t{d_u(qu), d_v(qv), tol};
    if (t.tol <= 0) t.tol = 10 * g.h2() * std::max(field_scale(qu), field_scale(qv));
    return t;
}

}  // namespace

Primitives primitives(const SurfaceData& S) {
    const Grid2& g = S.grid();
    const ScalarField2 s = sin2(S.theta);
    Primitives P{cumulative_integral(S.lambda_u, Axis::u), cumulative_integral(S.lambda_v, Axis::v)};
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            P.int_lu(i, j) += 0.5 * std::log(s(0, j));
            P.int_lv(i, j) += 0.5 * std::log(s(i, 0));
        }
    return P;
}

DeformationPair make_pair(const Primitives& P, const std::function<double(double)>& U,
                          const std::function<double(double)>& V, std::string label) {
    const Grid2& g = P.int_lu.grid;
    DeformationPair d;
    d.U = axis_spline(g.u0, g.du, g.Nu, [&](int i) { return U(g.u(i)); });
    d.V = axis_spline(g.v0, g.dv, g.Nv, [&](int j) { return V(g.v(j)); });
    d.int_lu = P.int_lu;
    d.int_lv = P.int_lv;
    d.label = std::move(label);
    return d;
}

DeformationPair make_pair(const SurfaceData& S, const std::function<double(double)>& U,
                          const std::function<double(double)>& V, std::string label) {
    return make_pair(primitives(S), U, V, std::move(label));
}

Admissibility check_admissibility(const DeformationPair& pair, const SurfaceData& S) {
    require_grid(pair, S);
    const Grid2& g = S.grid();
    Admissibility a;
    a.margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double tv = 1 + pair.U_at(i) * std::exp(2 * pair.int_lv(i, j));
            const double tu = 1 + pair.V_at(j) * std::exp(2 * pair.int_lu(i, j));
            const double c = std::cos(S.theta(i, j));
            const double slack[3] = {tv, tu, tu * tv - c * c};
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
        static const char* names[3] = {"U > -exp(-2 IntLv)", "V > -exp(-2 IntLu)",
                                       "(1 + U exp(2 IntLv))(1 + V exp(2 IntLu)) > cos^2 theta"};
        a.message = std::string("violates ") + names[a.inequality - 1] + " at " + node_str(g, a.i, a.j);
    }
    return a;
}

DeformedData build_taus(const DeformationPair& pair, const SurfaceData& S) {
    const Admissibility adm = check_admissibility(pair, S);
    if (!adm.ok) throw Error(ErrorKind::inadmissible_pair, adm.message);
    const Grid2& g = S.grid();
    DeformedData D;
    D.tau_u = ScalarField2(g);
    D.tau_v = ScalarField2(g);
    D.theta_hat = ScalarField2(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            D.tau_u(i, j) = 1 + pair.V_at(j) * std::exp(2 * pair.int_lu(i, j));
            D.tau_v(i, j) = 1 + pair.U_at(i) * std::exp(2 * pair.int_lv(i, j));
            D.theta_hat(i, j) = std::acos(std::cos(S.theta(i, j)) / std::sqrt(D.tau_u(i, j) * D.tau_v(i, j)));
        }
    D.S_hat.theta = D.theta_hat;
    D.S_hat.lambda_u = map2(S.lambda_u, D.tau_u, [](double l, double t) { return l / t; });
    D.S_hat.lambda_v = map2(S.lambda_v, D.tau_v, [](double l, double t) { return l / t; });
    D.S_hat.kappa_u = map2(S.kappa_u, D.tau_u, [](double k, double t) { return k * t; });
    D.S_hat.kappa_v = map2(S.kappa_v, D.tau_v, [](double k, double t) { return k * t; });

    const ScalarField2 tuu = d_u(D.tau_u), tvv = d_v(D.tau_v);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            D.pde_residual_u =
                std::max(D.pde_residual_u, std::abs(tuu(i, j) - 2 * S.lambda_u(i, j) * (D.tau_u(i, j) - 1)));
            D.pde_residual_v =
                std::max(D.pde_residual_v, std::abs(tvv(i, j) - 2 * S.lambda_v(i, j) * (D.tau_v(i, j) - 1)));
        }
    return D;
}

double default_tol_mod(const Grid2& g, double scale) { return 100.0 * g.h2() * scale; }

ModuliResidual moduli_residual(const DeformationPair& pair, const SurfaceData& S, double tol) {
    const DeformedData D = build_taus(pair, S);
    const Grid2& g = S.grid();
    ModuliResidual r;
    r.mask = S.theta.values.array().cos().abs() >= kFlatMask;
    if (!r.mask.any()) throw Error(ErrorKind::empty_domain, "|cos theta| < 1e-6 at every node");
    ScalarField2 one(g);
    one.values.setOnes();
    const ScalarField2 H0 = apply_H(S, one, one);
    const ScalarField2 H = apply_H(S, D.tau_u, D.tau_v);
    r.residual = ScalarField2(g);
    r.residual.values = r.mask.select(H.values - H0.values, 0.0);
    r.max_abs = max_abs(r.residual);
    r.scale = std::max(1.0, max_abs_masked(H0, r.mask));
    r.tol = tol > 0 ? tol : default_tol_mod(g, r.scale);
    r.member = r.max_abs <= r.tol;
    return r;
}

const char* to_string(CompositionBranch b) {
    switch (b) {
        case CompositionBranch::none: return "none";
        case CompositionBranch::u_branch: return "u_branch";
        case CompositionBranch::v_branch: return "v_branch";
        case CompositionBranch::both: return "both";
    }
    return "?";
}

const char* to_string(FlatExtension f) {
    switch (f) {
        case FlatExtension::none: return "none";
        case FlatExtension::Gu_U0: return "Gu_U0";
        case FlatExtension::Gv_V0: return "Gv_V0";
        case FlatExtension::Gu_Vm1: return "Gu_Vm1";
        case FlatExtension::Gv_Um1: return "Gv_Um1";
    }
    return "?";
}

const char* to_string(Genuineness g) {
    switch (g) {
        case Genuineness::genuine_honest: return "genuine_honest";
        case Genuineness::genuine_not_honest: return "genuine_not_honest";
        case Genuineness::genuine_mixed: return "genuine_mixed";
        case Genuineness::unique_singular_SC_extension: return "unique_singular_SC_extension";
        case Genuineness::two_SC_extensions: return "two_SC_extensions";
        case Genuineness::sign_varies: return "sign_varies";
    }
    return "?";
}

const char* to_string(AnglePreservingCase c) {
    switch (c) {
        case AnglePreservingCase::generic_tau: return "generic_tau";
        case AnglePreservingCase::constant_theta_tau: return "constant_theta_tau";
        case AnglePreservingCase::family_su_zero: return "family_su_zero";
        case AnglePreservingCase::family_sv_zero: return "family_sv_zero";
        case AnglePreservingCase::family_lambda_zero: return "family_lambda_zero";
        case AnglePreservingCase::family_constant_theta: return "family_constant_theta";
        case AnglePreservingCase::none: return "none";
    }
    return "?";
}

FlatExtension flat_extension_branch(const DeformationPair& pair, const PolarSurface& surface,
                                    const ClassifyOptions& opt) {
    const auto max_knot = [](const Spline1D& f, double shift) { return (f.knots().array() + shift).abs().maxCoeff(); };
    const bool U0 = max_knot(pair.U, 0) <= opt.uv_zero, V0 = max_knot(pair.V, 0) <= opt.uv_zero;
    const bool Um1 = max_knot(pair.U, 1) <= opt.flat_tol, Vm1 = max_knot(pair.V, 1) <= opt.flat_tol;
    const bool Gu0 = max_abs(surface.gamma_u) <= opt.flat_tol, Gv0 = max_abs(surface.gamma_v) <= opt.flat_tol;
    return Gu0 && U0    ? FlatExtension::Gu_U0
           : Gv0 && V0  ? FlatExtension::Gv_V0
           : Gu0 && Vm1 ? FlatExtension::Gu_Vm1
           : Gv0 && Um1 ? FlatExtension::Gv_Um1
                        : FlatExtension::none;
}

ClassificationReport classify(const DeformationPair& pair, const SurfaceData& S, const PolarSurface& surface,
                              const ClassifyOptions& opt) {
    require_grid(pair, S);
    const Grid2& g = S.grid();
    if (surface.grid != g) throw Error(ErrorKind::size, "polar surface sampled on a different window");
    ClassificationReport rep;
    const ModuliResidual mr = moduli_residual(pair, S, opt.tol_mod);
    rep.moduli_residual = mr.max_abs;
    rep.tol_mod = mr.tol;
    if (!mr.member) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "pair is not in the moduli space (residual %.3e > tol %.3e)", mr.max_abs, mr.tol);
        throw Error(ErrorKind::precondition, buf);
    }
    const DeformedData D = build_taus(pair, S);

    const CompositionTest ct = composition_test(pair, S, D, opt.tol_comp);
    rep.tol_comp = ct.tol;
    rep.nodes = g.Nu * g.Nv;
    rep.min_comp_u = ct.cu.values.cwiseAbs().minCoeff();
    rep.min_comp_v = ct.cv.values.cwiseAbs().minCoeff();
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const bool fu = std::abs(ct.cu(i, j)) <= ct.tol, fv = std::abs(ct.cv(i, j)) <= ct.tol;
            rep.composition_nodes_u += fu;
            rep.composition_nodes_v += fv;
            rep.composition_nodes += fu || fv;
        }
    const bool all_u = rep.composition_nodes_u == rep.nodes, all_v = rep.composition_nodes_v == rep.nodes;
    rep.branch = all_u && all_v ? CompositionBranch::both
                 : all_u        ? CompositionBranch::u_branch
                 : all_v        ? CompositionBranch::v_branch
                                : CompositionBranch::none;
    rep.is_composition = all_u || all_v;

    rep.flat_extension = flat_extension_branch(pair, surface, opt);

    int npos = 0, nneg = 0, nzero = 0;
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const int sg = sign_with_tol(pair.U_at(i) * pair.V_at(j), opt.uv_zero);
            (sg > 0 ? npos : sg < 0 ? nneg : nzero)++;
        }
    const int total = rep.nodes;
    rep.uv_sign = npos == total ? 1 : nneg == total ? -1 : nzero == total ? 0 : 2;
    switch (rep.uv_sign) {
        case 1:
            if (rep.composition_nodes == 0) {
                rep.genuineness = Genuineness::genuine_honest;
                rep.honest = true;
            } else if (rep.is_composition) {
                rep.genuineness = Genuineness::genuine_not_honest;
            } else {
                rep.genuineness = Genuineness::genuine_mixed;
                rep.note = "mixed composition verdict; refine window";
            }
            break;
        case 0: rep.genuineness = Genuineness::unique_singular_SC_extension; break;
        case -1: rep.genuineness = Genuineness::two_SC_extensions; break;
        default:
            rep.genuineness = Genuineness::sign_varies;
            rep.note = "sign of UV changes on the window";
    }

    const int stride_u = opt.sample_stride > 0 ? opt.sample_stride : std::max(1, (g.Nu - 1) / 8);
    const int stride_v = opt.sample_stride > 0 ? opt.sample_stride : std::max(1, (g.Nv - 1) / 8);
    for (int i = 0; i < g.Nu; i += stride_u)
        for (int j = 0; j < g.Nv; j += stride_v) {
            const double c = std::cos(S.theta(i, j));
            if (std::abs(c) < kFlatMask) continue;
            HRootSample h = h_sample(c, std::cos(D.theta_hat(i, j)), D.tau_u(i, j), D.tau_v(i, j));
            h.i = i;
            h.j = j;
            h.UV = pair.U_at(i) * pair.V_at(j);
            // U = V = 0 at this node: the deformation is trivial here and h vanishes identically.
            if (std::max({std::abs(h.A), std::abs(h.B), std::abs(h.C)}) <= 1e-12) continue;
            const double scale = std::max({std::abs(h.A), std::abs(h.B), std::abs(h.C), 1.0});
            const int uv = sign_with_tol(h.UV, opt.uv_zero);
            const int ds = sign_with_tol(h.disc, 1e-12 * scale * scale);
            if (ds != -uv) ++rep.disc_law_violations;
            const int expect = uv > 0 ? 0 : uv == 0 ? 1 : 2;
            if (h.count != expect) ++rep.root_count_violations;
            rep.max_disc_mismatch = std::max(rep.max_disc_mismatch, std::abs(h.disc - h.disc_closed) / (scale * scale));
            rep.max_cr_residual = std::max(rep.max_cr_residual, h.cr_residual);
            rep.h_samples.push_back(h);
        }
    return rep;
}

double sbcasy_residual(const ScalarField2& tau, const SurfaceData& S) {
    const ScalarField2 tu = d_u(tau), tv = d_v(tau);
    double r = 0.0;
    for (int i = 0; i < tau.grid.Nu; ++i)
        for (int j = 0; j < tau.grid.Nv; ++j) {
            const double t = tau(i, j);
            r = std::max(r, std::abs(tu(i, j) - 2 * S.lambda_u(i, j) * (t - 1)));
            r = std::max(r, std::abs(tv(i, j) - 2 * S.lambda_v(i, j) * t * (t - 1)));
        }
    return r;
}

namespace {

// (U,V) of an angle-preserving deformation from its tau field, restricted to the
// axes through p0 where the general formulas depend on one variable only.
DeformationPair pair_from_tau(const Primitives& P, const ScalarField2& tau, std::string label) {
    const Grid2& g = tau.grid;
    DeformationPair d;
    d.U = axis_spline(g.u0, g.du, g.Nu, [&](int i) { return (1 / tau(i, 0) - 1) * std::exp(-2 * P.int_lv(i, 0)); });
    d.V = axis_spline(g.v0, g.dv, g.Nv, [&](int j) { return (tau(0, j) - 1) * std::exp(-2 * P.int_lu(0, j)); });
    d.int_lu = P.int_lu;
    d.int_lv = P.int_lv;
    d.label = std::move(label);
    return d;
}

void validate_pairs(AnglePreservingReport& rep, const SurfaceData& S, double tol_mod) {
    const Grid2& g = S.grid();
    for (const DeformationPair& p : rep.pairs) {
        double res = std::numeric_limits<double>::infinity(), mismatch = std::numeric_limits<double>::infinity();
        bool member = false;
        try {
            const ModuliResidual mr = moduli_residual(p, S, tol_mod);
            res = mr.max_abs;
            member = mr.member;
            const DeformedData D = build_taus(p, S);
            mismatch = 0.0;
            for (int i = 0; i < g.Nu; i += std::max(1, (g.Nu - 1) / 8))
                for (int j = 0; j < g.Nv; j += std::max(1, (g.Nv - 1) / 8)) {
                    const double c = std::cos(S.theta(i, j));
                    const HRootSample h = h_sample(c, std::cos(D.theta_hat(i, j)), D.tau_u(i, j), D.tau_v(i, j));
                    const double r = std::sqrt(D.tau_u(i, j));
                    if (h.count != 2) {
                        mismatch = std::numeric_limits<double>::infinity();
                        continue;
                    }
                    mismatch = std::max({mismatch, std::abs(std::abs(h.roots[0]) - r), std::abs(std::abs(h.roots[1]) - r)});
                }
        } catch (const Error&) {
            member = false;
        }
        rep.residuals.push_back(res);
        rep.root_mismatch.push_back(mismatch);
        rep.all_members = rep.all_members && member;
        for (int i = 0; i < g.Nu; ++i)
            for (int j = 0; j < g.Nv; ++j)
                if (!(p.U_at(i) * p.V_at(j) < 0)) rep.all_uv_negative = false;
    }
    if (rep.pairs.empty()) rep.all_members = false;
}

// Single candidate tau: accept when positive, not identically one, and solving the system.
void try_single_tau(AnglePreservingReport& rep, const SurfaceData& S, const Primitives& P, ScalarField2 tau,
                    AnglePreservingCase which) {
    rep.tau = std::move(tau);
    rep.sbcasy_residual = sbcasy_residual(rep.tau, S);
    rep.sbcasy_tol = default_tol_mod(S.grid(), field_scale(rep.tau));
    const bool positive = (rep.tau.values.array() > 0).all();
    const bool not_one = (rep.tau.values.array() - 1).abs().maxCoeff() > rep.zero_tol;
    if (!positive) {
        rep.verdict = "candidate tau is not positive; no angle-preserving deformation";
    } else if (!not_one) {
        rep.verdict = "candidate tau is identically 1; no angle-preserving deformation";
    } else if (rep.sbcasy_residual > rep.sbcasy_tol) {
        rep.verdict = "candidate tau fails the tau system; no angle-preserving deformation";
    } else {
        rep.which = which;
        rep.verdict = "unique angle-preserving deformation";
        rep.pairs.push_back(pair_from_tau(P, rep.tau, std::string(to_string(which))));
        rep.params.push_back(0.0);
    }
}

}  // namespace

AnglePreservingReport angle_preserving_scan(const SurfaceData& S, const AnglePreservingOptions& opt) {
    const Grid2& g = S.grid();
    AnglePreservingReport rep;
    const ScalarField2 s = sin2(S.theta);
    const ScalarField2 su = d_u(s), sv = d_v(s);
    const ScalarField2& Lu = S.lambda_u;
    const ScalarField2& Lv = S.lambda_v;
    const double scale = std::max({1.0, max_abs(Lu), max_abs(Lv), max_abs(su), max_abs(sv)});
    rep.zero_tol = opt.zero_tol > 0 ? opt.zero_tol : 1e-2 * g.h2() * scale;
    const double tol = rep.zero_tol;
    const auto zero = [&](const ScalarField2& f) { return max_abs(f) <= tol; };
    const auto nonzero = [&](const ScalarField2& f) { return f.values.cwiseAbs().minCoeff() > tol; };
    const Primitives P = primitives(S);

    const ScalarField2 A = map2(Lu, sv, [](double a, double b) { return a * b; });
    const ScalarField2 B = map2(Lv, su, [](double a, double b) { return a * b; });
    const ScalarField2 Lv_u = d_u(Lv), Lu_v = d_v(Lu);

    if (nonzero(A) && nonzero(B)) {
        try_single_tau(rep, S, P, map2(A, B, [](double a, double b) { return a / b; }), AnglePreservingCase::generic_tau);
    } else if (zero(A) && zero(B)) {
        if (zero(Lu) && zero(Lv)) {
            rep.which = AnglePreservingCase::family_lambda_zero;
            rep.verdict = "one-parameter family with constant tau";
            const std::vector<double> taus =
                opt.family_params.empty() ? std::vector<double>{0.25, 0.5, 0.8, 1.25, 2.0, 4.0} : opt.family_params;
            for (double t : taus) {
                if (!(t > 0) || t == 1) continue;
                ScalarField2 tau(g);
                tau.values.setConstant(t);
                rep.pairs.push_back(pair_from_tau(P, tau, "tau=" + std::to_string(t)));
                rep.params.push_back(t);
            }
        } else if (zero(su) && zero(Lu)) {
            if (!zero(Lv_u)) {
                rep.verdict = "s_u = Lambda^u = 0 but Lambda^v_u != 0; no angle-preserving deformation";
            } else {
                rep.which = AnglePreservingCase::family_su_zero;
                rep.verdict = "one-parameter family with constant U (compositions)";
                const ScalarField2 I = cumulative_integral(Lv, Axis::v);
                const std::vector<double> t0s =
                    opt.family_params.empty() ? std::vector<double>{0.5, 0.8, 1.25, 2.0} : opt.family_params;
                for (double t0 : t0s) {
                    ScalarField2 tau(g);
                    bool ok = t0 > 0 && t0 != 1;
                    for (int i = 0; i < g.Nu && ok; ++i)
                        for (int j = 0; j < g.Nv; ++j) {
                            const double den = 1 - (1 - 1 / t0) * std::exp(2 * I(0, j));
                            if (!(den > 0)) {
                                ok = false;
                                break;
                            }
                            tau(i, j) = 1 / den;
                        }
                    if (!ok) continue;
                    rep.pairs.push_back(pair_from_tau(P, tau, "tau0=" + std::to_string(t0)));
                    rep.params.push_back(t0);
                }
            }
        } else if (zero(sv) && zero(Lv)) {
            if (!zero(Lu_v)) {
                rep.verdict = "s_v = Lambda^v = 0 but Lambda^u_v != 0; no angle-preserving deformation";
            } else {
                rep.which = AnglePreservingCase::family_sv_zero;
                rep.verdict = "one-parameter family with constant V (compositions)";
                const ScalarField2 I = cumulative_integral(Lu, Axis::u);
                const std::vector<double> t0s =
                    opt.family_params.empty() ? std::vector<double>{0.5, 0.8, 1.25, 2.0} : opt.family_params;
                for (double t0 : t0s) {
                    if (!(t0 > 0) || t0 == 1) continue;
                    ScalarField2 tau(g);
                    bool ok = true;
                    for (int i = 0; i < g.Nu; ++i)
                        for (int j = 0; j < g.Nv; ++j) {
                            tau(i, j) = 1 + (t0 - 1) * std::exp(2 * I(i, 0));
                            ok = ok && tau(i, j) > 0;
                        }
                    if (!ok) continue;
                    rep.pairs.push_back(pair_from_tau(P, tau, "tau0=" + std::to_string(t0)));
                    rep.params.push_back(t0);
                }
            }
        } else if (zero(su) && zero(sv) && nonzero(Lu) && nonzero(Lv)) {
            const ScalarField2 LL = map2(Lu, Lv, [](double a, double b) { return 2 * a * b; });
            const ScalarField2 Mu = map2(Lv_u, LL, [](double a, double b) { return a + b; });
            const ScalarField2 Mv = map2(Lu_v, LL, [](double a, double b) { return a + b; });
            const ScalarField2 diff = map2(Mu, Mv, [](double a, double b) { return a - b; });
            if (zero(Mu) && zero(Mv)) {
                rep.which = AnglePreservingCase::family_constant_theta;
                rep.verdict = "one-parameter family, tau = (c - Ut)/(c + Vt)";
                // W = Ut + Vt with 2 Lambda^u = (ln W)_u, 2 Lambda^v = (ln W)_v, W(p0) = 1.
                const ScalarField2 Iu = cumulative_integral(Lu, Axis::u), Iv = cumulative_integral(Lv, Axis::v);
                Eigen::VectorXd Ut(g.Nu), Vt(g.Nv);
                for (int i = 0; i < g.Nu; ++i) Ut(i) = std::exp(2 * Iu(i, 0));
                for (int j = 0; j < g.Nv; ++j) Vt(j) = std::exp(2 * Iv(0, j)) - 1;
                std::vector<double> cs = opt.family_params;
                if (cs.empty()) {
                    const double span = std::max(1.0, Ut.maxCoeff() - Ut.minCoeff() + Vt.maxCoeff() - Vt.minCoeff());
                    const double hi = std::max(Ut.maxCoeff(), -Vt.minCoeff());
                    const double lo = std::min(Ut.minCoeff(), -Vt.maxCoeff());
                    for (double f : {0.5, 1.0, 2.0, 4.0}) cs.push_back(hi + f * span);
                    for (double f : {1.0, 3.0}) cs.push_back(lo - f * span);
                }
                for (double c : cs) {
                    ScalarField2 tau(g);
                    bool ok = true;
                    for (int i = 0; i < g.Nu; ++i)
                        for (int j = 0; j < g.Nv; ++j) {
                            tau(i, j) = (c - Ut(i)) / (c + Vt(j));
                            ok = ok && tau(i, j) > 0 && std::isfinite(tau(i, j));
                        }
                    if (!ok) continue;
                    rep.pairs.push_back(pair_from_tau(P, tau, "c=" + std::to_string(c)));
                    rep.params.push_back(c);
                }
            } else if (nonzero(Mu) && nonzero(Mv) && nonzero(diff)) {
                try_single_tau(rep, S, P, map2(Mv, Mu, [](double a, double b) { return a / b; }),
                               AnglePreservingCase::constant_theta_tau);
            } else {
                rep.verdict = "constant theta without a consistent tau; no angle-preserving deformation";
            }
        } else {
            rep.verdict = "degenerate field conditions; no angle-preserving deformation";
        }
    } else {
        rep.verdict = "Lambda^u s_v and Lambda^v s_u vanish on part of the window only; no angle-preserving deformation";
    }
    validate_pairs(rep, S, opt.tol_mod);
    if (rep.pairs.empty()) rep.all_members = rep.which == AnglePreservingCase::none;
    return rep;
}

}  // namespace hypsub
