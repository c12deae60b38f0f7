#include "hypsub/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hypsub {

namespace {

ScalarField2 d_u(const ScalarField2& f) { return fd_derivative(f, Axis::u, 1, 4); }
ScalarField2 d_v(const ScalarField2& f) { return fd_derivative(f, Axis::v, 1, 4); }

double max_masked(const ScalarField2& f, const Mask& m) { return max_abs_masked(f, m); }

std::string at_str(double u, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(u,v)=(%.6g,%.6g)", u, v);
    return buf;
}

// One RK4 step of y' = f(x, y) where coefficients are sampled on a line and
// evaluated at fractional index positions.
template <typename F>
double rk4(F f, double x, double y, double h_idx, double h) {
    const double k1 = f(x, y);
    const double k2 = f(x + h_idx / 2, y + h / 2 * k1);
    const double k3 = f(x + h_idx / 2, y + h / 2 * k2);
    const double k4 = f(x + h_idx, y + h * k3);
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

struct Line {
    Eigen::VectorXd p, q;  // coefficients along the line
};

// Linear direction: mu' = mu a - b.
double step_linear(const Line& L, int k, double y, double h) {
    const auto f = [&](double x, double m) { return m * cubic_at(L.p, x) - cubic_at(L.q, x); };
    return rk4(f, k, y, 1.0, h);
}

// Riccati direction: mu' = mu (mu c - d), with step halving down to h/64.
double step_riccati(const Line& L, int k, double y, double h, int& refinements, double u, double v) {
    const auto f = [&](double x, double m) { return m * (m * cubic_at(L.p, x) - cubic_at(L.q, x)); };
    for (int sub = 1; sub <= 64; sub *= 2) {
        double m = y;
        bool ok = true;
        for (int r = 0; r < sub && ok; ++r) {
            const double next = rk4(f, k + double(r) / sub, m, 1.0 / sub, h / sub);
            ok = std::isfinite(next) && std::abs(next - m) <= 0.5 * std::max(1.0, std::abs(m));
            m = next;
        }
        if (ok) return m;
        ++refinements;
    }
    throw Error(ErrorKind::escape, "mu escapes along v near " + at_str(u, v));
}

void check_sign(double m, double u, double v) {
    if (!(m > 0)) throw Error(ErrorKind::sign, "mu <= 0 reached at " + at_str(u, v) + "; no hypersurface on this branch");
}

}  // namespace

const char* to_string(HypersurfaceClass c) {
    switch (c) {
        case HypersurfaceClass::continuous_class: return "continuous_class";
        case HypersurfaceClass::discrete_class: return "discrete_class";
        case HypersurfaceClass::rigid: return "rigid";
        case HypersurfaceClass::none: return "none";
    }
    return "?";
}

HypersurfaceReport hypersurface_admission(const SurfaceData& S, const HypersurfaceOptions& opt) {
    const Grid2& g = S.grid();
    HypersurfaceReport rep;
    ScalarField2 s = map1(S.theta, [](double t) { return std::sin(t) * std::sin(t); });
    rep.mask = (s.values.array() > opt.mask_eps) && (s.values.array() < 1 - opt.mask_eps);
    if (!rep.mask.any()) throw Error(ErrorKind::empty_domain, "s within mask_eps of 0 or 1 at every node");
    s.values = s.values.cwiseMax(opt.mask_eps).cwiseMin(1 - opt.mask_eps);

    const ScalarField2 su = d_u(s), sv = d_v(s), suv = fd_mixed(s, 4);
    const ScalarField2& Lu = S.lambda_u;
    const ScalarField2& Lv = S.lambda_v;
    const ScalarField2 Lu_v = d_v(Lu), Lv_u = d_u(Lv);
    for (ScalarField2* f : {&rep.a, &rep.b, &rep.c, &rep.d, &rep.P_A, &rep.P_B, &rep.P_C}) *f = ScalarField2(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            const double x = s(i, j), w = 1 - x, lu = Lu(i, j), lv = Lv(i, j);
            rep.a(i, j) = 2 * lu - su(i, j) / x;
            rep.b(i, j) = 2 * lu / x;
            rep.c(i, j) = 2 * x * lv / w;
            rep.d(i, j) = 2 * lv + sv(i, j) / (x * w);
            rep.P_A(i, j) = 2 * x / w * (Lv_u(i, j) + 2 * lu * lv + lv * su(i, j) / w);
            rep.P_B(i, j) = 2 * Lv_u(i, j) + 2 * Lu_v(i, j) + (8 * lu * lv + suv(i, j) + su(i, j) * sv(i, j) / w) / w;
            rep.P_C(i, j) = 2 / x * (Lu_v(i, j) + 2 * lu * lv + lu * sv(i, j) / w);
        }

    const double scale = std::max({1.0, max_masked(rep.a, rep.mask), max_masked(rep.b, rep.mask),
                                   max_masked(rep.c, rep.mask), max_masked(rep.d, rep.mask)});
    rep.P_tol = opt.tol > 0 ? opt.tol : 100 * g.h2() * scale;
    rep.hh_tol = rep.P_tol;

    // Direct differencing of the defining expressions, as a cross-check.
    {
        const ScalarField2 cu = d_u(rep.c), du_ = d_u(rep.d), av = d_v(rep.a), bv = d_v(rep.b);
        double r = 0.0;
        for (int i = 0; i < g.Nu; ++i)
            for (int j = 0; j < g.Nv; ++j) {
                if (!rep.mask(i, j)) continue;
                const double A = rep.a(i, j) * rep.c(i, j) + cu(i, j);
                const double B = 2 * rep.b(i, j) * rep.c(i, j) + du_(i, j) + av(i, j);
                const double C = rep.b(i, j) * rep.d(i, j) + bv(i, j);
                r = std::max({r, std::abs(A - rep.P_A(i, j)), std::abs(B - rep.P_B(i, j)), std::abs(C - rep.P_C(i, j))});
            }
        rep.identity_residual = r / (scale * scale);
    }

    rep.P_norm = std::max({max_masked(rep.P_A, rep.mask), max_masked(rep.P_B, rep.mask), max_masked(rep.P_C, rep.mask)});

    // Per-node roots with coefficients below P_tol treated as zero.
    const auto clean = [&](double x) { return std::abs(x) <= rep.P_tol ? 0.0 : x; };
    rep.min_positive_roots = 3;
    rep.max_positive_roots = -1;
    std::vector<ScalarField2> roots(2, ScalarField2(g));
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) {
            if (!rep.mask(i, j)) continue;
            ++rep.nodes;
            const double A = clean(rep.P_A(i, j)), B = clean(rep.P_B(i, j)), C = clean(rep.P_C(i, j));
            const bool zero = A == 0 && B == 0 && C == 0;
            if (!zero && (B * B - 4 * A * C < 0 || (B <= 0 && C >= 0 && A >= 0) || (B >= 0 && C <= 0 && A <= 0)))
                ++rep.nonexistence_nodes;
            const double cs = std::max({std::abs(A), std::abs(B), std::abs(C), 1e-300});
            const QuadRoots q = quadratic_roots(A, B, C, 1e-12 * cs * cs);
            int k = 0;
            for (int r = 0; r < q.count; ++r)
                if (q.r[r] > 0 && std::isfinite(q.r[r])) roots[k++](i, j) = q.r[r];
            ++rep.root_count_nodes[k];
            rep.min_positive_roots = std::min(rep.min_positive_roots, k);
            rep.max_positive_roots = std::max(rep.max_positive_roots, k);
        }

    if (rep.P_norm <= rep.P_tol) {
        rep.verdict = HypersurfaceClass::continuous_class;
        rep.note = "P vanishes within tolerance";
        return rep;
    }
    if (rep.P_norm <= 10 * rep.P_tol) {
        rep.ambiguous = true;
        rep.verdict = HypersurfaceClass::none;
        rep.note = "P-norm within a decade of tolerance; refine grid";
        return rep;
    }
    if (rep.min_positive_roots != rep.max_positive_roots) {
        rep.ambiguous = true;
        rep.verdict = HypersurfaceClass::none;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "number of positive roots varies over the window (0:%d 1:%d 2:%d nodes); split the window",
                      rep.root_count_nodes[0], rep.root_count_nodes[1], rep.root_count_nodes[2]);
        rep.note = buf;
        return rep;
    }
    int good = 0;
    for (int k = 0; k < rep.min_positive_roots; ++k) {
        RootField rf;
        rf.mu = roots[k];
        std::tie(rf.hh_residual_u, rf.hh_residual_v) = hh_residual(rep, rf.mu);
        rf.satisfies_hh = std::max(rf.hh_residual_u, rf.hh_residual_v) <= rep.hh_tol;
        good += rf.satisfies_hh;
        rep.admissible_mus.push_back(std::move(rf));
    }
    rep.verdict = good >= 2   ? HypersurfaceClass::discrete_class
                  : good == 1 ? HypersurfaceClass::rigid
                              : HypersurfaceClass::none;
    return rep;
}

ScalarField2 evaluate_P(const HypersurfaceReport& rep, const ScalarField2& mu) {
    ScalarField2 out(mu.grid);
    out.values = (rep.P_A.values.array() * mu.values.array().square() - rep.P_B.values.array() * mu.values.array() +
                  rep.P_C.values.array())
                     .matrix();
    return out;
}

std::pair<double, double> hh_residual(const HypersurfaceReport& rep, const ScalarField2& mu) {
    const ScalarField2 mu_u = d_u(mu), mu_v = d_v(mu);
    double ru = 0.0, rv = 0.0;
    for (int i = 0; i < mu.grid.Nu; ++i)
        for (int j = 0; j < mu.grid.Nv; ++j) {
            if (!rep.mask(i, j)) continue;
            const double m = mu(i, j);
            ru = std::max(ru, std::abs(mu_u(i, j) - (m * rep.a(i, j) - rep.b(i, j))));
            rv = std::max(rv, std::abs(mu_v(i, j) - m * (m * rep.c(i, j) - rep.d(i, j))));
        }
    return {ru, rv};
}

MuIntegration integrate_mu(const HypersurfaceReport& rep, double mu0, int root_branch) {
    const Grid2& g = rep.a.grid;
    check_sign(mu0, g.u0, g.v0);
    MuIntegration out;
    out.mu = ScalarField2(g);
    out.mu_alt = ScalarField2(g);
    const auto row = [&](const ScalarField2& p, const ScalarField2& q, int j) {
        return Line{p.values.col(j), q.values.col(j)};
    };
    const auto col = [&](const ScalarField2& p, const ScalarField2& q, int i) {
        return Line{p.values.row(i).transpose(), q.values.row(i).transpose()};
    };

    // u first along v = v0, then v.
    out.mu(0, 0) = mu0;
    {
        const Line L = row(rep.a, rep.b, 0);
        for (int i = 0; i + 1 < g.Nu; ++i) {
            out.mu(i + 1, 0) = step_linear(L, i, out.mu(i, 0), g.du);
            check_sign(out.mu(i + 1, 0), g.u(i + 1), g.v0);
        }
    }
    for (int i = 0; i < g.Nu; ++i) {
        const Line L = col(rep.c, rep.d, i);
        for (int j = 0; j + 1 < g.Nv; ++j) {
            out.mu(i, j + 1) = step_riccati(L, j, out.mu(i, j), g.dv, out.refinements, g.u(i), g.v(j));
            check_sign(out.mu(i, j + 1), g.u(i), g.v(j + 1));
        }
    }

    // v first along u = u0, then u.
    out.mu_alt(0, 0) = mu0;
    {
        const Line L = col(rep.c, rep.d, 0);
        for (int j = 0; j + 1 < g.Nv; ++j) {
            out.mu_alt(0, j + 1) = step_riccati(L, j, out.mu_alt(0, j), g.dv, out.refinements, g.u0, g.v(j));
            check_sign(out.mu_alt(0, j + 1), g.u0, g.v(j + 1));
        }
    }
    for (int j = 0; j < g.Nv; ++j) {
        const Line L = row(rep.a, rep.b, j);
        for (int i = 0; i + 1 < g.Nu; ++i) {
            out.mu_alt(i + 1, j) = step_linear(L, i, out.mu_alt(i, j), g.du);
            check_sign(out.mu_alt(i + 1, j), g.u(i + 1), g.v(j));
        }
    }

    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j)
            out.consistency =
                std::max(out.consistency, std::abs(out.mu(i, j) - out.mu_alt(i, j)) / std::max(1.0, std::abs(out.mu(i, j))));
    std::tie(out.hh_residual_u, out.hh_residual_v) = hh_residual(rep, out.mu);
    if (root_branch >= 0) {
        if (root_branch >= static_cast<int>(rep.admissible_mus.size()))
            throw Error(ErrorKind::precondition, "requested root branch does not exist on this window");
        ScalarField2 diff(g);
        diff.values = out.mu.values - rep.admissible_mus[root_branch].mu.values;
        out.branch_mismatch = max_abs_masked(diff, rep.mask);
    }
    return out;
}

MuIntegration integrate_mu(const SurfaceData& S, double mu0, int root_branch) {
    return integrate_mu(hypersurface_admission(S), mu0, root_branch);
}

}  // namespace hypsub
