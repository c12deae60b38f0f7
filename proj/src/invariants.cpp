#include "hypsub/invariants.hpp"
#include "hypsub/numerics.hpp"

#include <cmath>

namespace hypsub {

const ScalarField2& InvariantSet::operator[](int k) const {
    switch (k) {
        case 0: return G_inv;
        case 1: return C_u1;
        case 2: return C_v1;
        case 3: return C_u2;
        case 4: return C_v2;
        default: return R_inv;
    }
}

InvariantSet compute_invariants(const SurfaceData& S, int accuracy) {
    const Grid2& g = S.grid();
    for (const ScalarField2* f : {&S.lambda_u, &S.lambda_v, &S.kappa_u, &S.kappa_v})
        if (f->grid != g) throw Error(ErrorKind::size, "surface data fields on different grids");
    InvariantSet inv;
    inv.mask = S.theta.values.array().cos().abs() >= kFlatMask;
    if (!inv.mask.any()) throw Error(ErrorKind::empty_domain, "|cos theta| < 1e-6 at every node");

    const Eigen::ArrayXXd c = S.theta.values.array().cos();
    const Eigen::ArrayXXd ku = S.kappa_u.values.array(), kv = S.kappa_v.values.array();
    const Eigen::ArrayXXd Lu = S.lambda_u.values.array(), Lv = S.lambda_v.values.array();
    for (ScalarField2* f : {&inv.G_inv, &inv.C_u1, &inv.C_v1, &inv.C_u2, &inv.C_v2, &inv.R_inv}) *f = ScalarField2(g);
    inv.G_inv.values = (c * (ku * kv).sqrt()).matrix();
    inv.C_u1.values = (ku * Lu).matrix();
    inv.C_v1.values = (kv * Lv).matrix();
    inv.C_u2.values = (fd_derivative(S.kappa_u, Axis::u, 1, accuracy).values.array() / ku + 2 * Lu).matrix();
    inv.C_v2.values = (fd_derivative(S.kappa_v, Axis::v, 1, accuracy).values.array() / kv + 2 * Lv).matrix();

    // ln|tan theta| blows up on flat nodes; clamp there so stencils stay finite,
    // the affected nodes are excluded through the mask.
    ScalarField2 rho(g);
    rho.values = S.theta.values.unaryExpr([](double th) {
        const double c = std::max(std::abs(std::cos(th)), kFlatMask);
        return std::log(std::abs(std::sin(th)) / c);
    });
    const Eigen::ArrayXXd ru = fd_derivative(rho, Axis::u, 1, accuracy).values.array();
    const Eigen::ArrayXXd rv = fd_derivative(rho, Axis::v, 1, accuracy).values.array();
    const Eigen::ArrayXXd ruv = fd_mixed(rho, accuracy).values.array();
    inv.R_inv.values = (ruv + c * c * ru * rv - Lv * ru - Lu * rv).matrix();
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j)
            if (!inv.mask(i, j)) {
                inv.R_inv(i, j) = 0.0;
                inv.G_inv(i, j) = 0.0;
            }
    return inv;
}

std::array<double, 6> invariance_residual(const SurfaceData& S, const SurfaceData& S_hat, int accuracy) {
    if (S.grid() != S_hat.grid()) throw Error(ErrorKind::size, "surface data on different grids");
    const InvariantSet a = compute_invariants(S, accuracy), b = compute_invariants(S_hat, accuracy);
    const Mask both = a.mask && b.mask;
    std::array<double, 6> r{};
    for (int k = 0; k < 6; ++k) {
        ScalarField2 d(S.grid());
        d.values = a[k].values - b[k].values;
        r[k] = max_abs_masked(d, both);
    }
    return r;
}

double default_tol_inv(const Grid2& g, double scale) { return 100.0 * g.h2() * scale; }

double invariant_scale(const InvariantSet& inv) {
    double s = 1.0;
    for (int k = 0; k < 6; ++k) s = std::max(s, max_abs_masked(inv[k], inv.mask));
    return s;
}

std::array<double, 6> invariant_tolerances(const InvariantSet& inv) {
    std::array<double, 6> t{};
    for (int k = 0; k < 6; ++k)
        t[k] = default_tol_inv(inv.G_inv.grid, std::max(1.0, max_abs_masked(inv[k], inv.mask)));
    return t;
}

}  // namespace hypsub
