#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace hypsub {

// Rectangular (u,v) lattice. Node (i,j) sits at (u0 + i*du, v0 + j*dv).
struct Grid2 {
    double u0 = 0.0;
    double v0 = 0.0;
    double du = 1.0;
    double dv = 1.0;
    int Nu = 0;
    int Nv = 0;

    double u(int i) const { return u0 + i * du; }
    double v(int j) const { return v0 + j * dv; }
    double u_end() const { return u(Nu - 1); }
    double v_end() const { return v(Nv - 1); }
    double h2() const { return du * du + dv * dv; }

    bool operator==(const Grid2& o) const {
        return u0 == o.u0 && v0 == o.v0 && du == o.du && dv == o.dv && Nu == o.Nu && Nv == o.Nv;
    }
    bool operator!=(const Grid2& o) const { return !(*this == o); }

    // Same box sampled with spacing divided by `factor`.
    Grid2 refined(int factor) const {
        return {u0, v0, du / factor, dv / factor, (Nu - 1) * factor + 1, (Nv - 1) * factor + 1};
    }
    // Grid on [ua,ub] x [va,vb] with the given node counts.
    static Grid2 box(double ua, double ub, double va, double vb, int nu, int nv) {
        return {ua, va, (ub - ua) / (nu - 1), (vb - va) / (nv - 1), nu, nv};
    }
};

void validate_grid(const Grid2& g);

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Scalar samples on a grid, values(i,j) at node (i,j).
template <typename Scalar>
struct Field2 {
    Grid2 grid;
    MatrixX<Scalar> values;

    Field2() = default;
    explicit Field2(const Grid2& g) : grid(g), values(MatrixX<Scalar>::Zero(g.Nu, g.Nv)) {}
    Field2(const Grid2& g, MatrixX<Scalar> v) : grid(g), values(std::move(v)) {}

    Scalar& operator()(int i, int j) { return values(i, j); }
    Scalar operator()(int i, int j) const { return values(i, j); }
};

// Ambient-vector samples, one Nu x Nv matrix per ambient coordinate.
template <typename Scalar>
struct VecField2 {
    Grid2 grid;
    std::vector<MatrixX<Scalar>> comp;

    VecField2() = default;
    VecField2(const Grid2& g, int ambient_dim)
        : grid(g), comp(ambient_dim, MatrixX<Scalar>::Zero(g.Nu, g.Nv)) {}

    int dim() const { return static_cast<int>(comp.size()); }

    VectorX<Scalar> at(int i, int j) const {
        VectorX<Scalar> x(dim());
        for (int k = 0; k < dim(); ++k) x(k) = comp[k](i, j);
        return x;
    }
    void set(int i, int j, const VectorX<Scalar>& x) {
        for (int k = 0; k < dim(); ++k) comp[k](i, j) = x(k);
    }
    Field2<Scalar> component(int k) const { return Field2<Scalar>(grid, comp[k]); }
};

using ScalarField2 = Field2<double>;
using VecField = VecField2<double>;

template <typename F>
ScalarField2 sample(const Grid2& g, F&& fn) {
    ScalarField2 out(g);
    for (int i = 0; i < g.Nu; ++i)
        for (int j = 0; j < g.Nv; ++j) out(i, j) = fn(g.u(i), g.v(j));
    return out;
}

// Pointwise combination of scalar fields on a shared grid.
template <typename F>
ScalarField2 map2(const ScalarField2& a, const ScalarField2& b, F&& fn) {
    ScalarField2 out(a.grid);
    for (int i = 0; i < a.grid.Nu; ++i)
        for (int j = 0; j < a.grid.Nv; ++j) out(i, j) = fn(a(i, j), b(i, j));
    return out;
}

template <typename F>
ScalarField2 map1(const ScalarField2& a, F&& fn) {
    ScalarField2 out(a.grid);
    out.values = a.values.unaryExpr(fn);
    return out;
}

inline ScalarField2 dot(const VecField& a, const VecField& b) {
    ScalarField2 out(a.grid);
    for (int k = 0; k < a.dim(); ++k) out.values.array() += a.comp[k].array() * b.comp[k].array();
    return out;
}

inline double max_abs(const ScalarField2& f) { return f.values.cwiseAbs().maxCoeff(); }

// Max |f| over nodes where mask is true; 0 if the mask is empty.
double max_abs_masked(const ScalarField2& f, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

double max_norm(const VecField& f);

// max(1, |f|_inf): the reference magnitude used by relative tolerances.
inline double field_scale(const ScalarField2& f) { return std::max(1.0, max_abs(f)); }

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace hypsub
