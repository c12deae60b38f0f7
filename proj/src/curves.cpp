#include "hypsub/curves.hpp"
#include "hypsub/errors.hpp"

#include <cmath>

namespace hypsub {

namespace {

// 5-point Gauss-Legendre on [-1,1].
constexpr double kGLx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                            0.9061798459386640};
constexpr double kGLw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891};

Eigen::VectorXd integrate_cell(const Curve& c, double a, double b) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(c.dim());
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    for (int k = 0; k < 5; ++k) acc += kGLw[k] * c.d1(m + r * kGLx[k]);
    return r * acc;
}

Eigen::VectorXd unit(int N, int k) { return Eigen::VectorXd::Unit(N, k); }

void require_dim(int N, int need) {
    if (N < need) throw Error(ErrorKind::size, "curve family needs ambient dimension >= " + std::to_string(need));
}

double safe_sqrt1m(double x) {
    if (x >= 1.0) throw Error(ErrorKind::degenerate_seed, "curve factor reaches modulus 1");
    return std::sqrt(1.0 - x);
}

}  // namespace

Eigen::VectorXd Curve::position(double x) const {
    // Integrate from 0 in cells no longer than 1/16.
    const int cells = std::max(1, static_cast<int>(std::ceil(std::abs(x) * 16)));
    Eigen::VectorXd p = origin;
    for (int k = 0; k < cells; ++k) p += integrate_cell(*this, x * k / cells, x * (k + 1) / cells);
    return p;
}

Eigen::MatrixXd Curve::sample_positions(double x0, double h, int n) const {
    Eigen::MatrixXd out(n, dim());
    Eigen::VectorXd p = position(x0);
    out.row(0) = p.transpose();
    for (int k = 1; k < n; ++k) {
        p += integrate_cell(*this, x0 + (k - 1) * h, x0 + k * h);
        out.row(k) = p.transpose();
    }
    return out;
}

CurvePair separable_angle_pair(const SeparableParams& p, int N) {
    require_dim(N, 5);
    CurvePair c;
    c.family = "separable_angle";
    const auto make = [N](Affine1 f, double k, int e0, int e1, int e2) {
        Curve cv;
        cv.origin = Eigen::VectorXd::Zero(N);
        cv.d1 = [=](double x) {
            const double a = f(x), r = safe_sqrt1m(a * a);
            return Eigen::VectorXd(a * unit(N, e0) + r * (std::cos(k * x) * unit(N, e1) + std::sin(k * x) * unit(N, e2)));
        };
        cv.d2 = [=](double x) {
            const double a = f(x), ap = f.c1, r = safe_sqrt1m(a * a), rp = -a * ap / r;
            return Eigen::VectorXd(ap * unit(N, e0) + rp * (std::cos(k * x) * unit(N, e1) + std::sin(k * x) * unit(N, e2)) +
                                   r * k * (-std::sin(k * x) * unit(N, e1) + std::cos(k * x) * unit(N, e2)));
        };
        return cv;
    };
    c.alpha1 = make(p.a, p.k1, 0, 1, 2);
    c.alpha2 = make(p.b, p.k2, 0, 3, 4);
    return c;
}

CurvePair rotating_plane_pair(const RotatingPlaneParams& p, int N) {
    require_dim(N, 5);
    CurvePair c;
    c.family = "rotating_plane";
    Curve a1, a2;
    a1.origin = a2.origin = Eigen::VectorXd::Zero(N);
    a1.d1 = [=](double u) {
        const double pp = p.p(u), r = safe_sqrt1m(pp * pp), f = p.phi1(u), k = p.k1;
        return Eigen::VectorXd(pp * (std::cos(f) * unit(N, 0) + std::sin(f) * unit(N, 1)) +
                               r * (std::cos(k * u) * unit(N, 2) + std::sin(k * u) * unit(N, 3)));
    };
    a1.d2 = [=](double u) {
        const double pp = p.p(u), dp = p.p.c1, r = safe_sqrt1m(pp * pp), dr = -pp * dp / r;
        const double f = p.phi1(u), df = p.phi1.c1, k = p.k1;
        return Eigen::VectorXd(dp * (std::cos(f) * unit(N, 0) + std::sin(f) * unit(N, 1)) +
                               pp * df * (-std::sin(f) * unit(N, 0) + std::cos(f) * unit(N, 1)) +
                               dr * (std::cos(k * u) * unit(N, 2) + std::sin(k * u) * unit(N, 3)) +
                               r * k * (-std::sin(k * u) * unit(N, 2) + std::cos(k * u) * unit(N, 3)));
    };
    a2.d1 = [=](double v) {
        const double q = p.q(v), r = safe_sqrt1m(q * q), f = p.phi2(v);
        return Eigen::VectorXd(q * (std::cos(f) * unit(N, 0) + std::sin(f) * unit(N, 1)) + r * unit(N, 4));
    };
    a2.d2 = [=](double v) {
        const double q = p.q(v), dq = p.q.c1, r = safe_sqrt1m(q * q), dr = -q * dq / r;
        const double f = p.phi2(v), df = p.phi2.c1;
        return Eigen::VectorXd(dq * (std::cos(f) * unit(N, 0) + std::sin(f) * unit(N, 1)) +
                               q * df * (-std::sin(f) * unit(N, 0) + std::cos(f) * unit(N, 1)) + dr * unit(N, 4));
    };
    c.alpha1 = a1;
    c.alpha2 = a2;
    c.proj_speed1 = [=](double u) { return p.p(u) * p.p(u); };
    c.proj_speed2 = [=](double v) { return p.q(v) * p.q(v); };
    return c;
}

CurvePair three_term_pair(const ThreeTermParams& p, int N) {
    require_dim(N, 5);
    CurvePair c;
    c.family = "three_term";
    // w circles about e2, z circles about e0, so w'' and z'' never align.
    const auto make = [N](double r, double lat, double k, double shift, int ax, int e_a, int e_b, int extra) {
        Curve cv;
        cv.origin = Eigen::VectorXd::Zero(N);
        const double s = std::sqrt(1 - r * r);
        cv.d1 = [=](double x) {
            const double a = k * x + shift;
            Eigen::VectorXd w = std::cos(lat) * (std::cos(a) * unit(N, e_a) + std::sin(a) * unit(N, e_b)) +
                                std::sin(lat) * unit(N, ax);
            return Eigen::VectorXd(r * w + s * unit(N, extra));
        };
        cv.d2 = [=](double x) {
            const double a = k * x + shift;
            return Eigen::VectorXd(r * k * std::cos(lat) * (-std::sin(a) * unit(N, e_a) + std::cos(a) * unit(N, e_b)));
        };
        return cv;
    };
    c.alpha1 = make(p.r1, p.c1, p.k1, p.delta, 2, 0, 1, 3);
    c.alpha2 = make(p.r2, p.c2, p.k2, 0.0, 0, 1, 2, 4);
    return c;
}

}  // namespace hypsub
