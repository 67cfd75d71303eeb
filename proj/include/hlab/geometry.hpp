#ifndef HLAB_GEOMETRY_HPP
#define HLAB_GEOMETRY_HPP

// Geometric objects induced by a second-order ODE system (semispray):
// nonlinear connection, Berwald coefficients, Jacobi endomorphism,
// curvature, dynamical covariant derivative and geodesic integration.
// Everything is evaluated pointwise from 2-jets of the spray coefficients.

#include <Eigen/Dense>

#include "hlab/expr.hpp"

namespace hlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// T^i_{jk}, first index contravariant
struct Tensor3 {
    int n = 0;
    std::vector<double> a;
    Tensor3() = default;
    explicit Tensor3(int dim) : n(dim), a(dim * dim * dim, 0.0) {}
    double& operator()(int i, int j, int k) { return a[(i * n + j) * n + k]; }
    double operator()(int i, int j, int k) const { return a[(i * n + j) * n + k]; }
};

struct SodeSystem {
    int dim = 0;
    std::vector<ScalarField> G;  // spray coefficients, xdot' = -2G(x, xdot)
    bool homog2 = false;         // declared 2-homogeneous in y (a spray)
};

struct SemiBasicOneForm {
    int dim = 0;
    std::vector<ScalarField> comp;  // components in dx^i
};

// All point data derived from the spray coefficients at one point.
struct GeometryJet {
    int n = 0;
    Point p;
    std::vector<Jet2> Gjet;  // 2-jets of each G^i
    Vec Gval;                // G^i values
    Mat N;                   // N^i_j = dG^i/dy^j
    Tensor3 Gamma;           // Berwald: dN^i_j/dy^k
    Mat Phi;                 // Jacobi endomorphism R^i_j
    Tensor3 Curv;            // R^i_{jk}, antisymmetric in (j,k) by construction
};

inline GeometryJet geometry_at(const SodeSystem& sode, const Point& p) {
    const int n = sode.dim;
    GeometryJet gj;
    gj.n = n;
    gj.p = p;
    gj.Gval = Vec::Zero(n);
    gj.N = Mat::Zero(n, n);
    gj.Gamma = Tensor3(n);
    gj.Phi = Mat::Zero(n, n);
    gj.Curv = Tensor3(n);
    gj.Gjet.reserve(n);
    for (int i = 0; i < n; ++i) gj.Gjet.push_back(eval_jet2(sode.G[i], p));

    for (int i = 0; i < n; ++i) {
        gj.Gval(i) = gj.Gjet[i].value();
        for (int j = 0; j < n; ++j) gj.N(i, j) = gj.Gjet[i].dy(j);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) gj.Gamma(i, j, k) = gj.Gjet[i].dydy(j, k);

    // R^i_j = 2 dG^i/dx^j - S(N^i_j) - N^i_r N^r_j, with
    // S(N^i_j) = y^k d2G^i/dx^k dy^j - 2 G^k d2G^i/dy^k dy^j
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double sn = 0.0;
            for (int k = 0; k < n; ++k)
                sn += p.y[k] * gj.Gjet[i].dxdy(k, j) - 2.0 * gj.Gval(k) * gj.Gjet[i].dydy(k, j);
            double nn = 0.0;
            for (int r = 0; r < n; ++r) nn += gj.N(i, r) * gj.N(r, j);
            gj.Phi(i, j) = 2.0 * gj.Gjet[i].dx(j) - sn - nn;
        }
    }

    // delta N^i_j / delta x^k = d2G^i/dx^k dy^j - N^l_k d2G^i/dy^l dy^j
    Tensor3 dN(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = gj.Gjet[i].dxdy(k, j);
                for (int l = 0; l < n; ++l) v -= gj.N(l, k) * gj.Gjet[i].dydy(l, j);
                dN(i, j, k) = v;
            }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) gj.Curv(i, j, k) = dN(i, j, k) - dN(i, k, j);
    return gj;
}

// S(f) = y^i df/dx^i - 2 G^i df/dy^i
inline double spray_apply(const SodeSystem& sode, const ScalarField& f, const Point& p) {
    Jet2 j = eval_jet2(f, p);
    double r = 0.0;
    for (int i = 0; i < sode.dim; ++i)
        r += p.y[i] * j.dx(i) - 2.0 * eval_value(sode.G[i], p) * j.dy(i);
    return r;
}

// delta f / delta x^i = df/dx^i - N^j_i df/dy^j
inline Vec horizontal_derivative(const SodeSystem& sode, const ScalarField& f, const Point& p) {
    GeometryJet gj = geometry_at(sode, p);
    Jet2 j = eval_jet2(f, p);
    Vec r = Vec::Zero(sode.dim);
    for (int i = 0; i < sode.dim; ++i) {
        r(i) = j.dx(i);
        for (int k = 0; k < sode.dim; ++k) r(i) -= gj.N(k, i) * j.dy(k);
    }
    return r;
}

// Dynamical covariant derivative on 1-form components:
//   nabla a_i = S(a_i) - a_k N^k_i
inline Vec nabla_oneform(const SodeSystem& sode, const SemiBasicOneForm& a, const Point& p) {
    const int n = sode.dim;
    GeometryJet gj = geometry_at(sode, p);
    Vec r = Vec::Zero(n);
    std::vector<Jet2> aj;
    aj.reserve(n);
    for (int i = 0; i < n; ++i) aj.push_back(eval_jet2(a.comp[i], p));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += p.y[k] * aj[i].dx(k) - 2.0 * gj.Gval(k) * aj[i].dy(k);
        r(i) = s;
        for (int k = 0; k < n; ++k) r(i) -= aj[k].value() * gj.N(k, i);
    }
    return r;
}

// nabla on (0,2)-tensor components:
//   nabla A_ij = S(A_ij) - A_kj N^k_i - A_ik N^k_j
inline Mat nabla_02(const SodeSystem& sode, const std::vector<std::vector<ScalarField>>& A,
                    const Point& p) {
    const int n = sode.dim;
    GeometryJet gj = geometry_at(sode, p);
    Mat val = Mat::Zero(n, n);
    Mat sA = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet2 jA = eval_jet2(A[i][j], p);
            val(i, j) = jA.value();
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += p.y[k] * jA.dx(k) - 2.0 * gj.Gval(k) * jA.dy(k);
            sA(i, j) = s;
        }
    Mat r = sA - gj.N.transpose() * val - val * gj.N;
    return r;
}

struct Multiplier {
    Mat g;        // g_ij = d theta_i / d y^j
    Tensor3 dgdy; // d g_ij / d y^k
};

inline Multiplier multiplier_of(const SemiBasicOneForm& theta, const Point& p) {
    const int n = theta.dim;
    Multiplier m;
    m.g = Mat::Zero(n, n);
    m.dgdy = Tensor3(n);
    for (int i = 0; i < n; ++i) {
        Jet2 j = eval_jet2(theta.comp[i], p);
        for (int k = 0; k < n; ++k) {
            m.g(i, k) = j.dy(k);
            for (int l = 0; l < n; ++l) m.dgdy(i, k, l) = j.dydy(k, l);
        }
    }
    return m;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Point> states;
    double h = 0.0;
    std::string method = "rk4";
};

struct BlowupError : std::runtime_error {
    Point last_state;
    double last_time;
    BlowupError(Point s, double t)
        : std::runtime_error("trajectory became non-finite at t=" + std::to_string(t)),
          last_state(std::move(s)), last_time(t) {}
};

// Classical RK4 on xdot = y, ydot = -2G(x,y).
inline Trajectory integrate_geodesic(const SodeSystem& sode, const Point& init, double h,
                                     int steps) {
    if (h <= 0.0) throw std::invalid_argument("step size must be positive");
    if (steps < 1) throw std::invalid_argument("need at least one step");
    const int n = sode.dim;

    auto deriv = [&](const Point& s, Point& out) {
        out.x = s.y;
        out.y.assign(n, 0.0);
        for (int i = 0; i < n; ++i) out.y[i] = -2.0 * eval_value(sode.G[i], s);
    };
    auto axpy = [&](const Point& s, double c, const Point& d) {
        Point r = s;
        for (int i = 0; i < n; ++i) {
            r.x[i] += c * d.x[i];
            r.y[i] += c * d.y[i];
        }
        return r;
    };
    auto finite = [&](const Point& s) {
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) return false;
        return true;
    };

    Trajectory tr;
    tr.h = h;
    tr.times.push_back(0.0);
    tr.states.push_back(init);
    Point s = init;
    Point k1, k2, k3, k4;
    for (int step = 0; step < steps; ++step) {
        try {
            deriv(s, k1);
            deriv(axpy(s, h / 2, k1), k2);
            deriv(axpy(s, h / 2, k2), k3);
            deriv(axpy(s, h, k3), k4);
        } catch (const EvalError&) {
            throw BlowupError(s, tr.times.back());
        }
        Point next = s;
        for (int i = 0; i < n; ++i) {
            next.x[i] += h / 6 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
            next.y[i] += h / 6 * (k1.y[i] + 2 * k2.y[i] + 2 * k3.y[i] + k4.y[i]);
        }
        if (!finite(next)) throw BlowupError(s, tr.times.back());
        s = next;
        tr.times.push_back(h * (step + 1));
        tr.states.push_back(s);
    }
    return tr;
}

// Lagrange differential components: delta_S L_i = S(dL/dy^i) - dL/dx^i.
// Needs only the 2-jet of L plus first x-derivatives of G.
inline Vec lagrange_differential(const SodeSystem& sode, const ScalarField& L, const Point& p) {
    const int n = sode.dim;
    Jet2 j = eval_jet2(L, p);
    Vec r = Vec::Zero(n);
    std::vector<double> g2(n);
    for (int k = 0; k < n; ++k) g2[k] = eval_value(sode.G[k], p);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
            s += p.y[k] * j.dxdy(k, i) - 2.0 * g2[k] * j.dydy(k, i);
        r(i) = s - j.dx(i);
    }
    return r;
}

}  // namespace hlab

#endif  // HLAB_GEOMETRY_HPP
