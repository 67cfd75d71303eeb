#ifndef HLAB_SOLVER_HPP
#define HLAB_SOLVER_HPP

// Linear-collocation solver: the unknown is a semi-basic 1-form theta in a
// polynomial ansatz; every supported condition set is linear in theta's
// coefficients (the sigma-dependent terms go to the right-hand side).
// Reconstruction of L and the dissipation function works by exact radial
// integration in the y-variables.

#include <Eigen/Dense>
#include <optional>

#include "hlab/conditions.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

struct AnsatzBasis {
    struct Element {
        int comp;          // which theta component carries the monomial
        Poly::Key mono;    // exponents over [x1..xn, y1..yn]
        ScalarField field;
    };
    int dim = 0;
    std::vector<Element> elems;

    SemiBasicOneForm form(const Eigen::VectorXd& c) const {
        SemiBasicOneForm th;
        th.dim = dim;
        for (int i = 0; i < dim; ++i) th.comp.push_back(field_const(0.0, dim));
        for (std::size_t m = 0; m < elems.size(); ++m) {
            if (c(static_cast<int>(m)) == 0.0) continue;
            th.comp[elems[m].comp] =
                th.comp[elems[m].comp] + c(static_cast<int>(m)) * elems[m].field;
        }
        return th;
    }

    // theta components as polynomials, for exact reconstruction
    std::vector<Poly> polys(const Eigen::VectorXd& c) const {
        std::vector<Poly> ps(dim, Poly(dim));
        for (std::size_t m = 0; m < elems.size(); ++m)
            ps[elems[m].comp].add_term(elems[m].mono, c(static_cast<int>(m)));
        return ps;
    }
};

inline AnsatzBasis make_monomial_basis(int dim, int deg_x, int deg_y) {
    AnsatzBasis basis;
    basis.dim = dim;
    // enumerate exponent vectors with |alpha| <= deg_x, |beta| <= deg_y
    std::vector<Poly::Key> keys;
    Poly::Key k(2 * dim, 0);
    std::function<void(int, int, int)> rec = [&](int pos, int xleft, int yleft) {
        if (pos == 2 * dim) {
            keys.push_back(k);
            return;
        }
        bool isx = pos < dim;
        int lim = isx ? xleft : yleft;
        for (int e = 0; e <= lim; ++e) {
            k[pos] = e;
            rec(pos + 1, isx ? xleft - e : xleft, isx ? yleft : yleft - e);
        }
        k[pos] = 0;
    };
    rec(0, deg_x, deg_y);
    for (int i = 0; i < dim; ++i)
        for (const auto& key : keys) {
            Poly p(dim);
            p.add_term(key, 1.0);
            basis.elems.push_back({i, key, p.to_field()});
        }
    return basis;
}

enum class ConditionSet { D1, H, GH, G2Core };

inline ConditionSet condition_set_from_string(const std::string& s) {
    if (s == "D1") return ConditionSet::D1;
    if (s == "H") return ConditionSet::H;
    if (s == "GH") return ConditionSet::GH;
    if (s == "G2") return ConditionSet::G2Core;
    throw std::invalid_argument("unknown condition set '" + s + "'");
}

struct RowLabel {
    std::string cond;
    int sample = 0;
    int i = 0, j = 0, k = 0;
};

struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<RowLabel> labels;
    bool rank_warning = false;  // fewer rows than 2x unknowns (under-sampling)
};

namespace detail {

// All residual rows of one condition set at one sample, affine in theta:
// value = (theta-linear part) + (sigma part). Evaluated per basis element
// (sigma dropped) for matrix columns and at theta = 0 for the rhs.
inline void residual_rows(ConditionSet set, const GeometryJet& geo,
                          const std::vector<Jet2>& th,
                          const std::vector<Jet2>* sg, int sample,
                          std::vector<double>& vals, std::vector<RowLabel>* labels) {
    const int n = geo.n;
    auto emit = [&](const std::string& cond, int i, int j, int k, double v) {
        vals.push_back(v);
        if (labels) labels->push_back({cond, sample, i, j, k});
    };

    Mat g = cond::multiplier(th);
    // d_J-closedness rows (shared by every set)
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            emit("LGH1", i, j, 0, g(i, j) - g(j, i));
            for (int k = 0; k < n; ++k)
                emit("LGH1", i, j, k, th[i].dydy(j, k) - th[j].dydy(i, k));
        }

    if (set == ConditionSet::D1) {
        Mat d = cond::delta_x(th, geo);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) emit("LD1", i, j, 0, d(i, j) - d(j, i));
        return;
    }

    Mat ng = cond::nabla_multiplier(th, geo);
    Mat gp = cond::gphi_skew(g, geo);

    if (set == ConditionSet::H) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) emit("H3", i, j, 0, ng(i, j));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) emit("H2", i, j, 0, gp(i, j));
        return;
    }

    if (set == ConditionSet::GH) {
        Mat gs = sg ? cond::multiplier(*sg) : Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                emit("LGH3", i, j, 0, ng(i, j) - 0.5 * (gs(i, j) + gs(j, i)));
        Mat sig_rhs = Mat::Zero(n, n);
        if (sg) {
            Mat A2 = gs - gs.transpose();
            Mat sgs = cond::spray_on_multiplier(*sg, geo);
            Mat nablaA = (sgs - sgs.transpose()) - geo.N.transpose() * A2 - A2 * geo.N;
            Mat ds = cond::delta_x(*sg, geo);
            sig_rhs = 0.5 * nablaA - (ds - ds.transpose());
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                emit("LGH2", i, j, 0, gp(i, j) - sig_rhs(i, j));
        return;
    }

    // G2 core: nabla g = 0 plus the curvature-cyclic contraction
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) emit("LG-NG", i, j, 0, ng(i, j));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double rhs = 0.0;
            for (int k = 0; k < n; ++k) {
                double cyc = 0.0;
                for (int l = 0; l < n; ++l)
                    cyc += g(i, l) * geo.Curv(l, j, k) + g(k, l) * geo.Curv(l, i, j) +
                           g(j, l) * geo.Curv(l, k, i);
                rhs += cyc * geo.p.y[k];
            }
            emit("LG2", i, j, 0, gp(i, j) - rhs);
        }
}

}  // namespace detail

inline LinearSystem assemble(const SodeSystem& sode, const SemiBasicOneForm* sigma,
                             const AnsatzBasis& basis, ConditionSet set,
                             const SampleDomain& dom) {
    const int n = sode.dim;
    const int M = static_cast<int>(basis.elems.size());
    if (M == 0) {
        LinearSystem ls;
        ls.rank_warning = true;
        return ls;
    }
    auto samples = draw_samples(dom);

    std::vector<std::vector<double>> cols(M);
    std::vector<double> rhs;
    std::vector<RowLabel> labels;
    std::vector<Jet2> zero_th(n, Jet2(n));

    int srow = 0;
    for (const Point& p : samples) {
        GeometryJet geo;
        std::vector<Jet2> sgj;
        try {
            geo = geometry_at(sode, p);
            if (sigma)
                for (const auto& c : sigma->comp) sgj.push_back(eval_jet2(c, p));
        } catch (const EvalError&) {
            continue;
        }
        const std::vector<Jet2>* sgp = sigma ? &sgj : nullptr;

        // rhs rows at theta = 0 (captures the sigma contribution), with labels
        std::vector<double> base;
        detail::residual_rows(set, geo, zero_th, sgp, srow, base, &labels);
        for (double v : base) rhs.push_back(-v);

        bool ok = true;
        for (int m = 0; m < M && ok; ++m) {
            std::vector<Jet2> th = zero_th;
            try {
                th[basis.elems[m].comp] = eval_jet2(basis.elems[m].field, p);
            } catch (const EvalError&) {
                ok = false;
                break;
            }
            std::vector<double> vals;
            detail::residual_rows(set, geo, th, nullptr, srow, vals, nullptr);
            for (double v : vals) cols[m].push_back(v);
        }
        if (!ok) {
            // drop the sample entirely
            std::size_t keep = rhs.size() - base.size();
            rhs.resize(keep);
            labels.resize(keep);
            for (int m = 0; m < M; ++m) cols[m].resize(keep);
            continue;
        }
        ++srow;
    }

    LinearSystem ls;
    const int R = static_cast<int>(rhs.size());
    ls.A = Eigen::MatrixXd::Zero(R, M);
    ls.b = Eigen::VectorXd::Zero(R);
    for (int r = 0; r < R; ++r) ls.b(r) = rhs[r];
    for (int m = 0; m < M; ++m)
        for (int r = 0; r < R; ++r) ls.A(r, m) = cols[m][r];
    ls.labels = std::move(labels);

    ls.rank_warning = R < 2 * M;
    return ls;
}

struct SolveResult {
    std::vector<Eigen::VectorXd> nullspace;        // orthonormal near-null directions
    std::optional<Eigen::VectorXd> particular;     // least-squares solution when b != 0
    double smax = 0.0;
};

inline SolveResult solve_nullspace(const LinearSystem& ls, double rank_tol) {
    SolveResult res;
    if (ls.A.size() == 0) return res;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ls.A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    res.smax = sv.size() ? sv(0) : 0.0;
    const int M = static_cast<int>(ls.A.cols());
    const int r = static_cast<int>(sv.size());
    for (int i = 0; i < r; ++i)
        if (sv(i) <= rank_tol * res.smax) res.nullspace.push_back(svd.matrixV().col(i));
    // columns of V beyond the thin rank (rows < cols) are also null directions
    for (int i = r; i < static_cast<int>(svd.matrixV().cols()); ++i)
        res.nullspace.push_back(svd.matrixV().col(i));
    if (ls.b.cwiseAbs().maxCoeff() > 0.0) {
        // least squares via SVD with the same rank cutoff
        Eigen::VectorXd c = Eigen::VectorXd::Zero(M);
        Eigen::VectorXd utb = svd.matrixU().transpose() * ls.b;
        for (int i = 0; i < r; ++i)
            if (sv(i) > rank_tol * res.smax) c += (utb(i) / sv(i)) * svd.matrixV().col(i);
        res.particular = c;
    }
    return res;
}

// Keep solutions whose multiplier matrix is non-trivial over the domain,
// rescaled so the largest sampled |g| entry is 1.
inline std::vector<Eigen::VectorXd> filter_nontrivial(
    const std::vector<Eigen::VectorXd>& sols, const AnsatzBasis& basis,
    const SampleDomain& dom) {
    auto samples = draw_samples(dom);
    std::vector<Eigen::VectorXd> kept;
    for (const auto& c : sols) {
        SemiBasicOneForm th = basis.form(c);
        double gmax = 0.0;
        for (const Point& p : samples) {
            try {
                Multiplier m = multiplier_of(th, p);
                gmax = std::max(gmax, m.g.cwiseAbs().maxCoeff());
            } catch (const EvalError&) {
            }
        }
        if (gmax > 1e-6) kept.push_back(c / gmax);
    }
    return kept;
}

// L with dL/dy^i = theta_i, by exact radial integration of theta_i y^i.
// Gauge: L(x, 0) = 0 (no pure-x part can arise).
inline ScalarField reconstruct_lagrangian(const std::vector<Poly>& theta_poly,
                                          const SampleDomain& dom, double post_tol = 1e-10) {
    const int n = static_cast<int>(theta_poly.size());
    Poly P(n);
    for (int i = 0; i < n; ++i) P = P + theta_poly[i].mul_y(i);
    Poly L = P.radial_integrate_y();
    // post-check against the given components
    auto samples = draw_samples(dom);
    ScalarField Lf = L.to_field();
    for (const Point& p : samples) {
        try {
            Jet2 j = eval_jet2(Lf, p);
            for (int i = 0; i < n; ++i) {
                double ti = 0.0;
                for (const auto& [k, c] : theta_poly[i].terms()) {
                    double v = c;
                    for (int a = 0; a < n; ++a) {
                        for (int e = 0; e < k[a]; ++e) v *= p.x[a];
                        for (int e = 0; e < k[n + a]; ++e) v *= p.y[a];
                    }
                    ti += v;
                }
                if (std::abs(j.dy(i) - ti) > post_tol)
                    throw ClosednessError("reconstructed L does not match theta (d_J theta != 0?)");
            }
        } catch (const EvalError&) {
        }
    }
    return Lf;
}

inline ScalarField reconstruct_lagrangian(const SemiBasicOneForm& theta,
                                          const SampleDomain& dom, double post_tol = 1e-10) {
    std::vector<Poly> ps;
    for (const auto& c : theta.comp) ps.push_back(ast_to_poly(c));
    return reconstruct_lagrangian(ps, dom, post_tol);
}

namespace detail {

// horizontal derivative of L as symbolic fields: dL/dx^i - dG^k/dy^i dL/dy^k
inline std::vector<ScalarField> dh_fields(const SodeSystem& sode, const ScalarField& L) {
    const int n = sode.dim;
    std::vector<ScalarField> out;
    for (int i = 0; i < n; ++i) {
        ScalarField f = derivative_field_x(L, i);
        for (int k = 0; k < n; ++k)
            f = f - derivative_field_y(sode.G[k], i) * derivative_field_y(L, k);
        out.push_back(f);
    }
    return out;
}

}  // namespace detail

// D = S(L) - 2f with df/dy^i = delta L / delta x^i; f comes from exact
// radial integration when everything is polynomial, otherwise from the
// homogeneous identity f = P/h for P = (delta L/delta x^i) y^i h-homogeneous.
inline ScalarField reconstruct_dissipation(const SodeSystem& sode, const ScalarField& L,
                                           const SampleDomain& dom, double post_tol = 1e-8) {
    const int n = sode.dim;
    auto dh = detail::dh_fields(sode, L);
    auto samples = draw_samples(dom);

    // pre-integration closedness: d(dhL_i)/dy^j symmetric
    for (const Point& p : samples) {
        try {
            std::vector<Jet2> js;
            for (const auto& f : dh) js.push_back(eval_jet2(f, p));
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (std::abs(js[i].dy(j) - js[j].dy(i)) > 1e-7)
                        throw ClosednessError("d_h L is not d_J-closed (D1 violated)");
        } catch (const EvalError&) {
        }
    }

    ScalarField P = field_const(0.0, n);
    for (int i = 0; i < n; ++i) P = P + dh[i] * field_y(i, n);

    ScalarField f;
    bool have_f = false;
    try {
        Poly Pp = ast_to_poly(P).pruned(1e-13);
        f = Pp.radial_integrate_y().to_field();
        have_f = true;
    } catch (const NotPolynomial&) {
    }
    if (!have_f) {
        // homogeneous fallback: find integer h with C(P) = hP over the samples
        for (int h = 1; h <= 8 && !have_f; ++h) {
            double worst = 0.0;
            int used = 0;
            for (const Point& p : samples) {
                try {
                    worst = std::max(worst, std::abs(euler_residual(P, p, h)));
                    ++used;
                } catch (const EvalError&) {
                }
            }
            if (used > 0 && worst <= 1e-7) {
                f = (1.0 / h) * P;
                have_f = true;
            }
        }
        if (!have_f)
            throw ClosednessError("cannot radially integrate d_h L: neither polynomial "
                                  "nor homogeneous");
    }

    // S(L) symbolically
    ScalarField SL = field_const(0.0, n);
    for (int i = 0; i < n; ++i)
        SL = SL + field_y(i, n) * derivative_field_x(L, i) -
             2.0 * (sode.G[i] * derivative_field_y(L, i));
    ScalarField D = SL - 2.0 * f;

    // tidy polynomial output when possible
    try {
        D = ast_to_poly(D).pruned(1e-13).to_field();
    } catch (const NotPolynomial&) {
    }

    // post-check: delta_S L_i = dD/dy^i
    for (const Point& p : samples) {
        try {
            Vec dsl = lagrange_differential(sode, L, p);
            Jet2 dj = eval_jet2(D, p);
            for (int i = 0; i < n; ++i)
                if (std::abs(dsl(i) - dj.dy(i)) > post_tol)
                    throw ClosednessError("dissipation post-check failed");
        } catch (const EvalError&) {
        }
    }
    return D;
}

}  // namespace hlab

#endif  // HLAB_SOLVER_HPP
