#ifndef HLAB_POLYNOMIAL_HPP
#define HLAB_POLYNOMIAL_HPP

// Sparse polynomials in (x1..xn, y1..yn), used for exact radial integration
// when reconstructing Lagrangians and dissipation functions.

#include <map>
#include <vector>

#include "hlab/expr.hpp"

namespace hlab {

struct NotPolynomial : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClosednessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Poly {
public:
    // exponent key: [x1..xn, y1..yn]
    using Key = std::vector<int>;

    explicit Poly(int n = 0) : n_(n) {}

    int dim() const { return n_; }
    const std::map<Key, double>& terms() const { return t_; }
    bool zero() const { return t_.empty(); }

    void add_term(const Key& k, double c) {
        if (c == 0.0) return;
        auto it = t_.find(k);
        if (it == t_.end()) {
            t_[k] = c;
        } else {
            it->second += c;
            if (it->second == 0.0) t_.erase(it);
        }
    }

    static Poly constant(double c, int n) {
        Poly p(n);
        p.add_term(Key(2 * n, 0), c);
        return p;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a;
        for (const auto& [k, c] : b.t_) r.add_term(k, c);
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r = a;
        for (const auto& [k, c] : b.t_) r.add_term(k, -c);
        return r;
    }

    friend Poly operator*(double s, const Poly& a) {
        Poly r(a.n_);
        for (const auto& [k, c] : a.t_) r.add_term(k, s * c);
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.n_);
        for (const auto& [ka, ca] : a.t_)
            for (const auto& [kb, cb] : b.t_) {
                Key k(ka.size());
                for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
                r.add_term(k, ca * cb);
            }
        return r;
    }

    Poly dx(int i) const { return diff(i); }
    Poly dy(int i) const { return diff(n_ + i); }

    // multiply by x^i or y^i
    Poly mul_y(int i) const {
        Poly r(n_);
        for (const auto& [k, c] : t_) {
            Key k2 = k;
            ++k2[n_ + i];
            r.add_term(k2, c);
        }
        return r;
    }

    static int y_degree(const Key& k, int n) {
        int d = 0;
        for (int i = 0; i < n; ++i) d += k[n + i];
        return d;
    }

    // Right-inverse of the Euler operator on the y-variables: each term of
    // y-degree d > 0 is divided by d. Pure-x terms are a gauge obstruction.
    Poly radial_integrate_y() const {
        Poly r(n_);
        for (const auto& [k, c] : t_) {
            int d = y_degree(k, n_);
            if (d == 0)
                throw ClosednessError("radial integration hit a term of y-degree zero");
            r.add_term(k, c / d);
        }
        return r;
    }

    // drop tiny coefficients left over from floating-point solves
    Poly pruned(double eps) const {
        Poly r(n_);
        for (const auto& [k, c] : t_)
            if (std::abs(c) > eps) r.add_term(k, c);
        return r;
    }

    ScalarField to_field() const {
        using namespace detail;
        if (t_.empty()) return field_const(0.0, n_);
        NodePtr sum;
        for (const auto& [k, c] : t_) {
            NodePtr term = make_num(c);
            for (int i = 0; i < 2 * n_; ++i) {
                if (k[i] == 0) continue;
                NodePtr v = make_var(i < n_ ? NodeKind::VarX : NodeKind::VarY,
                                     i < n_ ? i : i - n_);
                NodePtr f = k[i] == 1 ? v
                                      : make_binary(NodeKind::Pow, v,
                                                    make_num(static_cast<double>(k[i])));
                term = make_binary(NodeKind::Mul, term, f);
            }
            sum = sum ? make_binary(NodeKind::Add, sum, term) : term;
        }
        return ScalarField(n_, sum);
    }

private:
    int n_;
    std::map<Key, double> t_;

    Poly diff(int var) const {
        Poly r(n_);
        for (const auto& [k, c] : t_) {
            if (k[var] == 0) continue;
            Key k2 = k;
            --k2[var];
            r.add_term(k2, c * k[var]);
        }
        return r;
    }
};

namespace detail {

inline Poly node_to_poly(const NodePtr& n, int dim) {
    switch (n->kind) {
        case NodeKind::Num: return Poly::constant(n->num, dim);
        case NodeKind::VarX: {
            Poly p(dim);
            Poly::Key k(2 * dim, 0);
            k[n->index] = 1;
            p.add_term(k, 1.0);
            return p;
        }
        case NodeKind::VarY: {
            Poly p(dim);
            Poly::Key k(2 * dim, 0);
            k[dim + n->index] = 1;
            p.add_term(k, 1.0);
            return p;
        }
        case NodeKind::Add: return node_to_poly(n->a, dim) + node_to_poly(n->b, dim);
        case NodeKind::Sub: return node_to_poly(n->a, dim) - node_to_poly(n->b, dim);
        case NodeKind::Neg: return -1.0 * node_to_poly(n->a, dim);
        case NodeKind::Mul: return node_to_poly(n->a, dim) * node_to_poly(n->b, dim);
        case NodeKind::Div: {
            Poly b = node_to_poly(n->b, dim);
            if (b.terms().size() != 1) throw NotPolynomial("non-constant denominator");
            const auto& [key, c] = *b.terms().begin();
            for (int e : key)
                if (e != 0) throw NotPolynomial("non-constant denominator");
            return (1.0 / c) * node_to_poly(n->a, dim);
        }
        case NodeKind::Pow: {
            long k;
            if (!literal_int_exponent(n->b, k) || k < 0)
                throw NotPolynomial("non-integer or negative exponent");
            Poly base = node_to_poly(n->a, dim);
            Poly r = Poly::constant(1.0, dim);
            for (long i = 0; i < k; ++i) r = r * base;
            return r;
        }
        case NodeKind::Call: throw NotPolynomial("function call " + func_name(n->func));
    }
    throw NotPolynomial("corrupt expression node");
}

}  // namespace detail

inline Poly ast_to_poly(const ScalarField& f) {
    return detail::node_to_poly(f.root(), f.dim());
}

}  // namespace hlab

#endif  // HLAB_POLYNOMIAL_HPP
