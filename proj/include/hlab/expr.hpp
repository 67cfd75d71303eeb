#ifndef HLAB_EXPR_HPP
#define HLAB_EXPR_HPP

// Expression DSL over coordinates (x1..xn, y1..yn) with exact 2-jet
// evaluation (value, gradient, Hessian) by forward-mode propagation.
//
// Grammar (EBNF):
//   expr    ::= term { ("+" | "-") term }
//   term    ::= factor { ("*" | "/") factor }
//   factor  ::= "-" factor | power
//   power   ::= primary [ "^" factor ]
//   primary ::= number | ident | ident "(" expr ")" | "(" expr ")"
//   ident   ::= "x"<k> | "y"<k> | function name (sqrt, sin, cos, exp, log)

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlab {

struct SyntaxError : std::runtime_error {
    std::size_t pos;
    SyntaxError(const std::string& msg, std::size_t p)
        : std::runtime_error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedFunction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point {
    std::vector<double> x;
    std::vector<double> y;

    Point() = default;
    Point(std::vector<double> xs, std::vector<double> ys)
        : x(std::move(xs)), y(std::move(ys)) {}

    int dim() const { return static_cast<int>(x.size()); }
};

// 2-jet of a scalar at a point of TM: value, first and second partials in
// all 2n coordinates. The Hessian blocks are filled pairwise, so dxdx and
// dydy are symmetric by construction, not by tolerance.
class Jet2 {
public:
    explicit Jet2(int n) : n_(n), val_(0.0), d_(2 * n, 0.0), h_(4 * n * n, 0.0) {}

    int dim() const { return n_; }

    double value() const { return val_; }
    double& value() { return val_; }

    double dx(int i) const { return d_[i]; }
    double dy(int i) const { return d_[n_ + i]; }
    double dxdx(int i, int j) const { return h(i, j); }
    double dxdy(int i, int j) const { return h(i, n_ + j); }
    double dydy(int i, int j) const { return h(n_ + i, n_ + j); }

    // flat accessors over the 2n-variable index space
    double deriv(int a) const { return d_[a]; }
    double& deriv(int a) { return d_[a]; }
    double h(int a, int b) const { return h_[a * 2 * n_ + b]; }
    void set_h(int a, int b, double v) {
        h_[a * 2 * n_ + b] = v;
        h_[b * 2 * n_ + a] = v;
    }

    bool finite() const {
        if (!std::isfinite(val_)) return false;
        for (double v : d_)
            if (!std::isfinite(v)) return false;
        for (double v : h_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    int n_;
    double val_;
    std::vector<double> d_;
    std::vector<double> h_;
};

namespace detail {

enum class NodeKind { Num, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow, Call };
enum class Func { Sqrt, Sin, Cos, Exp, Log };

struct Node {
    NodeKind kind;
    double num = 0.0;           // Num
    int index = 0;              // VarX / VarY (0-based)
    Func func = Func::Sqrt;     // Call
    std::shared_ptr<const Node> a, b;
};

using NodePtr = std::shared_ptr<const Node>;

inline NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Num;
    n->num = v;
    return n;
}

inline NodePtr make_var(NodeKind k, int idx) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->index = idx;
    return n;
}

inline NodePtr make_unary(NodeKind k, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

inline NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

inline std::string func_name(Func f) {
    switch (f) {
        case Func::Sqrt: return "sqrt";
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
    }
    return "?";
}

// Exponent is a literal (possibly negated) integer: safe for the power rule
// with any base sign.
inline bool literal_int_exponent(const NodePtr& e, long& out) {
    const Node* n = e.get();
    double sign = 1.0;
    while (n->kind == NodeKind::Neg) {
        sign = -sign;
        n = n->a.get();
    }
    if (n->kind != NodeKind::Num) return false;
    double v = sign * n->num;
    if (v != std::floor(v) || std::abs(v) > 1e9) return false;
    out = static_cast<long>(v);
    return true;
}

std::string to_string(const NodePtr& n);

}  // namespace detail

class ScalarField {
public:
    ScalarField() : dim_(0) {}
    ScalarField(int dim, detail::NodePtr root) : dim_(dim), root_(std::move(root)) {}

    int dim() const { return dim_; }
    const detail::NodePtr& root() const { return root_; }
    bool valid() const { return root_ != nullptr; }

    std::string str() const { return detail::to_string(root_); }

private:
    int dim_;
    detail::NodePtr root_;
};

// ---------------------------------------------------------------------------
// parsing

namespace detail {

class Parser {
public:
    Parser(const std::string& src, int dim) : src_(src), dim_(dim) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("empty expression", 0);
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& src_;
    int dim_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (eat('+'))
                e = make_binary(NodeKind::Add, e, term());
            else if (eat('-'))
                e = make_binary(NodeKind::Sub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            if (eat('*'))
                e = make_binary(NodeKind::Mul, e, factor());
            else if (eat('/'))
                e = make_binary(NodeKind::Div, e, factor());
            else
                return e;
        }
    }

    NodePtr factor() {
        if (eat('-')) return make_unary(NodeKind::Neg, factor());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make_binary(NodeKind::Pow, base, factor());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        // exponent part, e.g. 1e-3
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;
            }
        }
        try {
            return make_num(std::stod(src_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw SyntaxError("malformed number", start);
        }
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if ((name == "x" || name == "y") && pos_ < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            std::size_t dstart = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            int idx = std::stoi(src_.substr(dstart, pos_ - dstart));
            if (idx < 1 || idx > dim_)
                throw DimensionError("variable " + name + std::to_string(idx) +
                                     " exceeds dimension " + std::to_string(dim_));
            return make_var(name == "x" ? NodeKind::VarX : NodeKind::VarY, idx - 1);
        }
        if (!eat('(')) throw SyntaxError("expected '(' after '" + name + "'", pos_);
        NodePtr arg = expr();
        if (!eat(')')) throw SyntaxError("expected ')'", pos_);
        if (name == "sqrt") return make_call(Func::Sqrt, arg);
        if (name == "sin") return make_call(Func::Sin, arg);
        if (name == "cos") return make_call(Func::Cos, arg);
        if (name == "exp") return make_call(Func::Exp, arg);
        if (name == "log") return make_call(Func::Log, arg);
        throw UnsupportedFunction("unsupported function '" + name + "'");
    }
};

inline std::string to_string(const NodePtr& n) {
    if (!n) return "0";
    switch (n->kind) {
        case NodeKind::Num: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", n->num);
            return buf;
        }
        case NodeKind::VarX: return "x" + std::to_string(n->index + 1);
        case NodeKind::VarY: return "y" + std::to_string(n->index + 1);
        case NodeKind::Add: return "(" + to_string(n->a) + "+" + to_string(n->b) + ")";
        case NodeKind::Sub: return "(" + to_string(n->a) + "-" + to_string(n->b) + ")";
        case NodeKind::Mul: return "(" + to_string(n->a) + "*" + to_string(n->b) + ")";
        case NodeKind::Div: return "(" + to_string(n->a) + "/" + to_string(n->b) + ")";
        case NodeKind::Neg: return "(-" + to_string(n->a) + ")";
        case NodeKind::Pow: return "(" + to_string(n->a) + "^" + to_string(n->b) + ")";
        case NodeKind::Call: return func_name(n->func) + "(" + to_string(n->a) + ")";
    }
    return "?";
}

}  // namespace detail

inline ScalarField parse_scalar_field(const std::string& src, int dim) {
    if (dim < 1) throw DimensionError("dimension must be >= 1");
    // `abs` is rejected up front: it breaks twice-differentiability.
    for (std::size_t i = 0; i + 3 <= src.size(); ++i) {
        if (src.compare(i, 3, "abs") == 0 &&
            (i == 0 || !std::isalpha(static_cast<unsigned char>(src[i - 1]))) &&
            (i + 3 == src.size() || !std::isalpha(static_cast<unsigned char>(src[i + 3]))))
            throw UnsupportedFunction("'abs' is not twice differentiable and is not allowed");
    }
    detail::Parser p(src, dim);
    return ScalarField(dim, p.parse());
}

// ---------------------------------------------------------------------------
// jet evaluation

namespace detail {

inline void check_value(double v, const Node& n) {
    if (!std::isfinite(v))
        throw EvalError("non-finite value in subexpression '" + to_string(
                            std::make_shared<Node>(n)) + "'");
}

// f(u) with f', f'' supplied: standard univariate chain rule on jets.
inline Jet2 apply_unary(const Jet2& u, double f, double fp, double fpp) {
    const int m = 2 * u.dim();
    Jet2 r(u.dim());
    r.value() = f;
    for (int a = 0; a < m; ++a) r.deriv(a) = fp * u.deriv(a);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b)
            r.set_h(a, b, fp * u.h(a, b) + fpp * u.deriv(a) * u.deriv(b));
    return r;
}

inline Jet2 jet_add(const Jet2& x, const Jet2& y, double sign) {
    const int m = 2 * x.dim();
    Jet2 r(x.dim());
    r.value() = x.value() + sign * y.value();
    for (int a = 0; a < m; ++a) r.deriv(a) = x.deriv(a) + sign * y.deriv(a);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) r.set_h(a, b, x.h(a, b) + sign * y.h(a, b));
    return r;
}

inline Jet2 jet_mul(const Jet2& x, const Jet2& y) {
    const int m = 2 * x.dim();
    Jet2 r(x.dim());
    r.value() = x.value() * y.value();
    for (int a = 0; a < m; ++a) r.deriv(a) = x.deriv(a) * y.value() + x.value() * y.deriv(a);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b)
            r.set_h(a, b, x.h(a, b) * y.value() + x.value() * y.h(a, b) +
                              x.deriv(a) * y.deriv(b) + x.deriv(b) * y.deriv(a));
    return r;
}

inline Jet2 eval_node(const Node& n, const Point& p);

inline Jet2 jet_pow_int(const Jet2& u, long k, const Node& n) {
    if (k == 0) {
        Jet2 r(u.dim());
        r.value() = 1.0;
        return r;
    }
    if (u.value() == 0.0 && k < 2) {
        if (k < 0) throw EvalError("zero base with negative exponent in '" + to_string(n.a) + "'");
        // k == 1: identity
    }
    double v = std::pow(u.value(), static_cast<double>(k));
    double fp = static_cast<double>(k) * std::pow(u.value(), static_cast<double>(k - 1));
    double fpp = static_cast<double>(k) * static_cast<double>(k - 1) *
                 std::pow(u.value(), static_cast<double>(k - 2));
    if (k == 1) { fp = 1.0; fpp = 0.0; }
    if (k == 2) { fpp = 2.0; }
    return apply_unary(u, v, fp, fpp);
}

inline Jet2 eval_node(const Node& n, const Point& p) {
    const int dim = static_cast<int>(p.x.size());
    switch (n.kind) {
        case NodeKind::Num: {
            Jet2 r(dim);
            r.value() = n.num;
            return r;
        }
        case NodeKind::VarX: {
            Jet2 r(dim);
            r.value() = p.x[n.index];
            r.deriv(n.index) = 1.0;
            return r;
        }
        case NodeKind::VarY: {
            Jet2 r(dim);
            r.value() = p.y[n.index];
            r.deriv(dim + n.index) = 1.0;
            return r;
        }
        case NodeKind::Add: return jet_add(eval_node(*n.a, p), eval_node(*n.b, p), 1.0);
        case NodeKind::Sub: return jet_add(eval_node(*n.a, p), eval_node(*n.b, p), -1.0);
        case NodeKind::Neg: {
            Jet2 u = eval_node(*n.a, p);
            return apply_unary(u, -u.value(), -1.0, 0.0);
        }
        case NodeKind::Mul: return jet_mul(eval_node(*n.a, p), eval_node(*n.b, p));
        case NodeKind::Div: {
            Jet2 a = eval_node(*n.a, p);
            Jet2 b = eval_node(*n.b, p);
            if (b.value() == 0.0)
                throw EvalError("division by zero in '" + to_string(n.b) + "'");
            double iv = 1.0 / b.value();
            Jet2 inv = apply_unary(b, iv, -iv * iv, 2.0 * iv * iv * iv);
            Jet2 r = jet_mul(a, inv);
            check_value(r.value(), n);
            return r;
        }
        case NodeKind::Pow: {
            Jet2 base = eval_node(*n.a, p);
            long k;
            if (literal_int_exponent(n.b, k)) return jet_pow_int(base, k, n);
            // general exponent: b^e = exp(e*log b), needs b > 0
            if (base.value() <= 0.0)
                throw EvalError("non-positive base for non-integer power in '" +
                                to_string(n.a) + "'");
            Jet2 e = eval_node(*n.b, p);
            double lv = std::log(base.value());
            double iv = 1.0 / base.value();
            Jet2 lg = apply_unary(base, lv, iv, -iv * iv);
            Jet2 prod = jet_mul(e, lg);
            double ev = std::exp(prod.value());
            return apply_unary(prod, ev, ev, ev);
        }
        case NodeKind::Call: {
            Jet2 u = eval_node(*n.a, p);
            double v = u.value();
            switch (n.func) {
                case Func::Sqrt: {
                    if (v <= 0.0)
                        throw EvalError("sqrt of non-positive value in '" + to_string(n.a) + "'");
                    double s = std::sqrt(v);
                    return apply_unary(u, s, 0.5 / s, -0.25 / (s * v));
                }
                case Func::Sin: return apply_unary(u, std::sin(v), std::cos(v), -std::sin(v));
                case Func::Cos: return apply_unary(u, std::cos(v), -std::sin(v), -std::cos(v));
                case Func::Exp: {
                    double e = std::exp(v);
                    return apply_unary(u, e, e, e);
                }
                case Func::Log: {
                    if (v <= 0.0)
                        throw EvalError("log of non-positive value in '" + to_string(n.a) + "'");
                    return apply_unary(u, std::log(v), 1.0 / v, -1.0 / (v * v));
                }
            }
            throw EvalError("unknown function");
        }
    }
    throw EvalError("corrupt expression node");
}

inline double eval_node_value(const Node& n, const Point& p) {
    switch (n.kind) {
        case NodeKind::Num: return n.num;
        case NodeKind::VarX: return p.x[n.index];
        case NodeKind::VarY: return p.y[n.index];
        case NodeKind::Add: return eval_node_value(*n.a, p) + eval_node_value(*n.b, p);
        case NodeKind::Sub: return eval_node_value(*n.a, p) - eval_node_value(*n.b, p);
        case NodeKind::Neg: return -eval_node_value(*n.a, p);
        case NodeKind::Mul: return eval_node_value(*n.a, p) * eval_node_value(*n.b, p);
        case NodeKind::Div: {
            double b = eval_node_value(*n.b, p);
            if (b == 0.0) throw EvalError("division by zero in '" + to_string(n.b) + "'");
            return eval_node_value(*n.a, p) / b;
        }
        case NodeKind::Pow: {
            double a = eval_node_value(*n.a, p);
            long k;
            if (literal_int_exponent(n.b, k)) return std::pow(a, static_cast<double>(k));
            if (a <= 0.0)
                throw EvalError("non-positive base for non-integer power in '" +
                                to_string(n.a) + "'");
            return std::pow(a, eval_node_value(*n.b, p));
        }
        case NodeKind::Call: {
            double v = eval_node_value(*n.a, p);
            switch (n.func) {
                case Func::Sqrt:
                    if (v <= 0.0)
                        throw EvalError("sqrt of non-positive value in '" + to_string(n.a) + "'");
                    return std::sqrt(v);
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Exp: return std::exp(v);
                case Func::Log:
                    if (v <= 0.0)
                        throw EvalError("log of non-positive value in '" + to_string(n.a) + "'");
                    return std::log(v);
            }
            throw EvalError("unknown function");
        }
    }
    throw EvalError("corrupt expression node");
}

// d/d(var) of the AST, as a new AST. Used to build derivative fields once;
// no simplification is performed.
inline NodePtr diff_node(const NodePtr& n, NodeKind var, int index) {
    switch (n->kind) {
        case NodeKind::Num: return make_num(0.0);
        case NodeKind::VarX:
            return make_num(var == NodeKind::VarX && n->index == index ? 1.0 : 0.0);
        case NodeKind::VarY:
            return make_num(var == NodeKind::VarY && n->index == index ? 1.0 : 0.0);
        case NodeKind::Add:
            return make_binary(NodeKind::Add, diff_node(n->a, var, index),
                               diff_node(n->b, var, index));
        case NodeKind::Sub:
            return make_binary(NodeKind::Sub, diff_node(n->a, var, index),
                               diff_node(n->b, var, index));
        case NodeKind::Neg: return make_unary(NodeKind::Neg, diff_node(n->a, var, index));
        case NodeKind::Mul:
            return make_binary(
                NodeKind::Add,
                make_binary(NodeKind::Mul, diff_node(n->a, var, index), n->b),
                make_binary(NodeKind::Mul, n->a, diff_node(n->b, var, index)));
        case NodeKind::Div:
            // (a'b - ab') / b^2
            return make_binary(
                NodeKind::Div,
                make_binary(NodeKind::Sub,
                            make_binary(NodeKind::Mul, diff_node(n->a, var, index), n->b),
                            make_binary(NodeKind::Mul, n->a, diff_node(n->b, var, index))),
                make_binary(NodeKind::Pow, n->b, make_num(2.0)));
        case NodeKind::Pow: {
            long k;
            if (literal_int_exponent(n->b, k)) {
                // k * a^(k-1) * a'
                return make_binary(
                    NodeKind::Mul,
                    make_binary(NodeKind::Mul, make_num(static_cast<double>(k)),
                                make_binary(NodeKind::Pow, n->a,
                                            make_num(static_cast<double>(k - 1)))),
                    diff_node(n->a, var, index));
            }
            // a^e * (e' log a + e a'/a)
            return make_binary(
                NodeKind::Mul, std::make_shared<const Node>(*n),
                make_binary(NodeKind::Add,
                            make_binary(NodeKind::Mul, diff_node(n->b, var, index),
                                        make_call(Func::Log, n->a)),
                            make_binary(NodeKind::Mul, n->b,
                                        make_binary(NodeKind::Div, diff_node(n->a, var, index),
                                                    n->a))));
        }
        case NodeKind::Call: {
            NodePtr da = diff_node(n->a, var, index);
            switch (n->func) {
                case Func::Sqrt:
                    return make_binary(NodeKind::Div, da,
                                       make_binary(NodeKind::Mul, make_num(2.0),
                                                   make_call(Func::Sqrt, n->a)));
                case Func::Sin:
                    return make_binary(NodeKind::Mul, make_call(Func::Cos, n->a), da);
                case Func::Cos:
                    return make_unary(NodeKind::Neg,
                                      make_binary(NodeKind::Mul, make_call(Func::Sin, n->a), da));
                case Func::Exp:
                    return make_binary(NodeKind::Mul, make_call(Func::Exp, n->a), da);
                case Func::Log: return make_binary(NodeKind::Div, da, n->a);
            }
            throw EvalError("unknown function");
        }
    }
    throw EvalError("corrupt expression node");
}

}  // namespace detail

inline Jet2 eval_jet2(const ScalarField& f, const Point& p) {
    if (p.dim() != f.dim()) throw DimensionError("point dimension mismatch");
    Jet2 r = detail::eval_node(*f.root(), p);
    if (!r.finite()) throw EvalError("non-finite jet for '" + f.str() + "'");
    return r;
}

inline double eval_value(const ScalarField& f, const Point& p) {
    if (p.dim() != f.dim()) throw DimensionError("point dimension mismatch");
    double v = detail::eval_node_value(*f.root(), p);
    if (!std::isfinite(v)) throw EvalError("non-finite value for '" + f.str() + "'");
    return v;
}

// C(f) - deg*f, with C = y^i d/dy^i the Euler operator. Zero iff f is
// `deg`-homogeneous in y at p.
inline double euler_residual(const ScalarField& f, const Point& p, double deg) {
    Jet2 j = eval_jet2(f, p);
    double c = 0.0;
    for (int i = 0; i < f.dim(); ++i) c += p.y[i] * j.dy(i);
    return c - deg * j.value();
}

// AST combinators: used to assemble derived fields (Lagrangians from forms,
// spray coefficients from matrix data, monomial bases).
inline ScalarField field_const(double v, int dim) {
    return ScalarField(dim, detail::make_num(v));
}
inline ScalarField field_x(int i, int dim) {
    return ScalarField(dim, detail::make_var(detail::NodeKind::VarX, i));
}
inline ScalarField field_y(int i, int dim) {
    return ScalarField(dim, detail::make_var(detail::NodeKind::VarY, i));
}
inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    return ScalarField(a.dim(), detail::make_binary(detail::NodeKind::Add, a.root(), b.root()));
}
inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    return ScalarField(a.dim(), detail::make_binary(detail::NodeKind::Sub, a.root(), b.root()));
}
inline ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return ScalarField(a.dim(), detail::make_binary(detail::NodeKind::Mul, a.root(), b.root()));
}
inline ScalarField operator/(const ScalarField& a, const ScalarField& b) {
    return ScalarField(a.dim(), detail::make_binary(detail::NodeKind::Div, a.root(), b.root()));
}
inline ScalarField operator*(double s, const ScalarField& a) {
    return field_const(s, a.dim()) * a;
}
inline ScalarField operator-(const ScalarField& a) {
    return ScalarField(a.dim(), detail::make_unary(detail::NodeKind::Neg, a.root()));
}

// Derivative field d f / d x^i or d f / d y^i, built once by forward
// differentiation of the AST.
inline ScalarField derivative_field_x(const ScalarField& f, int i) {
    return ScalarField(f.dim(), detail::diff_node(f.root(), detail::NodeKind::VarX, i));
}
inline ScalarField derivative_field_y(const ScalarField& f, int i) {
    return ScalarField(f.dim(), detail::diff_node(f.root(), detail::NodeKind::VarY, i));
}

inline ScalarField reparse(const ScalarField& f) { return parse_scalar_field(f.str(), f.dim()); }

}  // namespace hlab

#endif  // HLAB_EXPR_HPP
