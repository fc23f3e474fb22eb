#ifndef ADVSEL_EXPR_HPP
#define ADVSEL_EXPR_HPP

// Arithmetic expressions in one variable `x`: parsing, evaluation,
// symbolic differentiation, printing.
//
// Grammar (infix, left-associative except ^ which is right-associative):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?
//   unary   := ('-'|'+') unary | primary
//   primary := number | 'x' | ident '(' args ')' | '(' expr ')'
// Functions: exp, ln, sin, cos, sqrt, abs, pow(a,b), ind(a,b).
// ind(a,b) is the indicator of the open interval (a,b) with closed/open
// end flags settable via ind(a,b) defaulting to half-open [a,b) semantics
// being irrelevant on a null set; we evaluate 1 for a < x < b and at the
// endpoints use closed ends (value 1 at x==a and x==b keeps suprema
// attained on compact supports).

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace advsel {

struct ExprError : std::runtime_error {
    std::size_t offset; // byte offset into the source text
    ExprError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

// Raised when evaluation hits a domain fault (ln of non-positive, x/0, ...).
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

enum class NodeKind : std::uint8_t {
    Const, Var,
    Neg, Exp, Ln, Sin, Cos, Sqrt, Abs,
    Add, Sub, Mul, Div, Pow,
    Ind, // indicator of [lo, hi]
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;      // Const
    double lo = 0.0, hi = 0.0; // Ind
    NodePtr a, b;            // children

    explicit Node(NodeKind k) : kind(k) {}
};

inline NodePtr make_const(double v) {
    auto n = std::make_shared<Node>(NodeKind::Const);
    n->value = v;
    return n;
}

inline NodePtr make_var() { return std::make_shared<Node>(NodeKind::Var); }

inline NodePtr make_unary(NodeKind k, NodePtr a) {
    auto n = std::make_shared<Node>(k);
    n->a = std::move(a);
    return n;
}

inline NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>(k);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline NodePtr make_ind(double lo, double hi) {
    auto n = std::make_shared<Node>(NodeKind::Ind);
    n->lo = lo;
    n->hi = hi;
    return n;
}

inline bool is_const(const NodePtr& n, double v) {
    return n->kind == NodeKind::Const && n->value == v;
}

// Light simplification so derivatives stay readable and cheap to evaluate.
inline NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return make_const(a->value + b->value);
    return make_binary(NodeKind::Add, std::move(a), std::move(b));
}
inline NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return make_const(a->value - b->value);
    if (is_const(a, 0)) return make_unary(NodeKind::Neg, std::move(b));
    return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}
inline NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const)
        return make_const(a->value * b->value);
    return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}
inline NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return make_const(0);
    if (is_const(b, 1)) return a;
    return make_binary(NodeKind::Div, std::move(a), std::move(b));
}
inline NodePtr neg(NodePtr a) {
    if (a->kind == NodeKind::Const) return make_const(-a->value);
    return make_unary(NodeKind::Neg, std::move(a));
}

inline double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case NodeKind::Const: return n.value;
        case NodeKind::Var: return x;
        case NodeKind::Neg: return -eval_node(*n.a, x);
        case NodeKind::Exp: return std::exp(eval_node(*n.a, x));
        case NodeKind::Ln: {
            double v = eval_node(*n.a, x);
            if (!(v > 0)) throw EvalError("ln of non-positive value");
            return std::log(v);
        }
        case NodeKind::Sin: return std::sin(eval_node(*n.a, x));
        case NodeKind::Cos: return std::cos(eval_node(*n.a, x));
        case NodeKind::Sqrt: {
            double v = eval_node(*n.a, x);
            if (v < 0) throw EvalError("sqrt of negative value");
            return std::sqrt(v);
        }
        case NodeKind::Abs: return std::abs(eval_node(*n.a, x));
        case NodeKind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case NodeKind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case NodeKind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case NodeKind::Div: {
            double d = eval_node(*n.b, x);
            if (d == 0.0) throw EvalError("division by zero");
            return eval_node(*n.a, x) / d;
        }
        case NodeKind::Pow: {
            double base = eval_node(*n.a, x);
            double ex = eval_node(*n.b, x);
            double v = std::pow(base, ex);
            if (!std::isfinite(v)) throw EvalError("pow produced a non-finite value");
            return v;
        }
        case NodeKind::Ind: return (x >= n.lo && x <= n.hi) ? 1.0 : 0.0;
    }
    throw EvalError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n); // forward

inline NodePtr diff_node(const NodePtr& n) {
    using K = NodeKind;
    switch (n->kind) {
        case K::Const: return make_const(0);
        case K::Var: return make_const(1);
        case K::Neg: return neg(diff_node(n->a));
        case K::Exp: return mul(make_unary(K::Exp, n->a), diff_node(n->a));
        case K::Ln: return div(diff_node(n->a), n->a);
        case K::Sin: return mul(make_unary(K::Cos, n->a), diff_node(n->a));
        case K::Cos: return neg(mul(make_unary(K::Sin, n->a), diff_node(n->a)));
        case K::Sqrt:
            return div(diff_node(n->a), mul(make_const(2), make_unary(K::Sqrt, n->a)));
        case K::Abs:
            // d|u|/dx = sign(u) u' = u/|u| u'; a removable fault at u = 0.
            return mul(div(n->a, make_unary(K::Abs, n->a)), diff_node(n->a));
        case K::Add: return add(diff_node(n->a), diff_node(n->b));
        case K::Sub: return sub(diff_node(n->a), diff_node(n->b));
        case K::Mul:
            return add(mul(diff_node(n->a), n->b), mul(n->a, diff_node(n->b)));
        case K::Div:
            return div(sub(mul(diff_node(n->a), n->b), mul(n->a, diff_node(n->b))),
                       mul(n->b, n->b));
        case K::Pow: {
            if (n->b->kind == K::Const) {
                double p = n->b->value;
                return mul(mul(make_const(p), make_binary(K::Pow, n->a, make_const(p - 1))),
                           diff_node(n->a));
            }
            // a^b = exp(b ln a): (a^b)' = a^b (b' ln a + b a'/a)
            auto self = make_binary(K::Pow, n->a, n->b);
            auto t1 = mul(diff_node(n->b), make_unary(K::Ln, n->a));
            auto t2 = div(mul(n->b, diff_node(n->a)), n->a);
            return mul(self, add(t1, t2));
        }
        case K::Ind:
            // Constant away from the interval endpoints; the endpoint jump
            // is a null set for every quadrature in this library.
            return make_const(0);
    }
    throw EvalError("corrupt expression node");
}

inline void print_node(const Node& n, std::string& out) {
    using K = NodeKind;
    auto paren = [&](const Node& c) {
        out += '(';
        print_node(c, out);
        out += ')';
    };
    switch (n.kind) {
        case K::Const: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case K::Var: out += 'x'; return;
        case K::Neg: out += "-"; paren(*n.a); return;
        case K::Exp: out += "exp"; paren(*n.a); return;
        case K::Ln: out += "ln"; paren(*n.a); return;
        case K::Sin: out += "sin"; paren(*n.a); return;
        case K::Cos: out += "cos"; paren(*n.a); return;
        case K::Sqrt: out += "sqrt"; paren(*n.a); return;
        case K::Abs: out += "abs"; paren(*n.a); return;
        case K::Add: paren(*n.a); out += " + "; paren(*n.b); return;
        case K::Sub: paren(*n.a); out += " - "; paren(*n.b); return;
        case K::Mul: paren(*n.a); out += "*"; paren(*n.b); return;
        case K::Div: paren(*n.a); out += "/"; paren(*n.b); return;
        case K::Pow: paren(*n.a); out += "^"; paren(*n.b); return;
        case K::Ind: {
            char buf[80];
            std::snprintf(buf, sizeof buf, "ind(%.17g,%.17g)", n.lo, n.hi);
            out += buf;
            return;
        }
    }
}

} // namespace detail

class Expr {
public:
    Expr() : root_(detail::make_const(0)) {}
    explicit Expr(detail::NodePtr root) : root_(std::move(root)) {}

    static Expr constant(double v) { return Expr(detail::make_const(v)); }
    static Expr variable() { return Expr(detail::make_var()); }

    double operator()(double x) const { return detail::eval_node(*root_, x); }

    // Evaluation that maps domain faults to NaN instead of throwing;
    // used by samplers that probe outside the guaranteed domain.
    double eval_or_nan(double x) const noexcept {
        try {
            return (*this)(x);
        } catch (const EvalError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }

    Expr derivative() const { return Expr(detail::diff_node(root_)); }

    std::string str() const {
        std::string out;
        detail::print_node(*root_, out);
        return out;
    }

    friend Expr operator+(const Expr& a, const Expr& b) { return Expr(detail::add(a.root_, b.root_)); }
    friend Expr operator-(const Expr& a, const Expr& b) { return Expr(detail::sub(a.root_, b.root_)); }
    friend Expr operator*(const Expr& a, const Expr& b) { return Expr(detail::mul(a.root_, b.root_)); }
    friend Expr operator-(const Expr& a) { return Expr(detail::neg(a.root_)); }

    const detail::NodePtr& root() const { return root_; }

private:
    detail::NodePtr root_;
};

namespace detail {

struct Parser {
    const std::string& src;
    std::size_t pos = 0;

    explicit Parser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ExprError(msg, pos); }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (eat('+')) lhs = make_binary(NodeKind::Add, lhs, parse_term());
            else if (eat('-')) lhs = make_binary(NodeKind::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (eat('*')) lhs = make_binary(NodeKind::Mul, lhs, parse_factor());
            else if (eat('/')) lhs = make_binary(NodeKind::Div, lhs, parse_factor());
            else return lhs;
        }
    }

    NodePtr parse_factor() { return parse_unary(); }

    // '^' binds tighter than unary minus, so -x^2 is -(x^2); the exponent
    // itself may be signed (2^-3).
    NodePtr parse_unary() {
        skip_ws();
        if (eat('-')) return make_unary(NodeKind::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_ws();
        if (eat('^')) return make_binary(NodeKind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= src.size()) fail("unexpected end of expression");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        std::size_t start = pos;
        const char* begin = src.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<std::size_t>(end - begin);
        (void)start;
        return make_const(v);
    }

    double parse_const_arg() {
        // ind() bounds must be numeric constants (possibly signed).
        NodePtr e = parse_expr();
        if (e->kind == NodeKind::Const) return e->value;
        if (e->kind == NodeKind::Neg && e->a->kind == NodeKind::Const) return -e->a->value;
        // Allow constant-folding of simple arithmetic: evaluate with no x.
        try {
            double v = eval_node(*e, std::numeric_limits<double>::quiet_NaN());
            if (std::isfinite(v)) return v;
        } catch (...) {
        }
        fail("ind() bounds must be constants");
    }

    NodePtr parse_ident() {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        std::string name = src.substr(start, pos - start);
        if (name == "x") return make_var();

        skip_ws();
        if (!eat('(')) {
            pos = start;
            fail("unknown identifier '" + name + "'");
        }
        if (name == "ind") {
            double lo = parse_const_arg();
            if (!eat(',')) fail("expected ',' in ind(a,b)");
            double hi = parse_const_arg();
            if (!eat(')')) fail("expected ')'");
            if (!(lo < hi)) fail("ind(a,b) requires a < b");
            return make_ind(lo, hi);
        }
        if (name == "pow") {
            NodePtr a = parse_expr();
            if (!eat(',')) fail("expected ',' in pow(a,b)");
            NodePtr b = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return make_binary(NodeKind::Pow, a, b);
        }
        NodeKind k;
        if (name == "exp") k = NodeKind::Exp;
        else if (name == "ln" || name == "log") k = NodeKind::Ln;
        else if (name == "sin") k = NodeKind::Sin;
        else if (name == "cos") k = NodeKind::Cos;
        else if (name == "sqrt") k = NodeKind::Sqrt;
        else if (name == "abs") k = NodeKind::Abs;
        else {
            pos = start;
            fail("unknown function '" + name + "'");
        }
        NodePtr a = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return make_unary(k, a);
    }
};

} // namespace detail

inline Expr parse_expression(const std::string& text) {
    detail::Parser p(text);
    detail::NodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ExprError("trailing characters after expression", p.pos);
    return Expr(std::move(root));
}

inline Expr differentiate(const Expr& e) { return e.derivative(); }

} // namespace advsel

#endif
