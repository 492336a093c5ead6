#include "nambu/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nambu {
namespace detail {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Node {
    Kind kind;
    double value = 0.0; // Const
    int index = -1;     // Var, 0-based
    NodePtr a, b;
};

namespace {

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr lit(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == Kind::Const && n->value == v;
}

double eval_node(const Node& n, const State& x);

double eval_call(const Node& n, double a) {
    switch (n.kind) {
    case Kind::Sin: return std::sin(a);
    case Kind::Cos: return std::cos(a);
    case Kind::Exp: return std::exp(a);
    case Kind::Log:
        if (a <= 0.0) throw EvalError("log of non-positive value " + std::to_string(a));
        return std::log(a);
    case Kind::Sqrt:
        if (a < 0.0) throw EvalError("sqrt of negative value " + std::to_string(a));
        return std::sqrt(a);
    default: break;
    }
    throw EvalError("bad call node");
}

double eval_node(const Node& n, const State& x) {
    switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var:
        if (n.index < 0 || static_cast<std::size_t>(n.index) >= x.size())
            throw EvalError("coordinate index out of range");
        return x[static_cast<std::size_t>(n.index)];
    case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Kind::Div: {
        double num = eval_node(*n.a, x);
        double den = eval_node(*n.b, x);
        if (den == 0.0) throw EvalError("division by zero");
        return num / den;
    }
    case Kind::Neg: return -eval_node(*n.a, x);
    case Kind::Pow: {
        double base = eval_node(*n.a, x);
        double expo = eval_node(*n.b, x);
        if (base == 0.0 && expo < 0.0) throw EvalError("zero raised to negative power");
        if (base < 0.0 && expo != std::floor(expo))
            throw EvalError("negative base with non-integer exponent");
        return std::pow(base, expo);
    }
    default: return eval_call(n, eval_node(*n.a, x));
    }
}

// Smart constructors with the basic simplifications (constant folding,
// 0*a -> 0, 1*a -> a, a+0 -> a, double negation). Folding is skipped when it
// would raise a domain error so that eval() still reports it.
bool foldable(Kind k, double a, double b, double* out) {
    switch (k) {
    case Kind::Add: *out = a + b; return true;
    case Kind::Sub: *out = a - b; return true;
    case Kind::Mul: *out = a * b; return true;
    case Kind::Div:
        if (b == 0.0) return false;
        *out = a / b;
        return true;
    case Kind::Pow:
        if (a == 0.0 && b < 0.0) return false;
        if (a < 0.0 && b != std::floor(b)) return false;
        *out = std::pow(a, b);
        return true;
    default: return false;
    }
}

NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr neg(NodePtr a);
NodePtr pow_(NodePtr a, NodePtr b);

NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    double v;
    if (a->kind == Kind::Const && b->kind == Kind::Const && foldable(Kind::Add, a->value, b->value, &v))
        return lit(v);
    return make(Kind::Add, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    double v;
    if (a->kind == Kind::Const && b->kind == Kind::Const && foldable(Kind::Sub, a->value, b->value, &v))
        return lit(v);
    return make(Kind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return lit(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    double v;
    if (a->kind == Kind::Const && b->kind == Kind::Const && foldable(Kind::Mul, a->value, b->value, &v))
        return lit(v);
    return make(Kind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    double v;
    if (a->kind == Kind::Const && b->kind == Kind::Const && foldable(Kind::Div, a->value, b->value, &v))
        return lit(v);
    return make(Kind::Div, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (a->kind == Kind::Const) return lit(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    return make(Kind::Neg, std::move(a));
}

NodePtr pow_(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(b, 0.0)) return lit(1.0);
    double v;
    if (a->kind == Kind::Const && b->kind == Kind::Const && foldable(Kind::Pow, a->value, b->value, &v))
        return lit(v);
    return make(Kind::Pow, std::move(a), std::move(b));
}

NodePtr diff_node(const NodePtr& n, int i) {
    switch (n->kind) {
    case Kind::Const: return lit(0.0);
    case Kind::Var: return lit(n->index == i ? 1.0 : 0.0);
    case Kind::Add: return add(diff_node(n->a, i), diff_node(n->b, i));
    case Kind::Sub: return sub(diff_node(n->a, i), diff_node(n->b, i));
    case Kind::Mul:
        return add(mul(diff_node(n->a, i), n->b), mul(n->a, diff_node(n->b, i)));
    case Kind::Div:
        // (a/b)' = (a'b - a b') / b^2
        return div(sub(mul(diff_node(n->a, i), n->b), mul(n->a, diff_node(n->b, i))),
                   mul(n->b, n->b));
    case Kind::Neg: return neg(diff_node(n->a, i));
    case Kind::Pow: {
        if (n->b->kind == Kind::Const) {
            // power rule, exact for constant exponents
            double c = n->b->value;
            return mul(mul(lit(c), pow_(n->a, lit(c - 1.0))), diff_node(n->a, i));
        }
        // a^b = exp(b log a):  (a^b)' = a^b (b' log a + b a'/a)
        NodePtr rewritten = make(Kind::Exp, mul(n->b, make(Kind::Log, n->a)));
        return mul(rewritten,
                   add(mul(diff_node(n->b, i), make(Kind::Log, n->a)),
                       div(mul(n->b, diff_node(n->a, i)), n->a)));
    }
    case Kind::Sin: return mul(make(Kind::Cos, n->a), diff_node(n->a, i));
    case Kind::Cos: return neg(mul(make(Kind::Sin, n->a), diff_node(n->a, i)));
    case Kind::Exp: return mul(make(Kind::Exp, n->a), diff_node(n->a, i));
    case Kind::Log: return div(diff_node(n->a, i), n->a);
    case Kind::Sqrt:
        return div(diff_node(n->a, i), mul(lit(2.0), make(Kind::Sqrt, n->a)));
    }
    throw EvalError("bad node kind in diff");
}

// Printing with minimal parentheses. Precedence: + - (1), * / (2),
// unary - (3), ^ (4), atoms (5).
int prec(const Node& n) {
    switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
    }
}

void print_node(std::ostream& os, const Node& n, int parent_prec);

void print_child(std::ostream& os, const Node& n, int min_prec) {
    bool parens = prec(n) < min_prec;
    if (parens) os << '(';
    print_node(os, n, min_prec);
    if (parens) os << ')';
}

void print_node(std::ostream& os, const Node& n, int) {
    switch (n.kind) {
    case Kind::Const: {
        char buf[40];
        if (n.value < 0) {
            std::snprintf(buf, sizeof buf, "(%.17g)", n.value);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
        }
        os << buf;
        return;
    }
    case Kind::Var: os << 'x' << (n.index + 1); return;
    case Kind::Add:
        print_child(os, *n.a, 1);
        os << " + ";
        print_child(os, *n.b, 2);
        return;
    case Kind::Sub:
        print_child(os, *n.a, 1);
        os << " - ";
        print_child(os, *n.b, 2);
        return;
    case Kind::Mul:
        print_child(os, *n.a, 2);
        os << '*';
        print_child(os, *n.b, 3);
        return;
    case Kind::Div:
        print_child(os, *n.a, 2);
        os << '/';
        print_child(os, *n.b, 5); // denominator always tight
        return;
    case Kind::Neg:
        os << '-';
        print_child(os, *n.a, 3);
        return;
    case Kind::Pow:
        print_child(os, *n.a, 5);
        os << '^';
        print_child(os, *n.b, 4); // right-associative
        return;
    case Kind::Sin: os << "sin("; print_node(os, *n.a, 0); os << ')'; return;
    case Kind::Cos: os << "cos("; print_node(os, *n.a, 0); os << ')'; return;
    case Kind::Exp: os << "exp("; print_node(os, *n.a, 0); os << ')'; return;
    case Kind::Log: os << "log("; print_node(os, *n.a, 0); os << ')'; return;
    case Kind::Sqrt: os << "sqrt("; print_node(os, *n.a, 0); os << ')'; return;
    }
}

// ---- recursive descent parser -------------------------------------------
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' unary)?          (right-associative exponent)
//   base   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' binds tighter than unary minus: "-x1^2" is -(x1^2).

class Parser {
public:
    Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    int dim_;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (eat('+')) e = add(e, term());
            else if (eat('-')) e = sub(e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (eat('*')) e = mul(e, unary());
            else if (eat('/')) e = div(e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (eat('-')) return neg(unary());
        return factor();
    }

    NodePtr factor() {
        NodePtr b = base();
        if (eat('^')) return pow_(b, unary());
        return b;
    }

    NodePtr base() {
        char c = peek();
        if (c == '(') {
            eat('(');
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        fail(pos_ >= s_.size() ? "unexpected end of input" : "unexpected character");
    }

    NodePtr number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // 'e' was not an exponent
            }
        }
        std::string tok(s_.substr(start, pos_ - start));
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return lit(v);
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number");
        }
    }

    NodePtr ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name(s_.substr(start, pos_ - start));

        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            long idx = std::stol(name.substr(1));
            if (idx < 1 || idx > dim_) {
                pos_ = start;
                fail("variable " + name + " out of range for dimension " + std::to_string(dim_));
            }
            auto n = std::make_shared<Node>();
            n->kind = Kind::Var;
            n->index = static_cast<int>(idx - 1);
            return n;
        }

        Kind k;
        if (name == "sin") k = Kind::Sin;
        else if (name == "cos") k = Kind::Cos;
        else if (name == "exp") k = Kind::Exp;
        else if (name == "log") k = Kind::Log;
        else if (name == "sqrt") k = Kind::Sqrt;
        else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!eat('(')) fail("expected '(' after function name");
        NodePtr arg = expr();
        if (!eat(')')) fail("expected ')'");
        return make(k, std::move(arg));
    }
};

} // namespace
} // namespace detail

using detail::NodePtr;

ScalarField ScalarField::constant(double value, int dim) {
    return ScalarField(detail::lit(value), dim);
}

ScalarField ScalarField::coordinate(int index, int dim) {
    if (index < 0 || index >= dim)
        throw std::invalid_argument("coordinate index out of range");
    auto n = std::make_shared<detail::Node>();
    n->kind = detail::Kind::Var;
    n->index = index;
    return ScalarField(std::move(n), dim);
}

double ScalarField::eval(const State& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw EvalError("state dimension mismatch: expected " + std::to_string(dim_) +
                        ", got " + std::to_string(x.size()));
    return detail::eval_node(*root_, x);
}

ScalarField ScalarField::diff(int i) const {
    if (i < 0 || i >= dim_) throw std::invalid_argument("diff index out of range");
    return ScalarField(detail::diff_node(root_, i), dim_);
}

std::string ScalarField::str() const {
    std::ostringstream os;
    detail::print_node(os, *root_, 0);
    return os.str();
}

bool ScalarField::is_constant(double* value) const {
    if (root_->kind != detail::Kind::Const) return false;
    if (value) *value = root_->value;
    return true;
}

static int join_dim(int da, int db) {
    // constants carry dim 0 and adopt the partner's dimension
    if (da == db) return da;
    if (da == 0) return db;
    if (db == 0) return da;
    throw std::invalid_argument("scalar field dimension mismatch");
}

#define NAMBU_BINOP(op, fn)                                                          \
    ScalarField operator op(const ScalarField& a, const ScalarField& b) {            \
        return ScalarField(detail::fn(a.root_, b.root_), join_dim(a.dim_, b.dim_));  \
    }

NAMBU_BINOP(+, add)
NAMBU_BINOP(-, sub)
NAMBU_BINOP(*, mul)
NAMBU_BINOP(/, div)
#undef NAMBU_BINOP

ScalarField operator-(const ScalarField& a) { return ScalarField(detail::neg(a.root_), a.dim_); }

ScalarField operator*(double c, const ScalarField& a) {
    return ScalarField::constant(c, a.dim()) * a;
}

ScalarField ScalarField::pow(const ScalarField& base, const ScalarField& exponent) {
    return ScalarField(detail::pow_(base.root_, exponent.root_),
                       join_dim(base.dim_, exponent.dim_));
}

#define NAMBU_CALL(name, kind)                                                       \
    ScalarField ScalarField::name(const ScalarField& a) {                            \
        return ScalarField(detail::make(detail::Kind::kind, a.root_), a.dim_);       \
    }

NAMBU_CALL(sin, Sin)
NAMBU_CALL(cos, Cos)
NAMBU_CALL(exp, Exp)
NAMBU_CALL(log, Log)
NAMBU_CALL(sqrt, Sqrt)
#undef NAMBU_CALL

ScalarField parse_field(std::string_view text, int dim) {
    detail::Parser p(text, dim);
    return ScalarField(p.run(), dim);
}

std::vector<double> gradient(const ScalarField& f, const State& x) {
    std::vector<double> g(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i) g[static_cast<std::size_t>(i)] = f.diff(i).eval(x);
    return g;
}

ScalarField random_polynomial(int dim, int degree, Rng& rng) {
    // sparse: a constant term plus a handful of random monomials; keeps the
    // ASTs of nested brackets at a workable size
    ScalarField result = ScalarField::constant(rng.uniform(-1.0, 1.0), dim);
    int terms = 3 + static_cast<int>(rng.next_below(4));
    for (int t = 0; t < terms; ++t) {
        int d = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(degree)));
        ScalarField mono = ScalarField::constant(rng.uniform(-1.0, 1.0), dim);
        for (int r = 0; r < d; ++r) {
            int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dim)));
            mono = mono * ScalarField::coordinate(i, dim);
        }
        result = result + mono;
    }
    return result;
}

} // namespace nambu
