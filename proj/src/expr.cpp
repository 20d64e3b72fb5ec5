#include "vvlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vvlab/error.hpp"

namespace vvlab {

enum class Kind { Const, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

struct ExprNode {
    Kind kind;
    double value = 0.0;
    Var var = Var::X;
    std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = v;
    return n;
}

bool is_const(const NodePtr& n, double v)
{
    return n->kind == Kind::Const && n->value == v;
}

double eval_node(const ExprNode& n, const double vars[3])
{
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Variable: return vars[static_cast<int>(n.var)];
        case Kind::Add: return eval_node(*n.a, vars) + eval_node(*n.b, vars);
        case Kind::Sub: return eval_node(*n.a, vars) - eval_node(*n.b, vars);
        case Kind::Mul: return eval_node(*n.a, vars) * eval_node(*n.b, vars);
        case Kind::Div: return eval_node(*n.a, vars) / eval_node(*n.b, vars);
        case Kind::Pow: return std::pow(eval_node(*n.a, vars), eval_node(*n.b, vars));
        case Kind::Neg: return -eval_node(*n.a, vars);
        case Kind::Sin: return std::sin(eval_node(*n.a, vars));
        case Kind::Cos: return std::cos(eval_node(*n.a, vars));
        case Kind::Exp: return std::exp(eval_node(*n.a, vars));
    }
    return 0.0;
}

bool node_depends(const ExprNode& n, Var v)
{
    if (n.kind == Kind::Variable) return n.var == v;
    return (n.a && node_depends(*n.a, v)) || (n.b && node_depends(*n.b, v));
}

bool node_constant(const ExprNode& n)
{
    return !node_depends(n, Var::X) && !node_depends(n, Var::Y) && !node_depends(n, Var::Lambda);
}

void print(const ExprNode& n, std::ostream& os)
{
    switch (n.kind) {
        case Kind::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            os << tmp.str();
            return;
        }
        case Kind::Variable: os << (n.var == Var::X ? "x" : n.var == Var::Y ? "y" : "lambda"); return;
        case Kind::Neg: os << "(-"; print(*n.a, os); os << ")"; return;
        case Kind::Sin: os << "sin("; print(*n.a, os); os << ")"; return;
        case Kind::Cos: os << "cos("; print(*n.a, os); os << ")"; return;
        case Kind::Exp: os << "exp("; print(*n.a, os); os << ")"; return;
        default: break;
    }
    const char* op = n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-" : n.kind == Kind::Mul ? "*" : n.kind == Kind::Div ? "/" : "^";
    os << "(";
    print(*n.a, os);
    os << op;
    print(*n.b, os);
    os << ")";
}

// Recursive-descent parser.
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(std::string_view text, const ParamMap& params) : s_(text), params_(params) {}

    Expr run()
    {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw PreconditionError("expression '" + std::string(s_) + "' column " + std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr()
    {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = lhs + term();
            else if (accept('-')) lhs = lhs - term();
            else return lhs;
        }
    }

    Expr term()
    {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = lhs * unary();
            else if (accept('/')) lhs = lhs / unary();
            else return lhs;
        }
    }

    Expr unary()
    {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power()
    {
        Expr base = atom();
        if (accept('^')) return pow(base, unary());
        return base;
    }

    Expr atom()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number()
    {
        const std::string rest(s_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        return Expr::constant(v);
    }

    Expr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string name(s_.substr(start, pos_ - start));
        if (name == "sin" || name == "cos" || name == "exp") {
            if (!accept('(')) fail("expected '(' after " + name);
            Expr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return name == "sin" ? sin(arg) : name == "cos" ? cos(arg) : exp(arg);
        }
        if (name == "x") return Expr::variable(Var::X);
        if (name == "y") return Expr::variable(Var::Y);
        if (name == "lambda") return Expr::variable(Var::Lambda);
        if (name == "pi") return Expr::constant(std::numbers::pi);
        if (auto it = params_.find(name); it != params_.end()) return Expr::constant(it->second);
        pos_ = start;
        fail("unknown name '" + name + "'");
    }

    std::string_view s_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : node_(make_const(0.0)) {}

Expr Expr::constant(double v)
{
    return Expr(make_const(v));
}

Expr Expr::variable(Var v)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Variable;
    n->var = v;
    return Expr(std::move(n));
}

Expr Expr::parse(std::string_view text, const ParamMap& params)
{
    return Parser(text, params).run();
}

bool Expr::is_constant() const
{
    return node_constant(*node_);
}

bool Expr::depends_on(Var v) const
{
    return node_depends(*node_, v);
}

double Expr::evaluate(double x, double y, double lambda) const
{
    const double vars[3] = {x, y, lambda};
    return eval_node(*node_, vars);
}

std::string Expr::to_string() const
{
    std::ostringstream os;
    print(*node_, os);
    return os.str();
}

// Constructors fold constants and drop neutral elements so that repeated
// differentiation does not grow the tree without bound.

Expr operator+(const Expr& a, const Expr& b)
{
    if (is_const(a.node_, 0.0)) return b;
    if (is_const(b.node_, 0.0)) return a;
    if (a.node_->kind == Kind::Const && b.node_->kind == Kind::Const) return Expr::constant(a.node_->value + b.node_->value);
    return Expr(make(Kind::Add, a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (is_const(b.node_, 0.0)) return a;
    if (is_const(a.node_, 0.0)) return -b;
    if (a.node_->kind == Kind::Const && b.node_->kind == Kind::Const) return Expr::constant(a.node_->value - b.node_->value);
    return Expr(make(Kind::Sub, a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (is_const(a.node_, 0.0) || is_const(b.node_, 0.0)) return Expr::constant(0.0);
    if (is_const(a.node_, 1.0)) return b;
    if (is_const(b.node_, 1.0)) return a;
    if (a.node_->kind == Kind::Const && b.node_->kind == Kind::Const) return Expr::constant(a.node_->value * b.node_->value);
    return Expr(make(Kind::Mul, a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (is_const(a.node_, 0.0)) return Expr::constant(0.0);
    if (is_const(b.node_, 1.0)) return a;
    if (a.node_->kind == Kind::Const && b.node_->kind == Kind::Const) return Expr::constant(a.node_->value / b.node_->value);
    return Expr(make(Kind::Div, a.node_, b.node_));
}

Expr operator-(const Expr& a)
{
    if (a.node_->kind == Kind::Const) return Expr::constant(-a.node_->value);
    if (a.node_->kind == Kind::Neg) return Expr(a.node_->a);
    return Expr(make(Kind::Neg, a.node_));
}

Expr pow(const Expr& a, const Expr& b)
{
    if (is_const(b.node_, 0.0)) return Expr::constant(1.0);
    if (is_const(b.node_, 1.0)) return a;
    if (a.node_->kind == Kind::Const && b.node_->kind == Kind::Const)
        return Expr::constant(std::pow(a.node_->value, b.node_->value));
    return Expr(make(Kind::Pow, a.node_, b.node_));
}

Expr sin(const Expr& a)
{
    if (a.node_->kind == Kind::Const) return Expr::constant(std::sin(a.node_->value));
    return Expr(make(Kind::Sin, a.node_));
}

Expr cos(const Expr& a)
{
    if (a.node_->kind == Kind::Const) return Expr::constant(std::cos(a.node_->value));
    return Expr(make(Kind::Cos, a.node_));
}

Expr exp(const Expr& a)
{
    if (a.node_->kind == Kind::Const) return Expr::constant(std::exp(a.node_->value));
    return Expr(make(Kind::Exp, a.node_));
}

Expr Expr::derivative(Var v) const
{
    const ExprNode& n = *node_;
    const Expr a = n.a ? Expr(n.a) : Expr{};
    const Expr b = n.b ? Expr(n.b) : Expr{};
    switch (n.kind) {
        case Kind::Const: return constant(0.0);
        case Kind::Variable: return constant(n.var == v ? 1.0 : 0.0);
        case Kind::Add: return a.derivative(v) + b.derivative(v);
        case Kind::Sub: return a.derivative(v) - b.derivative(v);
        case Kind::Mul: return a.derivative(v) * b + a * b.derivative(v);
        case Kind::Div: return (a.derivative(v) * b - a * b.derivative(v)) / (b * b);
        case Kind::Neg: return -a.derivative(v);
        case Kind::Sin: return cos(a) * a.derivative(v);
        case Kind::Cos: return -(sin(a) * a.derivative(v));
        case Kind::Exp: return *this * a.derivative(v);
        case Kind::Pow: {
            if (!b.is_constant())
                throw PreconditionError("cannot differentiate '" + to_string() + "': exponent must be constant");
            return b * pow(a, b - constant(1.0)) * a.derivative(v);
        }
    }
    return constant(0.0);
}

CompiledExpr::CompiledExpr(const Expr& e)
{
    code_.clear();
    emit(*e.node());
    std::size_t d = 0;
    depth_ = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Const:
            case Op::X:
            case Op::Y:
            case Op::Lambda: ++d; break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
            case Op::Pow: --d; break;
            default: break;
        }
        depth_ = std::max(depth_, d);
    }
}

void CompiledExpr::emit(const ExprNode& n)
{
    switch (n.kind) {
        case Kind::Const: code_.push_back({Op::Const, n.value}); return;
        case Kind::Variable:
            code_.push_back({n.var == Var::X ? Op::X : n.var == Var::Y ? Op::Y : Op::Lambda, 0.0});
            return;
        case Kind::Neg: emit(*n.a); code_.push_back({Op::Neg, 0.0}); return;
        case Kind::Sin: emit(*n.a); code_.push_back({Op::Sin, 0.0}); return;
        case Kind::Cos: emit(*n.a); code_.push_back({Op::Cos, 0.0}); return;
        case Kind::Exp: emit(*n.a); code_.push_back({Op::Exp, 0.0}); return;
        default: break;
    }
    emit(*n.a);
    emit(*n.b);
    const Op op = n.kind == Kind::Add ? Op::Add : n.kind == Kind::Sub ? Op::Sub : n.kind == Kind::Mul ? Op::Mul : n.kind == Kind::Div ? Op::Div : Op::Pow;
    code_.push_back({op, 0.0});
}

double CompiledExpr::operator()(double x, double y, double lambda) const
{
    constexpr std::size_t kInline = 32;
    double inline_stack[kInline] = {};
    std::vector<double> heap;
    double* st = inline_stack;
    if (depth_ > kInline) {
        heap.resize(depth_);
        st = heap.data();
    }
    std::size_t sp = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
            case Op::Const: st[sp++] = ins.value; break;
            case Op::X: st[sp++] = x; break;
            case Op::Y: st[sp++] = y; break;
            case Op::Lambda: st[sp++] = lambda; break;
            case Op::Add: --sp; st[sp - 1] += st[sp]; break;
            case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
            case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
            case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
            case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
            case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
            case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
            case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        }
    }
    return st[0];
}

ScalarFunction::ScalarFunction(Expr e) : e_(std::move(e))
{
    const Expr dx = e_.derivative(Var::X);
    const Expr dy = e_.derivative(Var::Y);
    f_ = CompiledExpr(e_);
    dx_ = CompiledExpr(dx);
    dy_ = CompiledExpr(dy);
    dxx_ = CompiledExpr(dx.derivative(Var::X));
    dyy_ = CompiledExpr(dy.derivative(Var::Y));
    dl_ = CompiledExpr(e_.derivative(Var::Lambda));
}

ScalarFunction ScalarFunction::parse(std::string_view text, const ParamMap& params)
{
    return ScalarFunction(Expr::parse(text, params));
}

Point ScalarFunction::gradient(const Point& p, double lambda) const
{
    return {dx_(p, lambda), dy_(p, lambda)};
}

double ScalarFunction::flat_laplacian(const Point& p, double lambda) const
{
    return dxx_(p, lambda) + dyy_(p, lambda);
}

}  // namespace vvlab
