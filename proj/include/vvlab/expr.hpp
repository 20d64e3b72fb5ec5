#pragma once

// Closed-form scalar expressions over the coordinates x, y and the parameter
// lambda. Grammar: + - * / ^, unary minus, sin cos exp, numeric literals,
// the constant pi and caller-supplied named parameters. Expressions are
// parsed once into a tree, differentiated symbolically where a caller needs
// gradients or Jacobians, and compiled to a flat stack program for the
// per-node evaluation loops.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vvlab/mesh.hpp"

namespace vvlab {

enum class Var { X = 0, Y = 1, Lambda = 2 };

using ParamMap = std::map<std::string, double>;

struct ExprNode;

class Expr {
public:
    Expr();  // constant zero
    static Expr constant(double v);
    static Expr variable(Var v);

    /// Throws PreconditionError with a column diagnostic on malformed input.
    static Expr parse(std::string_view text, const ParamMap& params = {});

    Expr derivative(Var v) const;
    double evaluate(double x, double y, double lambda = 0.0) const;

    bool is_constant() const;
    bool depends_on(Var v) const;
    std::string to_string() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, const Expr& b);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr exp(const Expr& a);

    const std::shared_ptr<const ExprNode>& node() const { return node_; }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

/// Flat postfix program for fast repeated evaluation.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);

    double operator()(double x, double y, double lambda = 0.0) const;
    double operator()(const Point& p, double lambda = 0.0) const { return (*this)(p[0], p[1], lambda); }

private:
    enum class Op : unsigned char { Const, X, Y, Lambda, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
    struct Instr {
        Op op;
        double value;
    };
    void emit(const ExprNode& n);
    std::vector<Instr> code_{{Op::Const, 0.0}};
    std::size_t depth_ = 1;
};

/// Expression together with its compiled gradient, Laplacian and lambda
/// derivative. Used for potentials, coefficients and Lyapunov functions.
class ScalarFunction {
public:
    ScalarFunction() : ScalarFunction(Expr{}) {}
    explicit ScalarFunction(Expr e);
    static ScalarFunction parse(std::string_view text, const ParamMap& params = {});

    double operator()(const Point& p, double lambda = 0.0) const { return f_(p, lambda); }
    Point gradient(const Point& p, double lambda = 0.0) const;
    /// Flat Laplacian sum d^2/dx_i^2 (the analyst's sign, not the positive operator).
    double flat_laplacian(const Point& p, double lambda = 0.0) const;
    double d_lambda(const Point& p, double lambda = 0.0) const { return dl_(p, lambda); }

    const Expr& expr() const { return e_; }
    bool depends_on_lambda() const { return e_.depends_on(Var::Lambda); }
    std::string text() const { return e_.to_string(); }

private:
    Expr e_;
    CompiledExpr f_, dx_, dy_, dxx_, dyy_, dl_;
};

}  // namespace vvlab
