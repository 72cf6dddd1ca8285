#ifndef ALGLOC_EXPR_HPP
#define ALGLOC_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

#include "algloc/common.hpp"

namespace algloc {

// Process-wide interning of symbol names. Evaluation works on integer ids.
class SymbolTable {
public:
    static int intern(const std::string& name);
    static const std::string& name(int id);
    static int lookup(const std::string& name);  // -1 when absent
};

// Values for symbols during evaluation. Unbound symbols raise SymbolError.
class Bindings {
public:
    void set(int symbol, double value);
    void set(const std::string& name, double value) { set(SymbolTable::intern(name), value); }
    bool has(int symbol) const;
    double get(int symbol) const;
    void clear();

private:
    std::vector<double> values_;
    std::vector<char> bound_;
};

enum class ExprOp {
    Const, Symbol,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Exp, Sqrt,
};

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprOp op;
    double value = 0.0;   // Const
    int symbol = -1;      // Symbol
    int exponent = 0;     // Pow (integer exponents only)
    ExprNodePtr a, b;
};

// Immutable symbolic scalar: constants, symbols, arithmetic, sin/cos/exp/sqrt,
// integer powers. Construction folds constants and absorbs 0/1; no general
// simplification. Values are shareable across threads after construction.
class Expr {
public:
    Expr() : Expr(0.0) {}
    explicit Expr(double c);

    static Expr constant(double c) { return Expr(c); }
    static Expr symbol(int id);
    static Expr symbol(const std::string& name) { return symbol(SymbolTable::intern(name)); }

    bool is_constant() const { return node_->op == ExprOp::Const; }
    bool is_zero() const { return is_constant() && node_->value == 0.0; }
    bool is_one() const { return is_constant() && node_->value == 1.0; }
    double constant_value() const;

    double eval(const Bindings& bindings) const;
    Expr derivative(int symbol) const;
    Expr derivative(const std::string& name) const { return derivative(SymbolTable::intern(name)); }
    std::string str() const;

    // Structural equality (after construction-time folding).
    bool same_as(const Expr& other) const;

    // Number of nodes counting shared subtrees once.
    std::size_t size() const;

    const ExprNodePtr& node() const { return node_; }
    static Expr wrap(ExprNodePtr n) { Expr e(0.0); e.node_ = std::move(n); return e; }

private:
    ExprNodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr operator+(const Expr& a, double b) { return a + Expr(b); }
inline Expr operator+(double a, const Expr& b) { return Expr(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr(b); }
inline Expr operator-(double a, const Expr& b) { return Expr(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr(b); }
inline Expr operator*(double a, const Expr& b) { return Expr(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / Expr(b); }
inline Expr operator/(double a, const Expr& b) { return Expr(a) / b; }
Expr pow_int(const Expr& base, int exponent);
Expr sin(const Expr& x);
Expr cos(const Expr& x);
Expr exp(const Expr& x);
Expr sqrt(const Expr& x);

// Parses the expression grammar. Only the listed symbol names (plus the
// function names sin, cos, exp, sqrt) are accepted.
Expr parse_expr(const std::string& source, const std::vector<std::string>& allowed_symbols);
Expr parse_expr(const std::string& source, const std::vector<int>& allowed_symbols);

// Stack-machine form for hot evaluation loops (quadrature). Shared subtrees
// are evaluated once.
class CompiledExpr {
public:
    CompiledExpr() = default;
    explicit CompiledExpr(const Expr& e);
    double eval(const Bindings& bindings) const;

private:
    struct Instr {
        ExprOp op;
        int a = -1, b = -1;
        double value = 0.0;
        int symbol = -1;
        int exponent = 0;
    };
    std::vector<Instr> instrs_;
    mutable std::vector<double> slots_;
};

}  // namespace algloc

#endif
