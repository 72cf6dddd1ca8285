#include "algloc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace algloc {

namespace {

struct SymbolRegistry {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> ids;
    std::mutex mutex;

    static SymbolRegistry& instance() {
        static SymbolRegistry reg;
        return reg;
    }
};

}  // namespace

int SymbolTable::intern(const std::string& name) {
    auto& reg = SymbolRegistry::instance();
    std::lock_guard<std::mutex> lock(reg.mutex);
    auto it = reg.ids.find(name);
    if (it != reg.ids.end()) return it->second;
    int id = static_cast<int>(reg.names.size());
    reg.names.push_back(name);
    reg.ids.emplace(name, id);
    return id;
}

const std::string& SymbolTable::name(int id) {
    auto& reg = SymbolRegistry::instance();
    std::lock_guard<std::mutex> lock(reg.mutex);
    if (id < 0 || id >= static_cast<int>(reg.names.size()))
        throw SymbolError("unknown symbol id " + std::to_string(id));
    return reg.names[id];
}

int SymbolTable::lookup(const std::string& name) {
    auto& reg = SymbolRegistry::instance();
    std::lock_guard<std::mutex> lock(reg.mutex);
    auto it = reg.ids.find(name);
    return it == reg.ids.end() ? -1 : it->second;
}

void Bindings::set(int symbol, double value) {
    if (symbol < 0) throw SymbolError("invalid symbol id");
    if (symbol >= static_cast<int>(values_.size())) {
        values_.resize(symbol + 1, 0.0);
        bound_.resize(symbol + 1, 0);
    }
    values_[symbol] = value;
    bound_[symbol] = 1;
}

bool Bindings::has(int symbol) const {
    return symbol >= 0 && symbol < static_cast<int>(bound_.size()) && bound_[symbol];
}

double Bindings::get(int symbol) const {
    if (!has(symbol))
        throw SymbolError("unbound symbol '" + SymbolTable::name(symbol) + "'");
    return values_[symbol];
}

void Bindings::clear() {
    values_.clear();
    bound_.clear();
}

namespace {

ExprNodePtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprNodePtr make_const(double c) {
    ExprNode n;
    n.op = ExprOp::Const;
    n.value = c;
    return make_node(std::move(n));
}

double ipow(double base, int e) {
    if (e == 0) return 1.0;
    bool inv = e < 0;
    unsigned long long k = inv ? -static_cast<long long>(e) : e;
    double acc = 1.0, b = base;
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    if (inv) {
        if (acc == 0.0) throw EvalError("singular evaluation: zero raised to a negative power");
        return 1.0 / acc;
    }
    return acc;
}

}  // namespace

Expr::Expr(double c) : node_(make_const(c)) {}

Expr Expr::symbol(int id) {
    ExprNode n;
    n.op = ExprOp::Symbol;
    n.symbol = id;
    return wrap(make_node(std::move(n)));
}

double Expr::constant_value() const {
    if (!is_constant()) throw Error("expression is not a constant");
    return node_->value;
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
    ExprNode n;
    n.op = ExprOp::Add;
    n.a = a.node();
    n.b = b.node();
    return Expr::wrap(make_node(std::move(n)));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
    if (a.is_zero()) return -b;
    ExprNode n;
    n.op = ExprOp::Sub;
    n.a = a.node();
    n.b = b.node();
    return Expr::wrap(make_node(std::move(n)));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr(0.0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
    ExprNode n;
    n.op = ExprOp::Mul;
    n.a = a.node();
    n.b = b.node();
    return Expr::wrap(make_node(std::move(n)));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_one()) return a;
    if (a.is_zero() && !b.is_zero()) return Expr(0.0);
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
        return Expr(a.constant_value() / b.constant_value());
    ExprNode n;
    n.op = ExprOp::Div;
    n.a = a.node();
    n.b = b.node();
    return Expr::wrap(make_node(std::move(n)));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr(-a.constant_value());
    if (a.node()->op == ExprOp::Neg) return Expr::wrap(a.node()->a);
    ExprNode n;
    n.op = ExprOp::Neg;
    n.a = a.node();
    return Expr::wrap(make_node(std::move(n)));
}

Expr pow_int(const Expr& base, int exponent) {
    if (exponent == 0) return Expr(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) return Expr(ipow(base.constant_value(), exponent));
    ExprNode n;
    n.op = ExprOp::Pow;
    n.a = base.node();
    n.exponent = exponent;
    return Expr::wrap(make_node(std::move(n)));
}

namespace {

Expr unary(ExprOp op, const Expr& x) {
    if (x.is_constant()) {
        double v = x.constant_value();
        switch (op) {
            case ExprOp::Sin: return Expr(std::sin(v));
            case ExprOp::Cos: return Expr(std::cos(v));
            case ExprOp::Exp: return Expr(std::exp(v));
            case ExprOp::Sqrt:
                if (v < 0.0) throw EvalError("singular evaluation: sqrt of negative constant");
                return Expr(std::sqrt(v));
            default: break;
        }
    }
    ExprNode n;
    n.op = op;
    n.a = x.node();
    return Expr::wrap(make_node(std::move(n)));
}

}  // namespace

Expr sin(const Expr& x) { return unary(ExprOp::Sin, x); }
Expr cos(const Expr& x) { return unary(ExprOp::Cos, x); }
Expr exp(const Expr& x) { return unary(ExprOp::Exp, x); }
Expr sqrt(const Expr& x) { return unary(ExprOp::Sqrt, x); }

double Expr::eval(const Bindings& bindings) const {
    const ExprNode* n = node_.get();
    switch (n->op) {
        case ExprOp::Const: return n->value;
        case ExprOp::Symbol: return bindings.get(n->symbol);
        case ExprOp::Add: return wrap(n->a).eval(bindings) + wrap(n->b).eval(bindings);
        case ExprOp::Sub: return wrap(n->a).eval(bindings) - wrap(n->b).eval(bindings);
        case ExprOp::Mul: return wrap(n->a).eval(bindings) * wrap(n->b).eval(bindings);
        case ExprOp::Div: {
            double num = wrap(n->a).eval(bindings);
            double den = wrap(n->b).eval(bindings);
            if (den == 0.0) throw EvalError("singular evaluation: division by zero");
            return num / den;
        }
        case ExprOp::Pow: return ipow(wrap(n->a).eval(bindings), n->exponent);
        case ExprOp::Neg: return -wrap(n->a).eval(bindings);
        case ExprOp::Sin: return std::sin(wrap(n->a).eval(bindings));
        case ExprOp::Cos: return std::cos(wrap(n->a).eval(bindings));
        case ExprOp::Exp: return std::exp(wrap(n->a).eval(bindings));
        case ExprOp::Sqrt: {
            double v = wrap(n->a).eval(bindings);
            if (v < 0.0) throw EvalError("singular evaluation: sqrt of negative value");
            return std::sqrt(v);
        }
    }
    throw Error("corrupt expression node");
}

Expr Expr::derivative(int symbol) const {
    const ExprNode* n = node_.get();
    const Expr a = n->a ? wrap(n->a) : Expr(0.0);
    const Expr b = n->b ? wrap(n->b) : Expr(0.0);
    switch (n->op) {
        case ExprOp::Const: return Expr(0.0);
        case ExprOp::Symbol: return Expr(n->symbol == symbol ? 1.0 : 0.0);
        case ExprOp::Add: return a.derivative(symbol) + b.derivative(symbol);
        case ExprOp::Sub: return a.derivative(symbol) - b.derivative(symbol);
        case ExprOp::Mul: return a.derivative(symbol) * b + a * b.derivative(symbol);
        case ExprOp::Div:
            return (a.derivative(symbol) * b - a * b.derivative(symbol)) / (b * b);
        case ExprOp::Pow:
            return Expr(static_cast<double>(n->exponent)) * pow_int(a, n->exponent - 1) *
                   a.derivative(symbol);
        case ExprOp::Neg: return -a.derivative(symbol);
        case ExprOp::Sin: return cos(a) * a.derivative(symbol);
        case ExprOp::Cos: return -(sin(a) * a.derivative(symbol));
        case ExprOp::Exp: return exp(a) * a.derivative(symbol);
        case ExprOp::Sqrt: return a.derivative(symbol) / (Expr(2.0) * sqrt(a));
    }
    throw Error("corrupt expression node");
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Precedence levels: 0 add/sub, 1 mul/div, 2 unary minus, 3 pow, 4 atom.
void print_node(const ExprNode* n, std::string& out, int parent_level) {
    auto wrapped = [&](int level, auto&& body) {
        bool parens = level < parent_level;
        if (parens) out += '(';
        body();
        if (parens) out += ')';
    };
    switch (n->op) {
        case ExprOp::Const: {
            double v = n->value;
            if (v < 0.0) {
                wrapped(2, [&] {
                    out += '-';
                    out += format_double(-v);
                });
            } else {
                out += format_double(v);
            }
            return;
        }
        case ExprOp::Symbol: out += SymbolTable::name(n->symbol); return;
        case ExprOp::Add:
            wrapped(0, [&] {
                print_node(n->a.get(), out, 0);
                out += " + ";
                print_node(n->b.get(), out, 1);
            });
            return;
        case ExprOp::Sub:
            wrapped(0, [&] {
                print_node(n->a.get(), out, 0);
                out += " - ";
                print_node(n->b.get(), out, 1);
            });
            return;
        case ExprOp::Mul:
            wrapped(1, [&] {
                print_node(n->a.get(), out, 1);
                out += "*";
                print_node(n->b.get(), out, 2);
            });
            return;
        case ExprOp::Div:
            wrapped(1, [&] {
                print_node(n->a.get(), out, 1);
                out += "/";
                print_node(n->b.get(), out, 2);
            });
            return;
        case ExprOp::Neg:
            wrapped(2, [&] {
                out += '-';
                print_node(n->a.get(), out, 2);
            });
            return;
        case ExprOp::Pow:
            wrapped(3, [&] {
                print_node(n->a.get(), out, 4);
                out += '^';
                if (n->exponent < 0) {
                    out += '-';
                    out += std::to_string(-n->exponent);
                } else {
                    out += std::to_string(n->exponent);
                }
            });
            return;
        case ExprOp::Sin: out += "sin("; print_node(n->a.get(), out, 0); out += ')'; return;
        case ExprOp::Cos: out += "cos("; print_node(n->a.get(), out, 0); out += ')'; return;
        case ExprOp::Exp: out += "exp("; print_node(n->a.get(), out, 0); out += ')'; return;
        case ExprOp::Sqrt: out += "sqrt("; print_node(n->a.get(), out, 0); out += ')'; return;
    }
}

}  // namespace

std::string Expr::str() const {
    std::string out;
    print_node(node_.get(), out, 0);
    return out;
}

bool Expr::same_as(const Expr& other) const {
    const ExprNode* x = node_.get();
    const ExprNode* y = other.node_.get();
    if (x == y) return true;
    if (x->op != y->op || x->value != y->value || x->symbol != y->symbol ||
        x->exponent != y->exponent)
        return false;
    if (static_cast<bool>(x->a) != static_cast<bool>(y->a)) return false;
    if (static_cast<bool>(x->b) != static_cast<bool>(y->b)) return false;
    if (x->a && !wrap(x->a).same_as(wrap(y->a))) return false;
    if (x->b && !wrap(x->b).same_as(wrap(y->b))) return false;
    return true;
}

std::size_t Expr::size() const {
    std::unordered_set<const ExprNode*> seen;
    std::vector<const ExprNode*> stack{node_.get()};
    while (!stack.empty()) {
        const ExprNode* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (n->a) stack.push_back(n->a.get());
        if (n->b) stack.push_back(n->b.get());
    }
    return seen.size();
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over the grammar
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' integer)*
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'

namespace {

struct Parser {
    const std::string& src;
    std::size_t pos = 0;
    const std::vector<int>& allowed;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    Expr parse_expression() {
        Expr e = parse_term();
        while (true) {
            if (eat('+')) {
                e = e + parse_term();
            } else if (eat('-')) {
                e = e - parse_term();
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        while (true) {
            if (eat('*')) {
                e = e * parse_unary();
            } else if (eat('/')) {
                e = e / parse_unary();
            } else {
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr e = parse_atom();
        while (eat('^')) e = pow_int(e, parse_integer());
        return e;
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos;
        bool neg = false;
        if (pos < src.size() && src[pos] == '-') {
            neg = true;
            ++pos;
        }
        if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
            throw ParseError("expected integer exponent", start);
        long v = 0;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
            v = v * 10 + (src[pos] - '0');
            if (v > 1000000) throw ParseError("exponent too large", start);
            ++pos;
        }
        return static_cast<int>(neg ? -v : v);
    }

    Expr parse_atom() {
        skip_ws();
        if (pos >= src.size()) throw ParseError("unexpected end of expression", pos);
        char c = src[pos];
        if (c == '(') {
            ++pos;
            Expr e = parse_expression();
            if (!eat(')')) throw ParseError("expected ')'", pos);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }

    Expr parse_number() {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.'))
            ++pos;
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
            if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            } else {
                pos = mark;  // 'e' belongs to a following identifier, not this literal
            }
        }
        double value = 0.0;
        auto res = std::from_chars(src.data() + start, src.data() + pos, value);
        if (res.ec != std::errc() || res.ptr != src.data() + pos)
            throw ParseError("malformed number literal", start);
        return Expr(value);
    }

    Expr parse_ident() {
        std::size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        std::string name = src.substr(start, pos - start);
        if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
            if (!eat('(')) throw ParseError("expected '(' after function name", pos);
            Expr arg = parse_expression();
            if (!eat(')')) throw ParseError("expected ')'", pos);
            if (name == "sin") return sin(arg);
            if (name == "cos") return cos(arg);
            if (name == "exp") return exp(arg);
            return sqrt(arg);
        }
        int id = SymbolTable::lookup(name);
        if (id < 0 || std::find(allowed.begin(), allowed.end(), id) == allowed.end())
            throw ParseError("unknown symbol '" + name + "'", start);
        return Expr::symbol(id);
    }
};

}  // namespace

Expr parse_expr(const std::string& source, const std::vector<int>& allowed_symbols) {
    Parser p{source, 0, allowed_symbols};
    Expr e = p.parse_expression();
    p.skip_ws();
    if (p.pos != source.size()) throw ParseError("trailing characters", p.pos);
    return e;
}

Expr parse_expr(const std::string& source, const std::vector<std::string>& allowed_symbols) {
    std::vector<int> ids;
    ids.reserve(allowed_symbols.size());
    for (const auto& s : allowed_symbols) ids.push_back(SymbolTable::intern(s));
    return parse_expr(source, ids);
}

CompiledExpr::CompiledExpr(const Expr& e) {
    std::unordered_map<const ExprNode*, int> slot_of;
    // Post-order emission; shared nodes emitted once.
    std::vector<std::pair<const ExprNode*, bool>> stack{{e.node().get(), false}};
    while (!stack.empty()) {
        auto [n, expanded] = stack.back();
        stack.pop_back();
        if (slot_of.count(n)) continue;
        if (!expanded) {
            stack.push_back({n, true});
            if (n->a) stack.push_back({n->a.get(), false});
            if (n->b) stack.push_back({n->b.get(), false});
            continue;
        }
        Instr ins;
        ins.op = n->op;
        ins.value = n->value;
        ins.symbol = n->symbol;
        ins.exponent = n->exponent;
        if (n->a) ins.a = slot_of.at(n->a.get());
        if (n->b) ins.b = slot_of.at(n->b.get());
        slot_of[n] = static_cast<int>(instrs_.size());
        instrs_.push_back(ins);
    }
    slots_.resize(instrs_.size());
}

double CompiledExpr::eval(const Bindings& bindings) const {
    double* s = slots_.data();
    for (std::size_t i = 0; i < instrs_.size(); ++i) {
        const Instr& ins = instrs_[i];
        switch (ins.op) {
            case ExprOp::Const: s[i] = ins.value; break;
            case ExprOp::Symbol: s[i] = bindings.get(ins.symbol); break;
            case ExprOp::Add: s[i] = s[ins.a] + s[ins.b]; break;
            case ExprOp::Sub: s[i] = s[ins.a] - s[ins.b]; break;
            case ExprOp::Mul: s[i] = s[ins.a] * s[ins.b]; break;
            case ExprOp::Div:
                if (s[ins.b] == 0.0) throw EvalError("singular evaluation: division by zero");
                s[i] = s[ins.a] / s[ins.b];
                break;
            case ExprOp::Pow: s[i] = ipow(s[ins.a], ins.exponent); break;
            case ExprOp::Neg: s[i] = -s[ins.a]; break;
            case ExprOp::Sin: s[i] = std::sin(s[ins.a]); break;
            case ExprOp::Cos: s[i] = std::cos(s[ins.a]); break;
            case ExprOp::Exp: s[i] = std::exp(s[ins.a]); break;
            case ExprOp::Sqrt:
                if (s[ins.a] < 0.0) throw EvalError("singular evaluation: sqrt of negative value");
                s[i] = std::sqrt(s[ins.a]);
                break;
        }
    }
    return instrs_.empty() ? 0.0 : s[instrs_.size() - 1];
}

}  // namespace algloc
