#include "liesphere/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "liesphere/errors.hpp"

namespace liesphere {

struct Expr::Node {
    enum Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Fun } kind;
    double num = 0.0;
    std::string name;
    NodePtr a, b;

    template <typename T, typename Lookup>
    T eval(const Lookup& lookup) const {
        switch (kind) {
            case Num: return T(num);
            case Var: return lookup(name);
            case Add: return a->template eval<T>(lookup) + b->template eval<T>(lookup);
            case Sub: return a->template eval<T>(lookup) - b->template eval<T>(lookup);
            case Mul: return a->template eval<T>(lookup) * b->template eval<T>(lookup);
            case Div: return a->template eval<T>(lookup) / b->template eval<T>(lookup);
            case Neg: return -a->template eval<T>(lookup);
            case Pow: {
                T base = a->template eval<T>(lookup);
                if (b->kind == Num && b->num == std::round(b->num) &&
                    std::abs(b->num) <= 16) {
                    int e = static_cast<int>(std::round(b->num));
                    if (e == 0) return T(1.0);
                    bool inv = e < 0;
                    e = std::abs(e);
                    T r = base;
                    for (int i = 1; i < e; ++i) r = r * base;
                    return inv ? T(1.0) / r : r;
                }
                return pow_impl(base, b->template eval<T>(lookup));
            }
            case Fun: {
                T x = a->template eval<T>(lookup);
                if (name == "exp") return exp(x);
                if (name == "ln" || name == "log") return log(x);
                if (name == "sin") return sin(x);
                if (name == "cos") return cos(x);
                if (name == "sqrt") return sqrt(x);
                if (name == "sinh") return sinh(x);
                if (name == "cosh") return cosh(x);
                if (name == "tanh") return tanh(x);
                if (name == "const") return x;
                throw SchemaViolation("unknown function '" + name + "'");
            }
        }
        throw std::logic_error("unreachable");
    }

    static double pow_impl(double a, double b) { return std::pow(a, b); }
    static T2 pow_impl(const T2& a, const T2& b) {
        if (b.derivative(1, 0) != 0.0 || b.derivative(0, 1) != 0.0)
            throw SchemaViolation("exponent must be constant");
        return pow(a, b.value());
    }
};

namespace {

struct Parser {
    const std::string& s;
    size_t p = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
    }
    bool eat(char c) {
        skip();
        if (p < s.size() && s[p] == c) {
            ++p;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return p < s.size() ? s[p] : '\0';
    }

    Expr::NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (eat('+')) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Add;
                n->a = lhs;
                n->b = term();
                lhs = n;
            } else if (eat('-')) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Sub;
                n->a = lhs;
                n->b = term();
                lhs = n;
            } else {
                return lhs;
            }
        }
    }
    Expr::NodePtr term() {
        auto lhs = factor();
        for (;;) {
            if (eat('*')) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Mul;
                n->a = lhs;
                n->b = factor();
                lhs = n;
            } else if (eat('/')) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Div;
                n->a = lhs;
                n->b = factor();
                lhs = n;
            } else {
                return lhs;
            }
        }
    }
    Expr::NodePtr factor() {
        auto base = unary();
        if (eat('^')) {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Pow;
            n->a = base;
            n->b = factor(); // right associative
            return n;
        }
        return base;
    }
    Expr::NodePtr unary() {
        if (eat('-')) {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Neg;
            n->a = unary();
            return n;
        }
        return primary();
    }
    Expr::NodePtr primary() {
        skip();
        if (p >= s.size()) throw SchemaViolation("unexpected end of expression");
        const char c = s[p];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t q = 0;
            const double v = std::stod(s.substr(p), &q);
            p += q;
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Num;
            n->num = v;
            return n;
        }
        if (c == '(') {
            ++p;
            auto e = expr();
            if (!eat(')')) throw SchemaViolation("missing ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t q = p;
            while (q < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[q])) || s[q] == '_'))
                ++q;
            std::string name = s.substr(p, q - p);
            p = q;
            if (eat('(')) {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Fun;
                n->name = name;
                n->a = expr();
                if (!eat(')')) throw SchemaViolation("missing ')' after " + name);
                return n;
            }
            if (name == "pi") {
                auto n = std::make_shared<Expr::Node>();
                n->kind = Expr::Node::Num;
                n->num = M_PI;
                return n;
            }
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Var;
            n->name = name;
            return n;
        }
        throw SchemaViolation(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Expr Expr::parse(const std::string& text) {
    Parser ps(text);
    auto root = ps.expr();
    ps.skip();
    if (ps.p != text.size()) throw SchemaViolation("trailing input in expression");
    return Expr(root);
}

double Expr::eval(const std::map<std::string, double>& vars) const {
    return root_->eval<double>([&](const std::string& n) -> double {
        auto it = vars.find(n);
        if (it == vars.end()) throw MissingField("variable '" + n + "'");
        return it->second;
    });
}

T2 Expr::eval2(const std::map<std::string, T2>& vars) const {
    return root_->eval<T2>([&](const std::string& n) -> T2 {
        auto it = vars.find(n);
        if (it == vars.end()) throw MissingField("variable '" + n + "'");
        return it->second;
    });
}

Field2 Expr::as_field(const std::vector<std::string>& names) const {
    auto root = root_;
    auto n1 = names.size() > 0 ? names[0] : "R1";
    auto n2 = names.size() > 1 ? names[1] : "R2";
    return Field2::closed([root, n1, n2](double x, double y) {
        const T2 vx = T2::variable(x, 0), vy = T2::variable(y, 1);
        return root->eval<T2>([&](const std::string& n) -> T2 {
            if (n == n1 || n == "x" || n == "R1" || n == "u1") return vx;
            if (n == n2 || n == "y" || n == "R2" || n == "u2") return vy;
            throw MissingField("variable '" + n + "'");
        });
    });
}

} // namespace liesphere
