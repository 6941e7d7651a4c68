#include "sfdlab/field.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace sfdlab {

CoefficientField CoefficientField::constant(double c) {
    CoefficientField f;
    f.constant_ = c;
    f.is_constant_ = true;
    f.label_ = std::to_string(c);
    return f;
}

CoefficientField CoefficientField::function(
    std::function<double(double, std::span<const double>)> fn, std::string label) {
    CoefficientField f;
    f.f_ = std::move(fn);
    f.is_constant_ = false;
    f.constant_ = 0.0;
    f.label_ = std::move(label);
    return f;
}

namespace {

using EvalFn = std::function<double(double, std::span<const double>)>;

/// Parse node: either a folded constant or a closure over (t, x).
struct Node {
    bool constant;
    double value;
    EvalFn eval;
};

Node make_const(double v) { return Node{true, v, {}}; }

Node make_fn(EvalFn f) { return Node{false, 0.0, std::move(f)}; }

double eval_node(const Node& n, double t, std::span<const double> x) {
    return n.constant ? n.value : n.eval(t, x);
}

/// Recursive-descent parser over a raw character buffer. Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := power (('*' | '/') power)*
///   power  := unary ('^' unary)*          (right-assoc, exponent constant)
///   unary  := '-' unary | atom
///   atom   := number | 'pi' | 't' | 'x' | 'x1'..'x3'
///           | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(const std::string& text, int dim) : s_(text), dim_(dim) {}

    Node parse() {
        Node n = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    const std::string& s_;
    int dim_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("field expression '" + s_ + "': " + what +
                              " at position " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume(char c) {
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

    Node expr() {
        Node lhs = term();
        for (;;) {
            if (consume('+')) {
                lhs = combine(lhs, term(), [](double a, double b) { return a + b; });
            } else if (consume('-')) {
                lhs = combine(lhs, term(), [](double a, double b) { return a - b; });
            } else {
                return lhs;
            }
        }
    }

    Node term() {
        Node lhs = power();
        for (;;) {
            if (consume('*')) {
                lhs = combine(lhs, power(), [](double a, double b) { return a * b; });
            } else if (consume('/')) {
                lhs = combine(lhs, power(), [](double a, double b) { return a / b; });
            } else {
                return lhs;
            }
        }
    }

    Node power() {
        Node base = unary();
        if (!consume('^')) return base;
        Node exp = power(); // right recursion makes the chain right-associative
        if (!exp.constant) fail("exponent must be constant");
        return combine(base, exp, [](double a, double b) { return std::pow(a, b); });
    }

    Node unary() {
        if (consume('-')) {
            Node n = unary();
            if (n.constant) return make_const(-n.value);
            return make_fn([inner = n.eval](double t, std::span<const double> x) {
                return -inner(t, x);
            });
        }
        return atom();
    }

    Node atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Node n = expr();
            if (!consume(')')) fail("expected ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    Node number() {
        std::size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E')))) {
            ++end;
        }
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(s_.substr(pos_, end - pos_), &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        return make_const(v);
    }

    Node identifier() {
        std::size_t end = pos_;
        while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])))) ++end;
        std::string name = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (name == "pi") return make_const(4.0 * std::atan(1.0));
        if (name == "t")
            return make_fn([](double t, std::span<const double>) { return t; });
        if (name == "x" || name == "x1") return coordinate(0);
        if (name == "x2") return coordinate(1);
        if (name == "x3") return coordinate(2);
        if (name == "sin" || name == "cos" || name == "exp") return call(name);
        fail("unknown identifier '" + name + "'");
    }

    Node coordinate(int axis) {
        if (axis >= dim_)
            fail("coordinate x" + std::to_string(axis + 1) + " exceeds dimension " +
                 std::to_string(dim_));
        return make_fn([axis](double, std::span<const double> x) {
            return x[static_cast<std::size_t>(axis)];
        });
    }

    Node call(const std::string& name) {
        if (!consume('(')) fail("expected '(' after '" + name + "'");
        Node arg = expr();
        if (!consume(')')) fail("expected ')'");
        double (*fn)(double) = name == "sin" ? static_cast<double (*)(double)>(std::sin)
                               : name == "cos" ? static_cast<double (*)(double)>(std::cos)
                                               : static_cast<double (*)(double)>(std::exp);
        if (arg.constant) return make_const(fn(arg.value));
        return make_fn([fn, inner = arg.eval](double t, std::span<const double> x) {
            return fn(inner(t, x));
        });
    }

    template <typename Op>
    Node combine(const Node& a, const Node& b, Op op) {
        if (a.constant && b.constant) return make_const(op(a.value, b.value));
        return make_fn([a, b, op](double t, std::span<const double> x) {
            return op(eval_node(a, t, x), eval_node(b, t, x));
        });
    }
};

} // namespace

CoefficientField parse_field(const std::string& text, int dim) {
    Node n = Parser(text, dim).parse();
    if (n.constant) {
        CoefficientField f = CoefficientField::constant(n.value);
        return f;
    }
    return CoefficientField::function(n.eval, text);
}

} // namespace sfdlab
