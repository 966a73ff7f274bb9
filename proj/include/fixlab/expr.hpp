#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fixlab/errors.hpp"

namespace fixlab {

/// Shortest decimal text that reads back to exactly `v`.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace expr {

enum class Op { constant, variable, neg, abs, add, sub, mul, div, pow, max, min, cond };
enum class Cmp { lt, le, eq };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// One node of an expression tree. `cond` holds four children: lhs, rhs, then, else.
struct Node {
    Op op = Op::constant;
    double value = 0.0;
    std::size_t slot = 0;
    Cmp cmp = Cmp::lt;
    std::vector<NodePtr> args;
};

inline NodePtr constant(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = v;
    return n;
}

inline NodePtr variable(std::size_t slot) {
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->slot = slot;
    return n;
}

inline NodePtr unary(Op op, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a)};
    return n;
}

inline NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
}

inline NodePtr conditional(Cmp cmp, NodePtr lhs, NodePtr rhs, NodePtr then, NodePtr otherwise) {
    auto n = std::make_shared<Node>();
    n->op = Op::cond;
    n->cmp = cmp;
    n->args = {std::move(lhs), std::move(rhs), std::move(then), std::move(otherwise)};
    return n;
}

inline bool same_tree(const Node& a, const Node& b) {
    if (a.op != b.op || a.args.size() != b.args.size()) return false;
    switch (a.op) {
        case Op::constant: return a.value == b.value && std::signbit(a.value) == std::signbit(b.value);
        case Op::variable: return a.slot == b.slot;
        case Op::cond:
            if (a.cmp != b.cmp) return false;
            break;
        default: break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_tree(*a.args[i], *b.args[i])) return false;
    return true;
}

namespace detail {

inline double check_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw EvalError(EvalError::Kind::domain, std::string("non-finite result in ") + what);
    return v;
}

inline double eval(const Node& n, std::span<const double> slots) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::variable: return slots[n.slot];
        case Op::neg: return -eval(*n.args[0], slots);
        case Op::abs: return std::fabs(eval(*n.args[0], slots));
        case Op::add: return check_finite(eval(*n.args[0], slots) + eval(*n.args[1], slots), "addition");
        case Op::sub: return check_finite(eval(*n.args[0], slots) - eval(*n.args[1], slots), "subtraction");
        case Op::mul: return check_finite(eval(*n.args[0], slots) * eval(*n.args[1], slots), "multiplication");
        case Op::div: {
            const double num = eval(*n.args[0], slots);
            const double den = eval(*n.args[1], slots);
            if (den == 0.0) throw EvalError(EvalError::Kind::domain, "division by zero");
            return check_finite(num / den, "division");
        }
        case Op::pow: {
            const double base = eval(*n.args[0], slots);
            const double ex = eval(*n.args[1], slots);
            if (base == 0.0 && ex < 0.0)
                throw EvalError(EvalError::Kind::domain, "zero raised to a negative power");
            const double r = std::pow(base, ex);
            if (std::isnan(r)) throw EvalError(EvalError::Kind::domain, "invalid power");
            return check_finite(r, "power");
        }
        case Op::max: return std::max(eval(*n.args[0], slots), eval(*n.args[1], slots));
        case Op::min: return std::min(eval(*n.args[0], slots), eval(*n.args[1], slots));
        case Op::cond: {
            const double l = eval(*n.args[0], slots);
            const double r = eval(*n.args[1], slots);
            bool take = false;
            switch (n.cmp) {
                case Cmp::lt: take = l < r; break;
                case Cmp::le: take = l <= r; break;
                case Cmp::eq: take = l == r; break;
            }
            return eval(*n.args[take ? 2 : 3], slots);
        }
    }
    return 0.0;
}

inline void print(const Node& n, const std::vector<std::string>& vars, std::string& out) {
    auto bin = [&](const char* sym) {
        out += '(';
        print(*n.args[0], vars, out);
        out += sym;
        print(*n.args[1], vars, out);
        out += ')';
    };
    auto call = [&](const char* name) {
        out += name;
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            print(*n.args[i], vars, out);
        }
        out += ')';
    };
    switch (n.op) {
        case Op::constant:
            // A bare negative literal re-parses as one constant, so wrap it to keep it atomic.
            if (std::signbit(n.value)) {
                out += '(';
                out += format_number(n.value);
                out += ')';
            } else {
                out += format_number(n.value);
            }
            break;
        case Op::variable: out += vars[n.slot]; break;
        case Op::neg:
            out += "(-(";
            print(*n.args[0], vars, out);
            out += "))";
            break;
        case Op::abs: call("abs"); break;
        case Op::add: bin(" + "); break;
        case Op::sub: bin(" - "); break;
        case Op::mul: bin(" * "); break;
        case Op::div: bin(" / "); break;
        case Op::pow: bin("^"); break;
        case Op::max: call("max"); break;
        case Op::min: call("min"); break;
        case Op::cond: {
            out += "if(";
            print(*n.args[0], vars, out);
            out += n.cmp == Cmp::lt ? " < " : n.cmp == Cmp::le ? " <= " : " = ";
            print(*n.args[1], vars, out);
            out += ", ";
            print(*n.args[2], vars, out);
            out += ", ";
            print(*n.args[3], vars, out);
            out += ')';
            break;
        }
    }
}

enum class Tok { number, ident, lparen, rparen, comma, plus, minus, star, slash, caret, lt, le, eq, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                    i = j;
                }
            }
            Token t{Tok::number, start, src.substr(start, i - start)};
            auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
                throw ParseError("malformed number '" + std::string(t.text) + "'", start);
            toks.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            toks.push_back({Tok::ident, start, src.substr(start, i - start)});
            continue;
        }
        Tok k;
        std::size_t len = 1;
        switch (c) {
            case '(': k = Tok::lparen; break;
            case ')': k = Tok::rparen; break;
            case ',': k = Tok::comma; break;
            case '+': k = Tok::plus; break;
            case '-': k = Tok::minus; break;
            case '*': k = Tok::star; break;
            case '/': k = Tok::slash; break;
            case '^': k = Tok::caret; break;
            case '=': k = Tok::eq; break;
            case '<':
                if (i + 1 < src.size() && src[i + 1] == '=') {
                    k = Tok::le;
                    len = 2;
                } else {
                    k = Tok::lt;
                }
                break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        toks.push_back({k, start, src.substr(start, len)});
        i += len;
    }
    toks.push_back({Tok::end, src.size(), {}});
    return toks;
}

// Recursive descent over:
//   sum     := product (('+'|'-') product)*
//   product := neg (('*'|'/') neg)*
//   neg     := '-' neg | power
//   power   := primary ('^' exponent)*        exponent := '-'* primary
//   primary := number | variable | '(' sum ')' | call
class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : toks_(tokenize(src)), vars_(vars) {}

    NodePtr parse() {
        NodePtr root = sum();
        if (peek().kind != Tok::end) fail("unexpected token '" + std::string(peek().text) + "'");
        return root;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, peek().offset); }

    void expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what);
        take();
    }

    NodePtr sum() {
        NodePtr lhs = product();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const Op op = take().kind == Tok::plus ? Op::add : Op::sub;
            lhs = binary(op, lhs, product());
        }
        return lhs;
    }

    NodePtr product() {
        NodePtr lhs = negation();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const Op op = take().kind == Tok::star ? Op::mul : Op::div;
            lhs = binary(op, lhs, negation());
        }
        return lhs;
    }

    // "-2" is a negative constant, but "-2^2" is the negation of a power.
    bool literal_follows() const { return peek(1).kind == Tok::number && peek(2).kind != Tok::caret; }

    NodePtr negation() {
        if (peek().kind == Tok::minus) {
            if (literal_follows()) {
                take();
                return constant(-take().number);
            }
            take();
            return unary(Op::neg, negation());
        }
        return power();
    }

    NodePtr exponent() {
        if (peek().kind == Tok::minus) {
            if (peek(1).kind == Tok::number) {
                take();
                return constant(-take().number);
            }
            take();
            return unary(Op::neg, exponent());
        }
        return primary();
    }

    NodePtr power() {
        NodePtr lhs = primary();
        while (peek().kind == Tok::caret) {
            take();
            lhs = binary(Op::pow, lhs, exponent());
        }
        return lhs;
    }

    std::vector<NodePtr> call_args(std::size_t arity, std::string_view name) {
        expect(Tok::lparen, "'('");
        std::vector<NodePtr> args;
        for (std::size_t i = 0; i < arity; ++i) {
            if (i) expect(Tok::comma, "','");
            args.push_back(sum());
        }
        if (peek().kind != Tok::rparen)
            fail(std::string(name) + " takes " + std::to_string(arity) + " argument(s); expected ')'");
        take();
        return args;
    }

    NodePtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::number: take(); return constant(t.number);
            case Tok::lparen: {
                take();
                NodePtr inner = sum();
                expect(Tok::rparen, "')'");
                return inner;
            }
            case Tok::ident: return identifier();
            case Tok::end: fail("unexpected end of input");
            default: fail("unexpected token '" + std::string(t.text) + "'");
        }
    }

    NodePtr identifier() {
        const Token t = take();
        if (t.text == "max" || t.text == "min") {
            auto args = call_args(2, t.text);
            return binary(t.text == "max" ? Op::max : Op::min, args[0], args[1]);
        }
        if (t.text == "abs") return unary(Op::abs, call_args(1, t.text)[0]);
        if (t.text == "if") {
            expect(Tok::lparen, "'('");
            NodePtr lhs = sum();
            Cmp cmp;
            switch (peek().kind) {
                case Tok::lt: cmp = Cmp::lt; break;
                case Tok::le: cmp = Cmp::le; break;
                case Tok::eq: cmp = Cmp::eq; break;
                default: fail("expected comparison '<', '<=' or '='");
            }
            take();
            NodePtr rhs = sum();
            expect(Tok::comma, "','");
            NodePtr then = sum();
            expect(Tok::comma, "','");
            NodePtr otherwise = sum();
            expect(Tok::rparen, "')'");
            return conditional(cmp, lhs, rhs, then, otherwise);
        }
        auto it = std::find(vars_.begin(), vars_.end(), t.text);
        if (it == vars_.end()) throw UnknownVariableError(std::string(t.text), t.offset);
        return variable(static_cast<std::size_t>(it - vars_.begin()));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const std::vector<std::string>& vars_;
};

}  // namespace detail

/// An immutable arithmetic expression over a declared, ordered variable set.
class Expression {
public:
    Expression(NodePtr root, std::vector<std::string> variables)
        : root_(std::move(root)), vars_(std::move(variables)) {}

    const Node& root() const { return *root_; }
    const std::vector<std::string>& variables() const { return vars_; }

    /// Evaluate with values given in declared-variable order.
    double evaluate(std::span<const double> slots) const {
        if (slots.size() < vars_.size())
            throw EvalError(EvalError::Kind::missing_binding,
                            "missing binding for '" + vars_[slots.size()] + "'");
        return detail::eval(*root_, slots);
    }

    double evaluate(const std::map<std::string, double>& bindings) const {
        std::vector<double> slots;
        slots.reserve(vars_.size());
        for (const auto& v : vars_) {
            auto it = bindings.find(v);
            if (it == bindings.end())
                throw EvalError(EvalError::Kind::missing_binding, "missing binding for '" + v + "'");
            slots.push_back(it->second);
        }
        return detail::eval(*root_, slots);
    }

    double at(double a) const {
        const double s[1] = {a};
        return evaluate(std::span<const double>(s));
    }

    double at(double a, double b) const {
        const double s[2] = {a, b};
        return evaluate(std::span<const double>(s));
    }

    std::string to_string() const {
        std::string out;
        detail::print(*root_, vars_, out);
        return out;
    }

    friend bool operator==(const Expression& a, const Expression& b) {
        return a.vars_ == b.vars_ && same_tree(*a.root_, *b.root_);
    }

private:
    NodePtr root_;
    std::vector<std::string> vars_;
};

inline Expression parse(std::string_view source, std::vector<std::string> variables) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw ParseError("empty expression", 0);
    NodePtr root = detail::Parser(source, variables).parse();
    return Expression(std::move(root), std::move(variables));
}

}  // namespace expr
}  // namespace fixlab
