#pragma once

// A small arithmetic expression language in one variable `r`, used for
// user-defined multiplier symbols. Expressions are parsed once into an
// immutable tree and evaluated on doubles or jets, so derivatives of every
// order are exact.
//
// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'r' | 'e' | 'pi' | func '(' expr (',' expr)? ')' | '(' expr ')'
//   func   := log | ln | log1p | exp | sqrt | sin | cos | pow

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchflow/error.hpp"
#include "patchflow/jet.hpp"

namespace patchflow {

class Expression {
public:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Log, Log1p, Exp, Sqrt, Sin, Cos };

    struct Node {
        Op op = Op::Const;
        double value = 0.0;
        std::vector<std::shared_ptr<const Node>> args;
    };

    Expression() = default;

    static Expression parse(std::string_view text) {
        Parser p{text, 0};
        Expression e;
        e.text_ = std::string(text);
        e.root_ = p.expr();
        p.skip();
        if (p.pos != text.size()) p.fail("unexpected trailing input");
        return e;
    }

    [[nodiscard]] bool empty() const { return root_ == nullptr; }
    [[nodiscard]] const std::string& text() const { return text_; }

    template <class T>
    T operator()(const T& r) const {
        return eval(*root_, r);
    }

private:
    std::string text_;
    std::shared_ptr<const Node> root_;

    template <class T>
    static T eval(const Node& n, const T& r) {
        using std::cos;
        using std::exp;
        using std::log;
        using std::log1p;
        using std::sin;
        using std::sqrt;
        switch (n.op) {
            case Op::Const: return T(n.value);
            case Op::Var: return r;
            case Op::Add: return eval(*n.args[0], r) + eval(*n.args[1], r);
            case Op::Sub: return eval(*n.args[0], r) - eval(*n.args[1], r);
            case Op::Mul: return eval(*n.args[0], r) * eval(*n.args[1], r);
            case Op::Div: return eval(*n.args[0], r) / eval(*n.args[1], r);
            case Op::Neg: return -eval(*n.args[0], r);
            case Op::Pow: {
                const Node& ex = *n.args[1];
                if (ex.op == Op::Const) return rpow(eval(*n.args[0], r), ex.value);
                return exp(eval(ex, r) * log(eval(*n.args[0], r)));
            }
            case Op::Log: return log(eval(*n.args[0], r));
            case Op::Log1p: return log1p(eval(*n.args[0], r));
            case Op::Exp: return exp(eval(*n.args[0], r));
            case Op::Sqrt: return sqrt(eval(*n.args[0], r));
            case Op::Sin: return sin(eval(*n.args[0], r));
            case Op::Cos: return cos(eval(*n.args[0], r));
        }
        return T(0.0);
    }

    struct Parser {
        std::string_view s;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ConfigError("expression error at column " + std::to_string(pos + 1) + ": " + msg);
        }

        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }

        bool eat(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        static std::shared_ptr<const Node> make(Op op, std::vector<std::shared_ptr<const Node>> args,
                                                double v = 0.0) {
            auto n = std::make_shared<Node>();
            n->op = op;
            n->value = v;
            n->args = std::move(args);
            return n;
        }

        std::shared_ptr<const Node> expr() {
            auto lhs = term();
            for (;;) {
                if (eat('+')) {
                    lhs = make(Op::Add, {lhs, term()});
                } else if (eat('-')) {
                    lhs = make(Op::Sub, {lhs, term()});
                } else {
                    return lhs;
                }
            }
        }

        std::shared_ptr<const Node> term() {
            auto lhs = unary();
            for (;;) {
                if (eat('*')) {
                    lhs = make(Op::Mul, {lhs, unary()});
                } else if (eat('/')) {
                    lhs = make(Op::Div, {lhs, unary()});
                } else {
                    return lhs;
                }
            }
        }

        std::shared_ptr<const Node> unary() {
            if (eat('-')) return make(Op::Neg, {unary()});
            if (eat('+')) return unary();
            return power();
        }

        std::shared_ptr<const Node> power() {
            auto base = atom();
            if (eat('^')) return make(Op::Pow, {base, unary()});
            return base;
        }

        std::shared_ptr<const Node> atom() {
            skip();
            if (pos >= s.size()) fail("unexpected end of input");
            if (eat('(')) {
                auto e = expr();
                if (!eat(')')) fail("expected ')'");
                return e;
            }
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t end = pos;
                while (end < s.size() &&
                       (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
                        s[end] == 'e' || s[end] == 'E' ||
                        ((s[end] == '-' || s[end] == '+') && end > pos &&
                         (s[end - 1] == 'e' || s[end - 1] == 'E')))) {
                    ++end;
                }
                const std::string num(s.substr(pos, end - pos));
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(num, &used);
                } catch (const std::exception&) {
                    fail("bad number '" + num + "'");
                }
                pos += used;
                return make(Op::Const, {}, v);
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t end = pos;
                while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) {
                    ++end;
                }
                const std::string id(s.substr(pos, end - pos));
                pos = end;
                if (id == "r") return make(Op::Var, {});
                if (id == "e") return make(Op::Const, {}, std::numbers::e);
                if (id == "pi") return make(Op::Const, {}, std::numbers::pi);
                Op op{};
                int arity = 1;
                if (id == "log" || id == "ln") {
                    op = Op::Log;
                } else if (id == "log1p") {
                    op = Op::Log1p;
                } else if (id == "exp") {
                    op = Op::Exp;
                } else if (id == "sqrt") {
                    op = Op::Sqrt;
                } else if (id == "sin") {
                    op = Op::Sin;
                } else if (id == "cos") {
                    op = Op::Cos;
                } else if (id == "pow") {
                    op = Op::Pow;
                    arity = 2;
                } else {
                    fail("unknown identifier '" + id + "'");
                }
                if (!eat('(')) fail("expected '(' after " + id);
                std::vector<std::shared_ptr<const Node>> args{expr()};
                if (arity == 2) {
                    if (!eat(',')) fail("expected ',' in pow");
                    args.push_back(expr());
                }
                if (!eat(')')) fail("expected ')'");
                return make(op, std::move(args));
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };
};

}  // namespace patchflow
