// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace seirs {

class ExpressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deliberately tiny closed-form language for coefficient and initial fields:
/// numbers, + - * /, unary minus, parentheses, the constant pi, the spatial
/// variables x (and y in 2D), and the functions cos, sin, exp.
///
/// Compiled to a postfix program; evaluation is allocation-free.
class Expression {
public:
    static Expression parse(const std::string& source) {
        Parser p(source);
        Expression e;
        e.source_ = source;
        p.parse_expr(e.ops_);
        p.expect_end();
        for (const Op& op : e.ops_)
            if (op.kind == Kind::Y) e.uses_y_ = true;
        return e;
    }

    double operator()(double x, double y = 0.0) const {
        double stack[kMaxDepth];
        int top = -1;
        for (const Op& op : ops_) {
            switch (op.kind) {
                case Kind::Push: stack[++top] = op.value; break;
                case Kind::X: stack[++top] = x; break;
                case Kind::Y: stack[++top] = y; break;
                case Kind::Add: --top; stack[top] += stack[top + 1]; break;
                case Kind::Sub: --top; stack[top] -= stack[top + 1]; break;
                case Kind::Mul: --top; stack[top] *= stack[top + 1]; break;
                case Kind::Div: --top; stack[top] /= stack[top + 1]; break;
                case Kind::Neg: stack[top] = -stack[top]; break;
                case Kind::Cos: stack[top] = std::cos(stack[top]); break;
                case Kind::Sin: stack[top] = std::sin(stack[top]); break;
                case Kind::Exp: stack[top] = std::exp(stack[top]); break;
            }
        }
        return stack[0];
    }

    const std::string& source() const { return source_; }
    bool uses_y() const { return uses_y_; }

private:
    enum class Kind { Push, X, Y, Add, Sub, Mul, Div, Neg, Cos, Sin, Exp };
    struct Op {
        Kind kind;
        double value = 0.0;
    };
    static constexpr int kMaxDepth = 64;

    class Parser {
    public:
        explicit Parser(const std::string& s) : s_(s) {}

        void parse_expr(std::vector<Op>& out, int depth = 0) {
            if (depth > 32) fail("expression too deeply nested");
            parse_term(out, depth);
            while (true) {
                skip_ws();
                if (match('+')) {
                    parse_term(out, depth);
                    out.push_back({Kind::Add});
                } else if (match('-')) {
                    parse_term(out, depth);
                    out.push_back({Kind::Sub});
                } else {
                    break;
                }
            }
        }

        void expect_end() {
            skip_ws();
            if (pos_ != s_.size()) fail("unexpected trailing input");
        }

    private:
        void parse_term(std::vector<Op>& out, int depth) {
            parse_unary(out, depth);
            while (true) {
                skip_ws();
                if (match('*')) {
                    parse_unary(out, depth);
                    out.push_back({Kind::Mul});
                } else if (match('/')) {
                    parse_unary(out, depth);
                    out.push_back({Kind::Div});
                } else {
                    break;
                }
            }
        }

        void parse_unary(std::vector<Op>& out, int depth) {
            skip_ws();
            if (match('-')) {
                parse_unary(out, depth + 1);
                out.push_back({Kind::Neg});
                return;
            }
            if (match('+')) {
                parse_unary(out, depth + 1);
                return;
            }
            parse_primary(out, depth);
        }

        void parse_primary(std::vector<Op>& out, int depth) {
            skip_ws();
            if (pos_ >= s_.size()) fail("unexpected end of expression");
            const char c = s_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(s_.substr(pos_), &used);
                } catch (const std::exception&) {
                    fail("malformed number");
                }
                pos_ += used;
                out.push_back({Kind::Push, v});
                return;
            }
            if (match('(')) {
                parse_expr(out, depth + 1);
                skip_ws();
                if (!match(')')) fail("expected ')'");
                return;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::string name = read_ident();
                if (name == "pi") {
                    out.push_back({Kind::Push, std::numbers::pi});
                } else if (name == "x") {
                    out.push_back({Kind::X});
                } else if (name == "y") {
                    out.push_back({Kind::Y});
                } else if (name == "cos" || name == "sin" || name == "exp") {
                    skip_ws();
                    if (!match('(')) fail("expected '(' after " + name);
                    parse_expr(out, depth + 1);
                    skip_ws();
                    if (!match(')')) fail("expected ')'");
                    out.push_back({name == "cos"   ? Op{Kind::Cos}
                                   : name == "sin" ? Op{Kind::Sin}
                                                   : Op{Kind::Exp}});
                } else {
                    fail("unknown identifier '" + name + "'");
                }
                return;
            }
            fail(std::string("unexpected character '") + c + "'");
        }

        std::string read_ident() {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   std::isalpha(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            return s_.substr(start, pos_ - start);
        }

        void skip_ws() {
            while (pos_ < s_.size() &&
                   std::isspace(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
        }

        bool match(char c) {
            if (pos_ < s_.size() && s_[pos_] == c) {
                ++pos_;
                return true;
            }
            return false;
        }

        [[noreturn]] void fail(const std::string& why) const {
            throw ExpressionError("expression error at position " +
                                  std::to_string(pos_) + ": " + why + " in \"" +
                                  s_ + "\"");
        }

        const std::string& s_;
        std::size_t pos_ = 0;
    };

    std::string source_;
    std::vector<Op> ops_;
    bool uses_y_ = false;
};

}  // namespace seirs
