#include "ergo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

#include "ergo/errors.hpp"

namespace ergo {

enum class OpCode { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs };

struct Expr::Node {
    OpCode op;
    double value = 0.0;  // Const
    int index = 0;       // Var
    NodePtr lhs, rhs;
};

namespace {

using Node = Expr::Node;

double eval_node(const Node& n, std::span<const double> x);

double eval_node(const Expr::Node& n, std::span<const double> x) {
    switch (n.op) {
        case OpCode::Const: return n.value;
        case OpCode::Var: return x[static_cast<std::size_t>(n.index)];
        case OpCode::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
        case OpCode::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
        case OpCode::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
        case OpCode::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
        case OpCode::Pow: return std::pow(eval_node(*n.lhs, x), eval_node(*n.rhs, x));
        case OpCode::Neg: return -eval_node(*n.lhs, x);
        case OpCode::Exp: return std::exp(eval_node(*n.lhs, x));
        case OpCode::Log: return std::log(eval_node(*n.lhs, x));
        case OpCode::Sqrt: return std::sqrt(eval_node(*n.lhs, x));
        case OpCode::Abs: return std::fabs(eval_node(*n.lhs, x));
    }
    return 0.0;
}

std::string print_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Parenthesizes by operator precedence so the printed form re-parses to
// the identical tree.
void print_node(const Node& n, std::string& out) {
    auto wrap = [&](const Node& child) {
        out.push_back('(');
        print_node(child, out);
        out.push_back(')');
    };
    switch (n.op) {
        case OpCode::Const:
            if (n.value < 0) {
                out.push_back('(');
                out += print_number(n.value);
                out.push_back(')');
            } else {
                out += print_number(n.value);
            }
            break;
        case OpCode::Var:
            out += "x" + std::to_string(n.index + 1);
            break;
        case OpCode::Add:
            wrap(*n.lhs); out.push_back('+'); wrap(*n.rhs); break;
        case OpCode::Sub:
            wrap(*n.lhs); out.push_back('-'); wrap(*n.rhs); break;
        case OpCode::Mul:
            wrap(*n.lhs); out.push_back('*'); wrap(*n.rhs); break;
        case OpCode::Div:
            wrap(*n.lhs); out.push_back('/'); wrap(*n.rhs); break;
        case OpCode::Pow:
            wrap(*n.lhs); out.push_back('^'); wrap(*n.rhs); break;
        case OpCode::Neg:
            out.push_back('-'); wrap(*n.lhs); break;
        case OpCode::Exp: out += "exp"; wrap(*n.lhs); break;
        case OpCode::Log: out += "log"; wrap(*n.lhs); break;
        case OpCode::Sqrt: out += "sqrt"; wrap(*n.lhs); break;
        case OpCode::Abs: out += "abs"; wrap(*n.lhs); break;
    }
}

}  // namespace

// Recursive descent over the grammar
//   sum     := product (('+'|'-') product)*
//   product := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          (right associative)
//   atom    := number | identifier | identifier '(' sum ')' | '(' sum ')'
class ExprParser {
public:
    ExprParser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    Expr::NodePtr parse() {
        auto node = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected token '" + std::string(1, text_[pos_]) + "'", pos_);
        return node;
    }

private:
    using NodePtr = Expr::NodePtr;

    NodePtr make(OpCode op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make(OpCode::Add, lhs, parse_product());
            else if (accept('-')) lhs = make(OpCode::Sub, lhs, parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(OpCode::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = make(OpCode::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(OpCode::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_atom();
        if (accept('^')) return make(OpCode::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw ParseError("unexpected token '" + std::string(1, c) + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        const char* begin = text_.c_str() + start;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", start);
        pos_ = start + static_cast<std::size_t>(end - begin);
        auto n = make(OpCode::Const);
        const_cast<Node&>(*n).value = v;
        return n;
    }

    NodePtr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);

        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::stoi(name.substr(1));
                if (idx < 1 || idx > dim_)
                    throw ConfigError("variable " + name + " out of range for dimension " +
                                      std::to_string(dim_));
                auto n = make(OpCode::Var);
                const_cast<Node&>(*n).index = idx - 1;
                return n;
            }
        }

        OpCode fn;
        if (name == "exp") fn = OpCode::Exp;
        else if (name == "log") fn = OpCode::Log;
        else if (name == "sqrt") fn = OpCode::Sqrt;
        else if (name == "abs") fn = OpCode::Abs;
        else throw ConfigError("unknown identifier '" + name + "'");

        if (!accept('(')) throw ParseError("expected '(' after function " + name, pos_);
        auto arg = parse_sum();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make(fn, arg);
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

Expr Expr::parse(const std::string& text, int d) {
    if (d < 1) throw ConfigError("dimension must be >= 1");
    ExprParser parser(text, d);
    return Expr(parser.parse(), d);
}

Expr Expr::constant(double c) {
    auto n = std::make_shared<Node>();
    n->op = OpCode::Const;
    n->value = c;
    return Expr(n, 1);
}

Expr Expr::variable(int index, int d) {
    if (index < 0 || index >= d) throw ConfigError("variable index out of range");
    auto n = std::make_shared<Node>();
    n->op = OpCode::Var;
    n->index = index;
    return Expr(n, d);
}

double Expr::eval(std::span<const double> x) const { return eval_node(*root_, x); }

double Expr::eval1(double x) const { return eval_node(*root_, std::span<const double>(&x, 1)); }

std::string Expr::print() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

}  // namespace ergo
