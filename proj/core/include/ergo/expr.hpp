#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ergo {

// Arithmetic expression over variables x1..xd with +,-,*,/,^ and the
// function set exp, log, sqrt, abs. Immutable after parsing.
class Expr {
public:
    // Parses `text` against dimension `d`. Throws ParseError on syntax
    // errors (with position), ConfigError on unknown identifiers or a
    // variable index above `d`.
    static Expr parse(const std::string& text, int d);

    // Constant-folding constructors used by generated expressions.
    static Expr constant(double c);
    static Expr variable(int index, int d);

    double eval(std::span<const double> x) const;
    double eval1(double x) const;

    // Round-trippable text form: parse(print()) evaluates identically.
    std::string print() const;

    int dimension() const { return dim_; }

    Expr(const Expr&) = default;
    Expr(Expr&&) noexcept = default;
    Expr& operator=(const Expr&) = default;
    Expr& operator=(Expr&&) noexcept = default;

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

private:
    explicit Expr(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

    NodePtr root_;
    int dim_ = 1;

    friend class ExprParser;
};

}  // namespace ergo
