#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ergo/expr.hpp"

namespace ergo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// F(x) = ((delta^2 + |x|^2)^(1/2))^p. delta >= 0 is the smoothing scale;
// delta = 0 keeps the pure power |x|^p and excludes the origin from the
// domain of the derivatives.
struct PowerForm {
    double p;
    double delta;
};

// F(x) = ((d+p)/2) * log(1 + |x|), the density (1+|x|)^-(d+p).
struct HeavyTailForm {
    double p;
};

// F(x) = kappa * |x|^2 / 2.
struct QuadraticForm {
    double kappa;
};

struct CustomForm {
    Expr expr;
};

// Scalar potential F on R^d defining the Gibbs measure mu ~ e^{-2F} dx.
// Builtin families carry closed-form derivatives; custom expressions fall
// back to central finite differences with step h = eps^(1/3) * max(1,|x_i|).
class Potential {
public:
    static Potential power(double p, double delta, int d = 1);
    static Potential heavy_tail(double p, int d = 1);
    static Potential quadratic(double kappa, int d = 1);
    static Potential custom(Expr expr);

    // Parses an expression over x1..xd into a Custom potential.
    static Potential parse(const std::string& text, int d);

    int dimension() const { return dim_; }

    double value(std::span<const double> x) const;
    Vector grad(std::span<const double> x) const;
    double laplacian(std::span<const double> x) const;
    Matrix hessian(std::span<const double> x) const;

    // 1D conveniences.
    double value1(double x) const { return value({&x, 1}); }
    double grad1(double x) const { return grad({&x, 1})(0); }

    // Round-trippable expression form of F.
    std::string print() const;

    bool is_custom() const { return std::holds_alternative<CustomForm>(form_); }
    const std::variant<PowerForm, HeavyTailForm, QuadraticForm, CustomForm>& form() const {
        return form_;
    }

private:
    Potential(std::variant<PowerForm, HeavyTailForm, QuadraticForm, CustomForm> form, int d)
        : form_(std::move(form)), dim_(d) {}

    std::variant<PowerForm, HeavyTailForm, QuadraticForm, CustomForm> form_;
    int dim_;
};

}  // namespace ergo
