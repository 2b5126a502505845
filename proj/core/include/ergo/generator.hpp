#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ergo/expr.hpp"
#include "ergo/grid.hpp"
#include "ergo/potential.hpp"

namespace ergo {

// L = 1/2 Delta - grad F . grad, invariant measure mu ~ e^{-2F} dx.
struct OverdampedKind {
    Potential potential;
};

// L = 1/2 sum sigma_i^2 d_ii + drift . grad with diagonal constant sigma.
// Drift components are parsed expressions over x1..xd.
struct GeneralDiffusionKind {
    std::vector<double> sigma;
    std::vector<Expr> drift;
};

// Kinetic Fokker-Planck on (x, v):
//   L = 1/2 Delta_v + v . grad_x - (v + grad F(x)) . grad_v,
// invariant measure e^{-(|v|^2 + 2 F(x))} dx dv. Fully degenerate: the
// carre du champ only sees velocity derivatives.
struct KineticKind {
    Potential potential;  // F on the position coordinates
};

class GeneratorSpec {
public:
    static GeneratorSpec overdamped(Potential F);
    static GeneratorSpec general_diffusion(std::vector<double> sigma, std::vector<Expr> drift);
    static GeneratorSpec kinetic(Potential F);

    // Dimension of the state the generator acts on (2d for kinetic).
    int state_dimension() const { return state_dim_; }
    // Dimension of the position space d.
    int position_dimension() const { return pos_dim_; }

    bool is_overdamped() const { return std::holds_alternative<OverdampedKind>(kind_); }
    bool is_kinetic() const { return std::holds_alternative<KineticKind>(kind_); }
    bool is_general() const { return std::holds_alternative<GeneralDiffusionKind>(kind_); }

    const Potential& potential() const;
    const std::variant<OverdampedKind, GeneralDiffusionKind, KineticKind>& kind() const {
        return kind_;
    }

private:
    GeneratorSpec(std::variant<OverdampedKind, GeneralDiffusionKind, KineticKind> kind,
                  int state_dim, int pos_dim)
        : kind_(std::move(kind)), state_dim_(state_dim), pos_dim_(pos_dim) {}

    std::variant<OverdampedKind, GeneralDiffusionKind, KineticKind> kind_;
    int state_dim_;
    int pos_dim_;
};

// Multivariate polynomial with closed-form derivatives.
class Polynomial {
public:
    struct Monomial {
        double coef;
        std::vector<int> exps;
    };

    Polynomial(int dim, std::vector<Monomial> terms) : dim_(dim), terms_(std::move(terms)) {}

    static Polynomial constant(int dim, double c);
    // c * x_{index+1}^power
    static Polynomial monomial(int dim, int index, int power, double c = 1.0);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;

    int dimension() const { return dim_; }
    double value(std::span<const double> x) const;
    Vector grad(std::span<const double> x) const;
    Matrix hessian(std::span<const double> x) const;

private:
    int dim_;
    std::vector<Monomial> terms_;
};

// Grid-sampled function with second-order stencils, one-sided at edges.
struct GridFunction {
    Grid1D grid;
    std::vector<double> values;

    double value(double x) const;
    double deriv(double x) const;
    double second_deriv(double x) const;
};

// Test function with value, gradient and Hessian access: the closed-form
// families the provers use ("nice f"), or a 1D grid function.
class TestFunction {
public:
    struct ExpOfPotential {
        double a;
        Potential pot;
    };

    TestFunction(Polynomial p) : impl_(std::move(p)) {}
    TestFunction(ExpOfPotential e) : impl_(std::move(e)) {}
    TestFunction(GridFunction g) : impl_(std::move(g)) {}

    static TestFunction coordinate(int dim, int index);

    double value(std::span<const double> x) const;
    Vector grad(std::span<const double> x) const;
    Matrix hessian(std::span<const double> x) const;

private:
    std::variant<Polynomial, ExpOfPotential, GridFunction> impl_;
};

// Pointwise generator application by exact chain rule on the closed-form
// families (second-order stencils for grid functions).
double apply(const GeneratorSpec& L, const TestFunction& f, std::span<const double> x);

// Pointwise carre du champ Gamma(f): |grad f|^2 (overdamped),
// |sigma^T grad f|^2 (general diffusion), |grad_v f|^2 (kinetic).
double carre_du_champ(const GeneratorSpec& L, const TestFunction& f, std::span<const double> x);

// Polarized form Gamma(f, g).
double carre_du_champ(const GeneratorSpec& L, const TestFunction& f, const TestFunction& g,
                      std::span<const double> x);

}  // namespace ergo
