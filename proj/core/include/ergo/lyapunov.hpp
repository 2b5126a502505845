#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ergo/evolve.hpp"
#include "ergo/generator.hpp"
#include "ergo/phi.hpp"

namespace ergo {

// Candidate Lyapunov functions V >= 1 with closed-form LV where the
// structure allows it. Kinetic forms use Lambda_{a,b}(x,v) =
// a(|v|^2 + 2F(x)) + b(v G'(x) + G(x)).
class LyapunovCandidate {
public:
    // V = e^{a F}
    struct ExpPotential {
        double a;
        Potential F;
    };
    // V = e^{g(|x|)} with g(r) = a r^q outside radius M and an even C^2
    // polynomial bridge inside.
    struct ExpRadial {
        double a;
        double q;
        double matching_radius;  // M
        double c0, c2, c4;       // bridge coefficients, set on construction
    };
    // V = (1 + |x|)^a
    struct PowerRadial {
        double a;
    };
    // V = e^{Lambda_{a,b} - shift}
    struct KineticExp {
        double a, b;
        std::shared_ptr<const Potential> G;
        double shift;  // inf Lambda over the verification grid
    };
    // V = Lambda_{a,b} + M, with G = F^{1-alpha} when alpha >= 0 is given.
    struct KineticAffine {
        double a, b;
        std::shared_ptr<const Potential> G;  // null when alpha-derived
        double alpha = -1;                   // G = F^{1-alpha} if >= 0
        double M;
    };
    // V = e^{s Lambda^delta - shift}; Lambda must stay positive.
    struct KineticExpPow {
        double a, b, s, delta;
        std::shared_ptr<const Potential> G;
        double shift;
    };
    struct Custom {
        Expr expr;
    };

    static LyapunovCandidate exp_potential(double a, Potential F);
    static LyapunovCandidate exp_radial(double a, double q, double matching_radius = 1.0);
    static LyapunovCandidate power_radial(double a);
    static LyapunovCandidate kinetic_exp(double a, double b, Potential G, double shift = 0.0);
    static LyapunovCandidate kinetic_affine(double a, double b, Potential G, double M);
    static LyapunovCandidate kinetic_affine_from_alpha(double a, double b, double alpha, double M);
    static LyapunovCandidate kinetic_exp_pow(double a, double b, double s, double delta,
                                             Potential G, double shift = 0.0);
    static LyapunovCandidate custom(Expr expr);

    // V(x); x is the full state ((x, v) for kinetic forms).
    double value(const GeneratorSpec& L, std::span<const double> x) const;
    // L V(x) by exact chain rule where the form allows, finite differences
    // for Custom.
    double apply_generator(const GeneratorSpec& L, std::span<const double> x) const;

    std::string describe() const;
    const std::variant<ExpPotential, ExpRadial, PowerRadial, KineticExp, KineticAffine,
                       KineticExpPow, Custom>&
    form() const {
        return form_;
    }

private:
    explicit LyapunovCandidate(std::variant<ExpPotential, ExpRadial, PowerRadial, KineticExp,
                                            KineticAffine, KineticExpPow, Custom>
                                   form)
        : form_(std::move(form)) {}

    std::variant<ExpPotential, ExpRadial, PowerRadial, KineticExp, KineticAffine, KineticExpPow,
                 Custom>
        form_;
};

// Set C of the drift condition: a sublevel set {V <= theta} or a centered
// ball in the state space.
struct DriftSet {
    enum class Kind { Sublevel, Ball } kind = Kind::Sublevel;
    double threshold = 0;  // theta or radius

    static DriftSet sublevel(double theta) { return {Kind::Sublevel, theta}; }
    static DriftSet ball(double radius) { return {Kind::Ball, radius}; }
    std::string describe() const;
};

// Verification grid: 1D box or kinetic tensor box.
struct VerifyGrid {
    Grid1D x;
    std::optional<Grid1D> v;  // engaged for kinetic verification

    bool kinetic() const { return v.has_value(); }
};

struct DriftCertificate {
    std::string candidate;
    std::string phi;
    double b = 0;
    DriftSet set;
    bool valid = false;
    double worst_margin = 0;       // min over nodes of -LV - phi(V) + b 1_C
    std::vector<double> worst_node;
    double tol = 0;                // tolerance used for the VALID flag
    double margin_scale = 0;       // max |LV| over the grid
    std::string grid_spec;
    std::map<std::string, double> parameters;  // delta, annulus fraction, ...

    void write_report(std::ostream& os) const;
};

// Relative drift tolerance: a certificate is VALID when every node margin
// is >= -tol_drift * max|LV|.
inline constexpr double kDriftTol = 1e-8;

// Checks LV(x) <= -phi(V(x)) + b 1_C(x) at every grid node.
DriftCertificate verify_drift(const GeneratorSpec& L, const LyapunovCandidate& cand,
                              const PhiSpec& phi, double b, const DriftSet& C,
                              const VerifyGrid& grid);

struct FitResult {
    DriftCertificate certificate;
    double level = 0;   // fitted alpha (linear) or c (sub-linear families)
    double theta = 0;   // sublevel threshold of C
    double plateau = 0; // extrapolated asymptotic level of -LV/phi0(V)
};

enum class PhiFamily { Linear, LogPower, General };

// Automates the "for |x| large" arguments: computes the pointwise ratio
// -LV / phi0(V) (phi0 the unit family member), extrapolates its asymptotic
// level over the outer annulus, and picks the smallest sublevel set C
// whose exterior keeps the ratio above half that level. b is the maximum
// of LV + phi(V) over C. Throws NumericalError with the ratio profile when
// no sublevel works.
FitResult fit_drift_params(const GeneratorSpec& L, const LyapunovCandidate& cand,
                           PhiFamily family, const VerifyGrid& grid,
                           double log_power_r = 1.0, const Expr* general_phi = nullptr);

// H_a(x) = 1/2 Delta F + (a/2 - 1) |grad F|^2 for a in (0, 2); applying
// the mu-symmetric generator to V = e^{aF} equals a V H_a.
double h_a(const Potential& F, double a, std::span<const double> x);

// Annulus fraction used for every "liminf as |x| -> infinity" proxy.
inline constexpr double kAnnulusFraction = 0.2;

}  // namespace ergo
