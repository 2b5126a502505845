#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ergo/expr.hpp"

namespace ergo {

// Rate function phi on [1, inf) from the drift condition
// LV <= -phi(V) + b 1_C. Linear phi gives geometric decay; the log-power
// family covers the sub-exponential scenarios; General admits arbitrary
// parsed shapes (e.g. the sub-linear powers of the heavy-tail case).
class PhiSpec {
public:
    struct Linear {
        double alpha;
    };
    // phi(u) = c * u * log^{-r}(e + u)
    struct LogPower {
        double c;
        double r;
    };
    struct General {
        Expr expr;  // over u = x1
    };

    static PhiSpec linear(double alpha);
    static PhiSpec log_power(double c, double r);
    static PhiSpec general(Expr expr, std::optional<double> lower_bound = std::nullopt);

    double operator()(double u) const;

    // R = inf_{u >= 1} phi(u), computed on a log-spaced grid unless supplied.
    double lower_bound() const { return r_; }
    // Verified monotonicity flag (needed by the case-(2) constants).
    bool increasing() const { return increasing_; }

    bool is_linear() const { return std::holds_alternative<Linear>(kind_); }
    double linear_alpha() const;
    std::string describe() const;

    PhiSpec scaled(double factor) const;  // factor * phi(u)

private:
    explicit PhiSpec(std::variant<Linear, LogPower, General> kind);

    std::variant<Linear, LogPower, General> kind_;
    double r_ = 0;
    bool increasing_ = false;
    double scale_ = 1.0;

    void finalize(std::optional<double> supplied_bound);
};

}  // namespace ergo
