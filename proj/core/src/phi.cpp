#include "ergo/phi.hpp"

#include <cmath>
#include <cstdio>

#include "ergo/errors.hpp"

namespace ergo {

PhiSpec::PhiSpec(std::variant<Linear, LogPower, General> kind) : kind_(std::move(kind)) {}

PhiSpec PhiSpec::linear(double alpha) {
    if (alpha <= 0) throw ConfigError("linear phi requires alpha > 0");
    PhiSpec p(Linear{alpha});
    p.finalize(alpha);  // inf on [1, inf) is at u = 1
    return p;
}

PhiSpec PhiSpec::log_power(double c, double r) {
    if (c <= 0) throw ConfigError("log-power phi requires c > 0");
    PhiSpec p(LogPower{c, r});
    p.finalize(std::nullopt);
    return p;
}

PhiSpec PhiSpec::general(Expr expr, std::optional<double> lower_bound) {
    if (expr.dimension() != 1) throw ConfigError("phi expression must be over u = x1");
    PhiSpec p(General{std::move(expr)});
    p.finalize(lower_bound);
    return p;
}

double PhiSpec::operator()(double u) const {
    double v;
    if (auto* l = std::get_if<Linear>(&kind_)) {
        v = l->alpha * u;
    } else if (auto* lp = std::get_if<LogPower>(&kind_)) {
        v = lp->c * u * std::pow(std::log(M_E + u), -lp->r);
    } else {
        v = std::get<General>(kind_).expr.eval1(u);
    }
    return scale_ * v;
}

void PhiSpec::finalize(std::optional<double> supplied_bound) {
    // Scan a log-spaced grid on [1, 1e12] for positivity, monotonicity and
    // the lower bound.
    const int kn = 4096;
    double inf = std::numeric_limits<double>::infinity();
    double prev = -inf;
    increasing_ = true;
    for (int i = 0; i <= kn; ++i) {
        double u = std::pow(10.0, 12.0 * i / kn);
        double v = (*this)(u);
        if (!(v > 0))
            throw ConfigError("phi must be positive on [1, inf); phi(" + std::to_string(u) +
                              ") = " + std::to_string(v));
        if (v < prev - 1e-12 * std::fabs(prev)) increasing_ = false;
        prev = v;
        inf = std::min(inf, v);
    }
    r_ = supplied_bound.value_or(inf);
}

double PhiSpec::linear_alpha() const {
    if (auto* l = std::get_if<Linear>(&kind_)) return scale_ * l->alpha;
    throw ConfigError("phi is not linear");
}

std::string PhiSpec::describe() const {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    std::string s;
    if (auto* l = std::get_if<Linear>(&kind_)) s = "linear(alpha=" + num(scale_ * l->alpha) + ")";
    else if (auto* lp = std::get_if<LogPower>(&kind_))
        s = "logpower(c=" + num(scale_ * lp->c) + ",r=" + num(lp->r) + ")";
    else
        s = "general(" + std::get<General>(kind_).expr.print() +
            (scale_ != 1.0 ? ", scale=" + num(scale_) : "") + ")";
    return s;
}

PhiSpec PhiSpec::scaled(double factor) const {
    if (factor <= 0) throw ConfigError("phi scale factor must be positive");
    PhiSpec p = *this;
    p.scale_ *= factor;
    p.r_ *= factor;
    return p;
}

}  // namespace ergo
