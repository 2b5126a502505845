#include "ergo/trace.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ergo/errors.hpp"

namespace ergo {

std::string format_sig17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void SemigroupTrace::write_csv(std::ostream& os) const {
    for (const auto& m : metadata) os << "# " << m << "\n";
    os << "t,variance,weighted_variance,entropy,tv,psi_functional\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_sig17(times[i]) << ',' << format_sig17(variance[i]) << ','
           << format_sig17(weighted_variance[i]) << ',' << format_sig17(entropy[i]) << ','
           << format_sig17(tv[i]) << ',' << format_sig17(psi_functional[i]) << '\n';
    }
}

void McTrace::write_csv(std::ostream& os) const {
    for (const auto& m : metadata) os << "# " << m << "\n";
    os << "t,value,stderr\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_sig17(times[i]) << ',' << format_sig17(values[i]) << ','
           << format_sig17(stderrs.empty() ? 0.0 : stderrs[i]) << '\n';
    }
}

ExpFit fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                       const std::vector<double>* stderrs, double win_hi_frac,
                       double win_lo_frac) {
    if (times.size() != values.size() || times.empty())
        throw ConfigError("fit_exponential: malformed trace");
    double y0 = values.front();
    if (!(y0 > 0)) {
        // fall back to the largest positive value as the reference scale
        for (double v : values) y0 = std::max(y0, v);
        if (!(y0 > 0)) throw NumericalError("fit_exponential: no positive values in trace");
    }

    ExpFit fit;
    double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
    double win_lo = std::numeric_limits<double>::infinity(), win_hi = 0;
    int count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double v = values[i];
        if (!(v > 0)) continue;
        double frac = v / y0;
        if (frac > win_hi_frac || frac < win_lo_frac) continue;
        double y = std::log(v);
        double wgt = 1.0;
        if (stderrs && (*stderrs)[i] > 0) {
            double rel = (*stderrs)[i] / v;  // SE of log
            wgt = 1.0 / (rel * rel);
        }
        sw += wgt;
        st += wgt * times[i];
        sy += wgt * y;
        stt += wgt * times[i] * times[i];
        sty += wgt * times[i] * y;
        win_lo = std::min(win_lo, times[i]);
        win_hi = std::max(win_hi, times[i]);
        ++count;
    }
    if (count < 3) throw NumericalError("fit_exponential: window too short (need >= 3 points)");
    double denom = sw * stt - st * st;
    if (std::fabs(denom) < 1e-300) throw NumericalError("fit_exponential: degenerate window");
    double slope = (sw * sty - st * sy) / denom;
    double inter = (sy - slope * st) / sw;

    // Unweighted R^2 over the window.
    double ybar = sy / sw, ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double v = values[i];
        if (!(v > 0)) continue;
        double frac = v / y0;
        if (frac > win_hi_frac || frac < win_lo_frac) continue;
        double y = std::log(v);
        double pred = inter + slope * times[i];
        ss_tot += (y - ybar) * (y - ybar);
        ss_res += (y - pred) * (y - pred);
    }
    fit.rate = -slope;
    fit.intercept = inter;
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window_lo = win_lo;
    fit.window_hi = win_hi;
    fit.points = count;
    return fit;
}

}  // namespace ergo
