#include "ergo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ergo/errors.hpp"
#include "ergo/rates.hpp"
#include "ergo/rng.hpp"

namespace ergo::mc {

namespace {

constexpr std::size_t kChunk = 4096;

// Runs fn(chunk_index, begin, end) over fixed-size chunks on `workers`
// threads. Chunk boundaries are independent of the worker count, so any
// per-chunk partial results combine identically regardless of scheduling.
template <typename Fn>
void run_chunked(std::size_t n, int workers, Fn&& fn) {
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    if (workers <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            fn(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        }
    };
    std::vector<std::thread> pool;
    int count = std::min<int>(workers, static_cast<int>(chunks));
    pool.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

// Pairwise combination of per-chunk partials in fixed chunk order.
double combine(const std::vector<double>& parts) {
    if (parts.empty()) return 0;
    std::vector<double> acc = parts;
    while (acc.size() > 1) {
        std::size_t half = (acc.size() + 1) / 2;
        for (std::size_t i = 0; i + half < acc.size(); ++i) acc[i] += acc[i + half];
        acc.resize(half);
    }
    return acc[0];
}

}  // namespace

Ensemble make_ensemble(const GeneratorSpec& L, std::size_t n, double dt, std::uint64_t seed) {
    if (n < 1) throw ConfigError("ensemble needs n >= 1 particles");
    if (dt <= 0) throw ConfigError("ensemble needs dt > 0");
    Ensemble e;
    e.d = L.position_dimension();
    e.kinetic = L.is_kinetic();
    e.pos.assign(n * static_cast<std::size_t>(e.d), 0.0);
    if (e.kinetic) e.vel.assign(n * static_cast<std::size_t>(e.d), 0.0);
    e.seed = seed;
    e.dt = dt;
    return e;
}

void step(Ensemble& e, const GeneratorSpec& L, int workers) {
    std::size_t n = e.size();
    int d = e.d;
    double dt = e.dt;
    double sq = std::sqrt(dt);
    std::uint64_t sidx = e.step_index;
    std::atomic<long long> bad{-1};

    if (L.is_overdamped() || L.is_general()) {
        const Potential* F = L.is_overdamped() ? &L.potential() : nullptr;
        const GeneralDiffusionKind* gd =
            L.is_general() ? &std::get<GeneralDiffusionKind>(L.kind()) : nullptr;
        run_chunked(n, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (std::size_t p = lo; p < hi; ++p) {
                double* xp = &e.pos[p * static_cast<std::size_t>(d)];
                for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = xp[i];
                for (int i = 0; i < d; ++i) {
                    double drift, sig;
                    if (F) {
                        drift = -F->grad(x)(i);
                        sig = 1.0;
                    } else {
                        drift = gd->drift[static_cast<std::size_t>(i)].eval(x);
                        sig = gd->sigma[static_cast<std::size_t>(i)];
                    }
                    double xi = CounterRng::normal(e.seed, p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i), sidx);
                    xp[i] += drift * dt + sig * sq * xi;
                    if (!std::isfinite(xp[i])) bad.store(static_cast<long long>(p));
                }
            }
        });
    } else {
        const Potential& F = L.potential();
        run_chunked(n, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (std::size_t p = lo; p < hi; ++p) {
                double* xp = &e.pos[p * static_cast<std::size_t>(d)];
                double* vp = &e.vel[p * static_cast<std::size_t>(d)];
                for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = xp[i];
                Vector gF = F.grad(x);
                for (int i = 0; i < d; ++i) {
                    double xi = CounterRng::normal(e.seed, p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i), sidx);
                    xp[i] += vp[i] * dt;
                    vp[i] += -(vp[i] + gF(i)) * dt + sq * xi;
                    if (!std::isfinite(xp[i]) || !std::isfinite(vp[i]))
                        bad.store(static_cast<long long>(p));
                }
            }
        });
    }
    if (bad.load() >= 0)
        throw NumericalError("non-finite state at particle " + std::to_string(bad.load()) +
                             " after step " + std::to_string(sidx));
    ++e.step_index;
    e.time += dt;
}

namespace {

double chunked_mean(std::size_t n, int workers,
                    const std::function<double(std::size_t)>& value) {
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> parts(chunks, 0.0);
    run_chunked(n, workers, [&](std::size_t c, std::size_t lo, std::size_t hi) {
        double s = 0;
        for (std::size_t p = lo; p < hi; ++p) s += value(p);
        parts[c] = s;
    });
    return combine(parts) / static_cast<double>(n);
}

}  // namespace

double mean_position_moment(const Ensemble& e, int axis, int power, int workers) {
    return chunked_mean(e.size(), workers, [&](std::size_t p) {
        double v = e.pos[p * static_cast<std::size_t>(e.d) + static_cast<std::size_t>(axis)];
        double r = 1;
        for (int k = 0; k < power; ++k) r *= v;
        return r;
    });
}

double mean_velocity_moment(const Ensemble& e, int axis, int power, int workers) {
    if (!e.kinetic) throw ConfigError("velocity moments need a kinetic ensemble");
    return chunked_mean(e.size(), workers, [&](std::size_t p) {
        double v = e.vel[p * static_cast<std::size_t>(e.d) + static_cast<std::size_t>(axis)];
        double r = 1;
        for (int k = 0; k < power; ++k) r *= v;
        return r;
    });
}

double mean_potential(const Ensemble& e, const Potential& F, int workers) {
    return chunked_mean(e.size(), workers, [&](std::size_t p) {
        return F.value({&e.pos[p * static_cast<std::size_t>(e.d)], static_cast<std::size_t>(e.d)});
    });
}

McTrace autocovariance_trace(const GeneratorSpec& L, const Expr& f, const GibbsMeasure& init,
                             double horizon, double dt, const std::vector<double>& lags,
                             std::uint64_t seed, int batches) {
    if (!L.is_overdamped())
        throw ConfigError("autocovariance identity needs a reversible (overdamped) generator");
    if (L.position_dimension() != 1)
        throw ConfigError("autocovariance paths are 1D");
    std::size_t steps = static_cast<std::size_t>(horizon / dt);
    if (steps < 100) throw ConfigError("horizon too short");

    Ensemble e = make_ensemble(L, 1, dt, seed);
    e.pos[0] = init.sample(1, seed)[0];

    std::vector<double> path(steps + 1);
    path[0] = f.eval1(e.pos[0]);
    for (std::size_t s = 0; s < steps; ++s) {
        step(e, L, 1);
        path[s + 1] = f.eval1(e.pos[0]);
    }

    McTrace trace;
    trace.kind = "autocovariance";
    trace.metadata.push_back(std::string("rng = ") + CounterRng::kAlgorithm);
    trace.metadata.push_back("seed = " + std::to_string(seed));
    trace.metadata.push_back("f = " + f.print());
    trace.metadata.push_back("dt = " + format_sig17(dt) + ", horizon = " + format_sig17(horizon));

    std::size_t batch_len = path.size() / static_cast<std::size_t>(batches);
    for (double lag : lags) {
        auto k = static_cast<std::size_t>(std::lround(lag / dt));
        if (k >= batch_len) throw ConfigError("lag exceeds the batch length");
        std::vector<double> est(static_cast<std::size_t>(batches));
        for (int b = 0; b < batches; ++b) {
            std::size_t lo = static_cast<std::size_t>(b) * batch_len;
            std::size_t hi = lo + batch_len;
            double mean = 0;
            for (std::size_t i = lo; i < hi; ++i) mean += path[i];
            mean /= static_cast<double>(batch_len);
            double cov = 0;
            std::size_t count = 0;
            for (std::size_t i = lo; i + k < hi; ++i) {
                cov += (path[i] - mean) * (path[i + k] - mean);
                ++count;
            }
            est[static_cast<std::size_t>(b)] = cov / static_cast<double>(count);
        }
        double m = 0;
        for (double v : est) m += v;
        m /= batches;
        double var = 0;
        for (double v : est) var += (v - m) * (v - m);
        var /= std::max(1, batches - 1);
        trace.times.push_back(static_cast<double>(k) * dt);
        trace.values.push_back(m);
        trace.stderrs.push_back(std::sqrt(var / batches));
    }
    return trace;
}

InitialLaw InitialLaw::shifted_gaussian(double center, double sdev, double vcenter,
                                        double vsdev) {
    InitialLaw law;
    law.kind = Kind::ShiftedGaussian;
    law.center = center;
    law.sdev = sdev;
    law.vcenter = vcenter;
    law.vsdev = vsdev;
    return law;
}

InitialLaw InitialLaw::heavy_tail_ratio(double a) {
    InitialLaw law;
    law.kind = Kind::HeavyTailRatio;
    law.heavy_a = a;
    return law;
}

namespace {

void sample_initial(const InitialLaw& law, const GibbsMeasure& mx, bool kinetic,
                    std::uint64_t seed, Ensemble& e) {
    std::size_t n = e.size();
    switch (law.kind) {
        case InitialLaw::Kind::Stationary: {
            auto xs = mx.sample(n, seed);
            for (std::size_t p = 0; p < n; ++p) e.pos[p] = xs[p];
            if (kinetic)
                for (std::size_t p = 0; p < n; ++p)
                    e.vel[p] = CounterRng::normal(seed, 7001, p) * std::sqrt(0.5);
            break;
        }
        case InitialLaw::Kind::ShiftedGaussian: {
            for (std::size_t p = 0; p < n; ++p)
                e.pos[p] = law.center + law.sdev * CounterRng::normal(seed, 7101, p);
            if (kinetic)
                for (std::size_t p = 0; p < n; ++p)
                    e.vel[p] = law.vcenter + law.vsdev * CounterRng::normal(seed, 7102, p);
            break;
        }
        case InitialLaw::Kind::HeavyTailRatio: {
            // Rejection against a wide Gaussian proposal; the density ratio
            // h mu has heavy polynomial tails, so this is for qualitative
            // runs at moderate n.
            double a = law.heavy_a;
            auto target = [&](double x, double v) {
                double base = std::exp(-(v * v + 2.0 * mx.potential().value1(x)));
                double h = std::exp(x * x + v * v) /
                           std::pow(1.0 + std::fabs(x) * std::fabs(x) + std::fabs(v) * std::fabs(v),
                                    a + 1.0);
                return h * base;
            };
            double proposal_sd = 3.0;
            std::uint64_t counter = 0;
            double mmax = 0;
            for (double x = -8; x <= 8; x += 0.05)
                for (double v = -8; v <= 8; v += 0.05)
                    mmax = std::max(mmax, target(x, v));
            for (std::size_t p = 0; p < n; ++p) {
                for (;;) {
                    double x = proposal_sd * CounterRng::normal(seed, 7201, counter);
                    double v = proposal_sd * CounterRng::normal(seed, 7202, counter);
                    double u = CounterRng::uniform(seed, 7203, counter);
                    ++counter;
                    double prop = std::exp(-(x * x + v * v) / (2 * proposal_sd * proposal_sd));
                    if (u * mmax * prop <= target(x, v) * 1.0 && std::fabs(x) < 8 &&
                        std::fabs(v) < 8) {
                        e.pos[p] = x;
                        if (kinetic) e.vel[p] = v;
                        break;
                    }
                    if (counter > 1000000ULL * (p + 1))
                        throw NumericalError("heavy-tail rejection sampler stalled");
                }
            }
            break;
        }
    }
}

struct HistogramSpec {
    double lo, hi;
    int bins;

    int index(double x) const {
        double pos = (x - lo) / (hi - lo) * bins;
        int i = static_cast<int>(pos);
        return std::clamp(i, 0, bins - 1);
    }
    double center(int i) const { return lo + (i + 0.5) * (hi - lo) / bins; }
};

struct DensityFunctionals {
    double entropy, tv, psi;
};

DensityFunctionals histogram_functionals(const std::vector<double>& counts, double total,
                                         const std::vector<double>& q,
                                         const std::vector<double>& wbar) {
    DensityFunctionals out{0, 0, 0};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double p = counts[i] / total;
        if (p > 0 && q[i] > 0) out.entropy += p * std::log(p / q[i]);
        out.tv += 0.5 * std::fabs(p - q[i]);
        if (q[i] > 0) out.psi += psi_sobolev(p / q[i]) * q[i] * (wbar.empty() ? 1.0 : wbar[i]);
    }
    return out;
}

}  // namespace

DensityTraces ensemble_density_trace(const GeneratorSpec& L, const InitialLaw& h0,
                                     const GibbsMeasure& m, const std::vector<double>& t_grid,
                                     std::uint64_t seed, const DensityTraceOptions& opts) {
    if (L.is_kinetic()) throw ConfigError("use kinetic_density_trace for kinetic ensembles");
    if (L.position_dimension() != 1) throw ConfigError("density traces are 1D");

    Ensemble e = make_ensemble(L, opts.particles, opts.dt, seed);
    sample_initial(h0, m, false, seed, e);

    HistogramSpec hist{-m.box_radius(), m.box_radius(), opts.bins};
    std::vector<double> q(static_cast<std::size_t>(opts.bins));
    for (int i = 0; i < opts.bins; ++i) {
        double a = hist.lo + i * (hist.hi - hist.lo) / opts.bins;
        double b = a + (hist.hi - hist.lo) / opts.bins;
        q[static_cast<std::size_t>(i)] = m.cdf(b) - m.cdf(a);
    }
    std::vector<double> wbar;
    if (!opts.weight_nodes.empty()) wbar = opts.weight_nodes;

    DensityTraces traces;
    traces.entropy.kind = "entropy";
    traces.tv.kind = "tv";
    traces.psi.kind = "psi_functional";
    for (auto* tr : {&traces.entropy, &traces.tv, &traces.psi}) {
        tr->metadata.push_back(std::string("rng = ") + CounterRng::kAlgorithm);
        tr->metadata.push_back("seed = " + std::to_string(seed));
        tr->metadata.push_back("particles = " + std::to_string(opts.particles) +
                               ", bins = " + std::to_string(opts.bins));
    }

    std::size_t n = e.size();
    std::size_t group = n / static_cast<std::size_t>(opts.batches);
    double t = 0;
    for (double t_out : t_grid) {
        while (t < t_out - 1e-12) {
            step(e, L, opts.workers);
            t = e.time;
        }
        // full-ensemble histogram and per-group histograms (fixed split)
        std::vector<double> counts(static_cast<std::size_t>(opts.bins), 0.0);
        std::vector<DensityFunctionals> per_group;
        double empty_mass = 0;
        for (int b = 0; b < opts.batches; ++b) {
            std::vector<double> gcounts(static_cast<std::size_t>(opts.bins), 0.0);
            std::size_t lo = static_cast<std::size_t>(b) * group;
            std::size_t hi = b + 1 == opts.batches ? n : lo + group;
            for (std::size_t p = lo; p < hi; ++p)
                gcounts[static_cast<std::size_t>(hist.index(e.pos[p]))] += 1.0;
            per_group.push_back(
                histogram_functionals(gcounts, static_cast<double>(hi - lo), q, wbar));
            for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += gcounts[i];
        }
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] == 0) empty_mass += q[i];
        if (empty_mass > 0.2) traces.empty_bin_warning = true;

        auto full = histogram_functionals(counts, static_cast<double>(n), q, wbar);
        auto push = [&](McTrace& tr, double value, auto select) {
            double mb = 0;
            for (auto& g : per_group) mb += select(g);
            mb /= opts.batches;
            double var = 0;
            for (auto& g : per_group) var += (select(g) - mb) * (select(g) - mb);
            var /= std::max(1, opts.batches - 1);
            tr.times.push_back(t);
            tr.values.push_back(value);
            tr.stderrs.push_back(std::sqrt(var / opts.batches));
        };
        push(traces.entropy, full.entropy, [](const DensityFunctionals& g) { return g.entropy; });
        push(traces.tv, full.tv, [](const DensityFunctionals& g) { return g.tv; });
        push(traces.psi, full.psi, [](const DensityFunctionals& g) { return g.psi; });
    }
    return traces;
}

DensityTraces kinetic_density_trace(const GeneratorSpec& L, const InitialLaw& h0,
                                    const GibbsMeasure& mx, double vbox,
                                    const std::vector<double>& t_grid, std::uint64_t seed,
                                    const DensityTraceOptions& opts) {
    if (!L.is_kinetic()) throw ConfigError("kinetic_density_trace needs a kinetic generator");

    Ensemble e = make_ensemble(L, opts.particles, opts.dt, seed);
    sample_initial(h0, mx, true, seed, e);

    HistogramSpec hx{-mx.box_radius(), mx.box_radius(), opts.bins};
    HistogramSpec hv{-vbox, vbox, opts.bins};
    // Product bin masses: x-marginal from mu_x, Gaussian e^{-v^2} marginal.
    std::vector<double> qx(static_cast<std::size_t>(opts.bins)), qv(static_cast<std::size_t>(opts.bins));
    for (int i = 0; i < opts.bins; ++i) {
        double a = hx.lo + i * (hx.hi - hx.lo) / opts.bins;
        double b = a + (hx.hi - hx.lo) / opts.bins;
        qx[static_cast<std::size_t>(i)] = mx.cdf(b) - mx.cdf(a);
        double av = hv.lo + i * (hv.hi - hv.lo) / opts.bins;
        double bv = av + (hv.hi - hv.lo) / opts.bins;
        qv[static_cast<std::size_t>(i)] = 0.5 * (std::erf(bv) - std::erf(av));
    }
    std::size_t nb = static_cast<std::size_t>(opts.bins) * static_cast<std::size_t>(opts.bins);
    std::vector<double> q(nb);
    for (int i = 0; i < opts.bins; ++i)
        for (int j = 0; j < opts.bins; ++j)
            q[static_cast<std::size_t>(i * opts.bins + j)] =
                qx[static_cast<std::size_t>(i)] * qv[static_cast<std::size_t>(j)];

    DensityTraces traces;
    traces.entropy.kind = "entropy";
    traces.tv.kind = "tv";
    traces.psi.kind = "psi_functional";
    for (auto* tr : {&traces.entropy, &traces.tv, &traces.psi}) {
        tr->metadata.push_back(std::string("rng = ") + CounterRng::kAlgorithm);
        tr->metadata.push_back("seed = " + std::to_string(seed));
        tr->metadata.push_back("particles = " + std::to_string(opts.particles) +
                               ", bins = " + std::to_string(opts.bins) + "x" +
                               std::to_string(opts.bins));
    }

    std::size_t n = e.size();
    std::size_t group = n / static_cast<std::size_t>(opts.batches);
    std::vector<double> wbar;  // unweighted Psi functional for ensembles
    double t = 0;
    for (double t_out : t_grid) {
        while (t < t_out - 1e-12) {
            step(e, L, opts.workers);
            t = e.time;
        }
        std::vector<double> counts(nb, 0.0);
        std::vector<DensityFunctionals> per_group;
        double empty_mass = 0;
        for (int b = 0; b < opts.batches; ++b) {
            std::vector<double> gcounts(nb, 0.0);
            std::size_t lo = static_cast<std::size_t>(b) * group;
            std::size_t hi = b + 1 == opts.batches ? n : lo + group;
            for (std::size_t p = lo; p < hi; ++p) {
                int bi = hx.index(e.pos[p]);
                int bj = hv.index(e.vel[p]);
                gcounts[static_cast<std::size_t>(bi * opts.bins + bj)] += 1.0;
            }
            per_group.push_back(
                histogram_functionals(gcounts, static_cast<double>(hi - lo), q, wbar));
            for (std::size_t i = 0; i < nb; ++i) counts[i] += gcounts[i];
        }
        for (std::size_t i = 0; i < nb; ++i)
            if (counts[i] == 0) empty_mass += q[i];
        if (empty_mass > 0.2) traces.empty_bin_warning = true;

        auto full = histogram_functionals(counts, static_cast<double>(n), q, wbar);
        auto push = [&](McTrace& tr, double value, auto select) {
            double mb = 0;
            for (auto& g : per_group) mb += select(g);
            mb /= opts.batches;
            double var = 0;
            for (auto& g : per_group) var += (select(g) - mb) * (select(g) - mb);
            var /= std::max(1, opts.batches - 1);
            tr.times.push_back(t);
            tr.values.push_back(value);
            tr.stderrs.push_back(std::sqrt(var / opts.batches));
        };
        push(traces.entropy, full.entropy, [](const DensityFunctionals& g) { return g.entropy; });
        push(traces.tv, full.tv, [](const DensityFunctionals& g) { return g.tv; });
        push(traces.psi, full.psi, [](const DensityFunctionals& g) { return g.psi; });
    }
    return traces;
}

RateFit fit_rate(const McTrace& trace, RateFit::Model model, std::optional<double> fixed_delta) {
    if (trace.times.size() < 10) throw ConfigError("fit window too short (need >= 10 points)");
    for (double v : trace.values)
        if (!(v > 0) && model == RateFit::Model::Subgeometric)
            throw NumericalError("negative values in trace");

    auto wls = [&](double delta) -> RateFit {
        double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
        int count = 0;
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            double v = trace.values[i];
            if (!(v > 0)) continue;
            double tt = std::pow(trace.times[i], delta);
            double y = std::log(v);
            double wgt = 1.0;
            if (!trace.stderrs.empty() && trace.stderrs[i] > 0) {
                double rel = trace.stderrs[i] / v;
                wgt = 1.0 / (rel * rel);
            }
            sw += wgt;
            st += wgt * tt;
            sy += wgt * y;
            stt += wgt * tt * tt;
            sty += wgt * tt * y;
            ++count;
        }
        RateFit fit;
        fit.model = model;
        fit.delta = delta;
        if (count < 3) return fit;
        double denom = sw * stt - st * st;
        if (std::fabs(denom) < 1e-300) return fit;
        double slope = (sw * sty - st * sy) / denom;
        double inter = (sy - slope * st) / sw;
        double ybar = sy / sw, sstot = 0, ssres = 0;
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            double v = trace.values[i];
            if (!(v > 0)) continue;
            double tt = std::pow(trace.times[i], delta);
            double y = std::log(v);
            sstot += (y - ybar) * (y - ybar);
            ssres += (y - (inter + slope * tt)) * (y - (inter + slope * tt));
        }
        fit.rho = -slope;
        fit.r2 = sstot > 0 ? 1.0 - ssres / sstot : 1.0;
        fit.window_lo = trace.times.front();
        fit.window_hi = trace.times.back();
        fit.reliable = fit.r2 > 0.95 && fit.rho > 0;
        if (sstot == 0) {
            fit.rho = 0;
            fit.reliable = false;
        }
        return fit;
    };

    if (model == RateFit::Model::Geometric) return wls(1.0);
    if (fixed_delta) return wls(*fixed_delta);
    RateFit best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int k = 5; k <= 100; ++k) {
        double delta = k / 100.0;
        RateFit f = wls(delta);
        double score = 1.0 - f.r2;
        if (score < best_score) {
            best_score = score;
            best = f;
        }
    }
    return best;
}

}  // namespace ergo::mc
