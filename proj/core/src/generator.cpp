#include "ergo/generator.hpp"

#include <cmath>

#include "ergo/errors.hpp"

namespace ergo {

GeneratorSpec GeneratorSpec::overdamped(Potential F) {
    int d = F.dimension();
    return GeneratorSpec(OverdampedKind{std::move(F)}, d, d);
}

GeneratorSpec GeneratorSpec::general_diffusion(std::vector<double> sigma,
                                               std::vector<Expr> drift) {
    if (sigma.empty() || sigma.size() != drift.size())
        throw ConfigError("general diffusion needs one sigma and one drift expression per axis");
    int d = static_cast<int>(sigma.size());
    for (const auto& e : drift)
        if (e.dimension() > d) throw ConfigError("drift expression dimension mismatch");
    return GeneratorSpec(GeneralDiffusionKind{std::move(sigma), std::move(drift)}, d, d);
}

GeneratorSpec GeneratorSpec::kinetic(Potential F) {
    int d = F.dimension();
    return GeneratorSpec(KineticKind{std::move(F)}, 2 * d, d);
}

const Potential& GeneratorSpec::potential() const {
    if (auto* o = std::get_if<OverdampedKind>(&kind_)) return o->potential;
    if (auto* k = std::get_if<KineticKind>(&kind_)) return k->potential;
    throw ConfigError("general diffusion carries no potential");
}

Polynomial Polynomial::constant(int dim, double c) {
    return Polynomial(dim, {Monomial{c, std::vector<int>(static_cast<std::size_t>(dim), 0)}});
}

Polynomial Polynomial::monomial(int dim, int index, int power, double c) {
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(index)] = power;
    return Polynomial(dim, {Monomial{c, std::move(e)}});
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    auto terms = terms_;
    terms.insert(terms.end(), o.terms_.begin(), o.terms_.end());
    return Polynomial(dim_, std::move(terms));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::vector<Monomial> terms;
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            Monomial m;
            m.coef = a.coef * b.coef;
            m.exps.resize(static_cast<std::size_t>(dim_));
            for (int i = 0; i < dim_; ++i)
                m.exps[static_cast<std::size_t>(i)] =
                    a.exps[static_cast<std::size_t>(i)] + b.exps[static_cast<std::size_t>(i)];
            terms.push_back(std::move(m));
        }
    }
    return Polynomial(dim_, std::move(terms));
}

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

}  // namespace

double Polynomial::value(std::span<const double> x) const {
    double s = 0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (int i = 0; i < dim_; ++i) v *= ipow(x[static_cast<std::size_t>(i)],
                                                 t.exps[static_cast<std::size_t>(i)]);
        s += v;
    }
    return s;
}

Vector Polynomial::grad(std::span<const double> x) const {
    Vector g = Vector::Zero(dim_);
    for (const auto& t : terms_) {
        for (int i = 0; i < dim_; ++i) {
            int e = t.exps[static_cast<std::size_t>(i)];
            if (e == 0) continue;
            double v = t.coef * e * ipow(x[static_cast<std::size_t>(i)], e - 1);
            for (int j = 0; j < dim_; ++j)
                if (j != i) v *= ipow(x[static_cast<std::size_t>(j)],
                                      t.exps[static_cast<std::size_t>(j)]);
            g(i) += v;
        }
    }
    return g;
}

Matrix Polynomial::hessian(std::span<const double> x) const {
    Matrix h = Matrix::Zero(dim_, dim_);
    for (const auto& t : terms_) {
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                int ei = t.exps[static_cast<std::size_t>(i)];
                int ej = t.exps[static_cast<std::size_t>(j)];
                double v;
                if (i == j) {
                    if (ei < 2) continue;
                    v = t.coef * ei * (ei - 1) * ipow(x[static_cast<std::size_t>(i)], ei - 2);
                } else {
                    if (ei < 1 || ej < 1) continue;
                    v = t.coef * ei * ej * ipow(x[static_cast<std::size_t>(i)], ei - 1) *
                        ipow(x[static_cast<std::size_t>(j)], ej - 1);
                }
                for (int k = 0; k < dim_; ++k)
                    if (k != i && k != j)
                        v *= ipow(x[static_cast<std::size_t>(k)],
                                  t.exps[static_cast<std::size_t>(k)]);
                h(i, j) += v;
            }
        }
    }
    return h;
}

double GridFunction::value(double x) const {
    double pos = (x - grid.lo) / grid.h();
    int i = std::clamp(static_cast<int>(pos), 0, grid.n - 2);
    double frac = pos - i;
    return values[static_cast<std::size_t>(i)] * (1 - frac) +
           values[static_cast<std::size_t>(i + 1)] * frac;
}

double GridFunction::deriv(double x) const {
    double h = grid.h();
    int i = std::clamp(static_cast<int>(std::lround((x - grid.lo) / h)), 0, grid.n - 1);
    auto v = [&](int k) { return values[static_cast<std::size_t>(k)]; };
    if (i == 0) return (-3 * v(0) + 4 * v(1) - v(2)) / (2 * h);
    if (i == grid.n - 1) return (3 * v(i) - 4 * v(i - 1) + v(i - 2)) / (2 * h);
    return (v(i + 1) - v(i - 1)) / (2 * h);
}

double GridFunction::second_deriv(double x) const {
    double h = grid.h();
    int i = std::clamp(static_cast<int>(std::lround((x - grid.lo) / h)), 0, grid.n - 1);
    auto v = [&](int k) { return values[static_cast<std::size_t>(k)]; };
    if (i == 0) return (2 * v(0) - 5 * v(1) + 4 * v(2) - v(3)) / (h * h);
    if (i == grid.n - 1) return (2 * v(i) - 5 * v(i - 1) + 4 * v(i - 2) - v(i - 3)) / (h * h);
    return (v(i + 1) - 2 * v(i) + v(i - 1)) / (h * h);
}

TestFunction TestFunction::coordinate(int dim, int index) {
    return TestFunction(Polynomial::monomial(dim, index, 1));
}

double TestFunction::value(std::span<const double> x) const {
    if (auto* p = std::get_if<Polynomial>(&impl_)) return p->value(x);
    if (auto* e = std::get_if<ExpOfPotential>(&impl_))
        return std::exp(e->a * e->pot.value(x));
    return std::get<GridFunction>(impl_).value(x[0]);
}

Vector TestFunction::grad(std::span<const double> x) const {
    if (auto* p = std::get_if<Polynomial>(&impl_)) return p->grad(x);
    if (auto* e = std::get_if<ExpOfPotential>(&impl_)) {
        double v = std::exp(e->a * e->pot.value(x));
        return (e->a * v) * e->pot.grad(x);
    }
    Vector g(1);
    g(0) = std::get<GridFunction>(impl_).deriv(x[0]);
    return g;
}

Matrix TestFunction::hessian(std::span<const double> x) const {
    if (auto* p = std::get_if<Polynomial>(&impl_)) return p->hessian(x);
    if (auto* e = std::get_if<ExpOfPotential>(&impl_)) {
        double v = std::exp(e->a * e->pot.value(x));
        Vector g = e->pot.grad(x);
        Matrix h = e->pot.hessian(x);
        return v * (e->a * h + e->a * e->a * g * g.transpose());
    }
    Matrix h(1, 1);
    h(0, 0) = std::get<GridFunction>(impl_).second_deriv(x[0]);
    return h;
}

double apply(const GeneratorSpec& L, const TestFunction& f, std::span<const double> x) {
    if (static_cast<int>(x.size()) != L.state_dimension())
        throw ConfigError("point dimension does not match generator state dimension");
    Vector g = f.grad(x);
    Matrix h = f.hessian(x);

    if (auto* o = std::get_if<OverdampedKind>(&L.kind())) {
        Vector gF = o->potential.grad(x);
        return 0.5 * h.trace() - gF.dot(g);
    }
    if (auto* gd = std::get_if<GeneralDiffusionKind>(&L.kind())) {
        double s = 0;
        for (int i = 0; i < L.state_dimension(); ++i) {
            double sig = gd->sigma[static_cast<std::size_t>(i)];
            s += 0.5 * sig * sig * h(i, i);
            s += gd->drift[static_cast<std::size_t>(i)].eval(x) * g(i);
        }
        return s;
    }
    const auto& k = std::get<KineticKind>(L.kind());
    int d = L.position_dimension();
    Vector gF = k.potential.grad(x.first(static_cast<std::size_t>(d)));
    double s = 0;
    for (int i = 0; i < d; ++i) {
        double v = x[static_cast<std::size_t>(d + i)];
        s += 0.5 * h(d + i, d + i);          // 1/2 Delta_v
        s += v * g(i);                       // v . grad_x
        s -= (v + gF(i)) * g(d + i);         // -(v + grad F) . grad_v
    }
    return s;
}

double carre_du_champ(const GeneratorSpec& L, const TestFunction& f, const TestFunction& g,
                      std::span<const double> x) {
    Vector gf = f.grad(x);
    Vector gg = g.grad(x);
    if (L.is_overdamped()) return gf.dot(gg);
    if (auto* gd = std::get_if<GeneralDiffusionKind>(&L.kind())) {
        double s = 0;
        for (int i = 0; i < L.state_dimension(); ++i) {
            double sig = gd->sigma[static_cast<std::size_t>(i)];
            s += sig * sig * gf(i) * gg(i);
        }
        return s;
    }
    int d = L.position_dimension();
    double s = 0;
    for (int i = 0; i < d; ++i) s += gf(d + i) * gg(d + i);
    return s;
}

double carre_du_champ(const GeneratorSpec& L, const TestFunction& f, std::span<const double> x) {
    return carre_du_champ(L, f, f, x);
}

}  // namespace ergo
