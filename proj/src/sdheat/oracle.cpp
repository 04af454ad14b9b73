#include "sdheat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdheat {

Generator::Generator(const Coefficients& coeffs, std::optional<Field> potential) : c_(coeffs) {
    const GridSpec& g = c_.grid;
    const std::size_t n = g.sites();
    if (potential) {
        require(potential->grid() == g, "potential lives on a different grid");
        y_ = potential->values();
        for (double y : y_) require(std::isfinite(y) && y >= 0, "potential must be finite and >= 0");
    }
    nb_.resize(n * g.dim * 2);
    const double h2 = g.dx * g.dx;
    for (std::size_t k = 0; k < n; ++k) {
        double row = y_.empty() ? 0.0 : y_[k];
        for (int j = 0; j < g.dim; ++j) {
            nb_[(k * g.dim + j) * 2] = g.shift(k, j, -1);
            nb_[(k * g.dim + j) * 2 + 1] = g.shift(k, j, 1);
            row += 4.0 * c_(k, j) / h2;
        }
        norm_ = std::max(norm_, row);
    }
}

void Generator::apply(const double* v, double* out) const {
    const GridSpec& g = c_.grid;
    const std::size_t n = g.sites();
    const double h2 = g.dx * g.dx;
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            const long m = nb_[(k * g.dim + j) * 2], p = nb_[(k * g.dim + j) * 2 + 1];
            const double lap = (m < 0 ? 0.0 : v[m]) - 2.0 * v[k] + (p < 0 ? 0.0 : v[p]);
            s += c_(k, j) * lap / h2;
        }
        if (!y_.empty()) s -= y_[k] * v[k];
        out[k] = s;
    }
}

Field Generator::apply(const Field& v) const {
    require(v.grid() == grid(), "field lives on a different grid");
    Field out(grid());
    apply(v.values().data(), out.values().data());
    return out;
}

namespace {


constexpr long step_budget = 10'000'000;

}  // namespace

Field expm_apply(const Generator& gen, double t, const Field& v, double tol, const Field* source,
                 ExpmStats* stats) {
    require(v.grid() == gen.grid(), "field lives on a different grid");
    require(t >= 0 && std::isfinite(t), "time must be finite and >= 0");
    require(tol > 0 && std::isfinite(tol), "tolerance must be positive");
    if (source) require(source->grid() == gen.grid(), "source lives on a different grid");
    for (double x : v.values()) require(std::isfinite(x), "initial data must be finite");
    if (stats) *stats = {};
    if (t == 0.0) return v;
    if (tol < 1e-15) throw ConvergenceError("tolerance below what double rounding can certify");

    // steps of size h with |hL| <= 1; per-step Taylor remainder
    // theta^{m+1}/(m+1)! e^theta <= delta, errors add since |e^{hL}| <= 1
    const double A = gen.norm_bound() * t;
    const double steps_d = std::max(1.0, std::ceil(A));
    if (steps_d > step_budget) throw ConvergenceError("oracle step budget exceeded");
    const long steps = static_cast<long>(steps_d);
    const double h = t / steps, theta = gen.norm_bound() * h;
    const double delta = tol / (2.0 * steps);
    int m = 1;
    double bound = theta * theta / 2.0 * std::exp(theta);
    while (bound > delta) {
        ++m;
        bound *= theta / (m + 1);
        if (m > 200) throw ConvergenceError("oracle Taylor degree did not reach tolerance");
    }

    const std::size_t n = v.size();
    std::vector<double> u = v.values(), term(n), next(n);
    const std::vector<double>* f = source ? &source->values() : nullptr;
    long mv = 0;
    for (long s = 0; s < steps; ++s) {
        gen.apply(u.data(), term.data());
        ++mv;
        for (std::size_t k = 0; k < n; ++k) {
            term[k] = h * (term[k] + (f ? (*f)[k] : 0.0));
        }
        std::vector<double> acc = u;
        for (std::size_t k = 0; k < n; ++k) acc[k] += term[k];
        for (int i = 2; i <= m; ++i) {
            gen.apply(term.data(), next.data());
            ++mv;
            const double sc = h / i;
            double big = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                term[k] = sc * next[k];
                acc[k] += term[k];
                big = std::max(big, std::abs(term[k]));
            }
            if (big == 0.0) break;
        }
        u.swap(acc);
    }
    if (stats) *stats = {steps, m, mv};
    for (double x : u)
        if (!std::isfinite(x)) throw ConvergenceError("oracle produced non-finite values");
    return Field(v.grid(), std::move(u));
}

Field gamma_oracle(const Coefficients& coeffs, const MultiIndex& beta, double t, double tol) {
    const GridSpec& g = coeffs.grid;
    require(static_cast<int>(beta.size()) == g.dim && g.inside(beta), "beta outside the grid");
    Field d = Field::dirac(g, beta);
    return expm_apply(Generator(coeffs), t, d, tol * g.cell());
}

double residual(const std::vector<Field>& u, const Generator& gen, const Source& f,
                const std::vector<double>& times) {
    require(u.size() >= 3 && u.size() == times.size(), "residual needs >= 3 matching slices");
    const double h = times[1] - times[0];
    require(h > 0, "times must increase");
    for (std::size_t k = 1; k + 1 < times.size(); ++k)
        require(std::abs((times[k + 1] - times[k]) - h) <= 1e-9 * h, "time spacing must be uniform");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < u.size(); ++k) {
        Field Lu = gen.apply(u[k]);
        Field fk = f ? f(times[k]) : Field(gen.grid());
        for (std::size_t a = 0; a < Lu.size(); ++a) {
            const double r = (u[k + 1][a] - u[k - 1][a]) / (2.0 * h) - Lu[a] - fk[a];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace sdheat
