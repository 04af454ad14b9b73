#include "sdheat/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

namespace sdheat {

namespace {

void check_t(double t) { require(std::isfinite(t) && t > 0, "time must be positive"); }

double small_time_factor(double cbar, double t, double dx) {
    return std::min(1.0 / std::sqrt(2.0 * cbar), std::sqrt(t) / dx);
}

}  // namespace

double lorentz_rhs(const MultiIndex& alpha, double t, const LorentzBoundParams& p) {
    check_t(t);
    require(static_cast<int>(alpha.size()) == p.dim, "multi-index dimension mismatch");
    require(p.m >= 0, "difference order must be nonnegative");
    double v = std::pow(small_time_factor(p.cbar, t, p.dx), zeros_count(alpha));
    v *= std::pow(t, -0.5 * (p.dim + p.m));
    const double s = std::sqrt(2.0 * p.cbar * t);
    for (int a : alpha) {
        const double z = std::abs(a) * p.dx / s;
        double den = 1.0 + z * z;
        if (p.cubic_tail) den += z * z * z;
        v /= den;
    }
    return v;
}

double k_rhs(const MultiIndex& alpha, const MultiIndex& beta, double t, const LorentzBoundParams& p) {
    require(alpha.size() == beta.size(), "multi-index dimension mismatch");
    MultiIndex diff(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) diff[j] = alpha[j] - beta[j];
    LorentzBoundParams q = p;
    q.m = 1;
    q.cubic_tail = false;
    return lorentz_rhs(diff, t, q);
}

GaussianValue gaussian_rhs(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx) {
    check_t(t);
    require(static_cast<int>(alpha.size()) == c.dim(), "multi-index dimension mismatch");
    GaussianValue g;
    double cmin = *std::min_element(c.c.begin(), c.c.end());
    int amax = 0;
    for (int a : alpha) amax = std::max(amax, std::abs(a));
    g.in_region = t >= amax * dx * dx / (2.0 * gaussian_C0 * cmin);
    double lg = 0.5 * c.dim() * std::log(std::numbers::pi);
    for (int j = 0; j < c.dim(); ++j) {
        const double x = alpha[j] * dx;
        lg += -0.5 * std::log(4.0 * c.c[j] * t) - x * x / (2.0 * gaussian_C0 * c.c[j] * t);
    }
    g.log_rhs = lg;
    g.rhs = std::exp(lg);
    return g;
}

double log_gaussian_rhs_b(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx,
                          const std::vector<double>& b) {
    check_t(t);
    require(static_cast<int>(alpha.size()) == c.dim() && b.size() == alpha.size(),
            "dimension mismatch");
    double lg = 0.5 * c.dim() * std::log(std::numbers::pi);
    for (int j = 0; j < c.dim(); ++j) {
        require(std::abs(b[j]) <= 0.5, "b components must lie in [-1/2, 1/2]");
        lg += -0.5 * std::log(4.0 * c.c[j] * t) +
              gaussian_C0 * c.c[j] * t / (2.0 * dx * dx) * b[j] * b[j] - alpha[j] * b[j];
    }
    return lg;
}

double gaussian_rhs_b(const MultiIndex& alpha, double t, const ConstCoeffs& c, double dx,
                      const std::vector<double>& b) {
    return std::exp(log_gaussian_rhs_b(alpha, t, c, dx, b));
}

double pang_F(double g) {
    require(std::isfinite(g) && g > 0, "pang_F needs a positive argument");
    // (sqrt(g^2+1) - 1)/g rewritten without cancellation
    return g / (1.0 + std::sqrt(g * g + 1.0)) - std::asinh(g);
}

double log_pang_rhs(long n, double t) {
    require(n != 0, "the Davies-Pang estimate does not cover n = 0");
    check_t(t);
    const double an = std::labs(n);
    const double pref = t <= an ? -0.5 * std::log(an) : -0.5 * std::log(t);
    return pref + an * pang_F(an / (2.0 * t));
}

double pang_rhs(long n, double t) { return std::exp(log_pang_rhs(n, t)); }

double lorentz_tilde(double tau, double z) {
    require(tau > 0, "L~ needs tau > 0");
    return 1.0 / (std::sqrt(tau) * (1.0 + z * z / tau));
}

double lorentz_closed_form(double x, double y, double s, double t) {
    require(s > 0 && s < t, "need 0 < s < t");
    const double a = std::sqrt(t - s) + std::sqrt(s);
    return std::numbers::pi * lorentz_tilde(a * a, x - y);
}

double lorentz_quadrature(double x, double y, double s, double t) {
    require(s > 0 && s < t, "need 0 < s < t");
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto f = [&](double z) { return lorentz_tilde(t - s, x - z) * lorentz_tilde(s, z - y); };
    // break points at both peaks and their widths
    std::vector<double> pts = {x, y};
    for (double k : {1.0, 10.0}) {
        pts.push_back(x - k * std::sqrt(t - s));
        pts.push_back(x + k * std::sqrt(t - s));
        pts.push_back(y - k * std::sqrt(s));
        pts.push_back(y + k * std::sqrt(s));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double inf = std::numeric_limits<double>::infinity();
    double total = GK::integrate(f, -inf, pts.front(), 12, 1e-12);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += GK::integrate(f, pts[i], pts[i + 1], 12, 1e-12);
    total += GK::integrate(f, pts.back(), inf, 12, 1e-12);
    return total;
}

double prop53_f(double t, const MultiIndex& alpha, double C1, double dx) {
    check_t(t);
    double v = std::pow(std::min(1.0, C1 * t / (dx * dx)), 0.5 * zeros_count(alpha)) / std::sqrt(t);
    for (int a : alpha) v *= lorentz_tilde(C1 * t, a * dx);
    return v;
}

double BoundReport::spread() const {
    if (per_dx.empty()) return 0.0;
    double lo = per_dx.front().second, hi = lo;
    for (auto& [dx, c] : per_dx) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    return lo > 0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
}

void BoundFitter::add(const MultiIndex& alpha, double t, double dx, double quantity, double rhs) {
    require(std::isfinite(quantity), "bound quantity must be finite");
    require(rhs > 0, "bound right-hand side must be positive");
    const double ratio = std::abs(quantity) / rhs;
    if (!any_ || ratio > r_.sup_ratio) {
        r_.sup_ratio = ratio;
        r_.argmax_alpha = alpha;
        r_.argmax_t = t;
    }
    if (!any_) {
        r_.t_min = r_.t_max = t;
    } else {
        r_.t_min = std::min(r_.t_min, t);
        r_.t_max = std::max(r_.t_max, t);
    }
    any_ = true;
    ++r_.samples;
    auto it = std::find_if(per_dx_.begin(), per_dx_.end(), [&](auto& p) { return p.first == dx; });
    if (it == per_dx_.end())
        per_dx_.emplace_back(dx, ratio);
    else
        it->second = std::max(it->second, ratio);
}

BoundReport BoundFitter::report() const {
    require(any_, "empty sample set");
    BoundReport r = r_;
    r.bound_id = id_;
    r.fitted_constant = r.sup_ratio;
    r.per_dx = per_dx_;
    std::sort(r.per_dx.begin(), r.per_dx.end(), [](auto& a, auto& b) { return a.first > b.first; });
    return r;
}

BoundReport fit_bound(const std::string& id, const std::vector<BoundSample>& samples) {
    BoundFitter f(id);
    for (const auto& s : samples) f.add(s.alpha, s.t, s.dx, s.quantity, s.rhs);
    return f.report();
}

std::string to_json(const BoundReport& r) {
    nlohmann::ordered_json j;
    j["bound_id"] = r.bound_id;
    j["sup_ratio"] = r.sup_ratio;
    j["argmax"] = {{"alpha", r.argmax_alpha}, {"t", r.argmax_t}};
    j["per_dx"] = nlohmann::ordered_json::array();
    for (auto& [dx, c] : r.per_dx) j["per_dx"].push_back({{"dx", dx}, {"constant", c}});
    j["samples"] = r.samples;
    j["fitted_constant"] = r.fitted_constant;
    j["t_range"] = {r.t_min, r.t_max};
    return j.dump(2);
}

}  // namespace sdheat
