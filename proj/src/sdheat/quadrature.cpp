#include "sdheat/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "sdheat/errors.hpp"

namespace sdheat {

namespace {

using GL8 = boost::math::quadrature::gauss<double, 8>;

// nodes and weights of the 8-point rule on [0,1]
struct Unit8 {
    double x[8], w[8];
    Unit8() {
        const auto& a = GL8::abscissa();
        const auto& wt = GL8::weights();
        for (int i = 0; i < 4; ++i) {
            x[3 - i] = 0.5 * (1.0 - a[i]);
            x[4 + i] = 0.5 * (1.0 + a[i]);
            w[3 - i] = w[4 + i] = 0.5 * wt[i];
        }
    }
};

const Unit8& unit8() {
    static const Unit8 u;
    return u;
}

}  // namespace

Rule composite_gauss(const std::vector<double>& breaks) {
    require(breaks.size() >= 2, "need at least one panel");
    const Unit8& u = unit8();
    Rule r;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], h = breaks[p + 1] - breaks[p];
        for (int i = 0; i < 8; ++i) {
            r.x.push_back(a + h * u.x[i]);
            r.w.push_back(h * u.w[i]);
        }
    }
    return r;
}

Rule duhamel_rule(double t, int nodes) {
    require(nodes >= 8 && nodes % 8 == 0, "time nodes must be a positive multiple of 8");
    require(t > 0, "time must be positive");
    const int panels = nodes / 8;
    std::vector<double> b(panels + 1);
    for (int k = 0; k < panels; ++k) b[k] = t * (1.0 - std::ldexp(1.0, -k));
    b[panels] = t;
    return composite_gauss(b);
}

Rule graded_two_sided(double t, int nodes, TimeRuleKind kind, double grading) {
    require(t > 0, "time must be positive");
    require(nodes >= 4 && nodes % 2 == 0, "quadrature nodes must be even and >= 4");
    require(grading >= 1.0, "grading exponent must be >= 1");
    const int half = nodes / 2;
    std::vector<double> u, wu;
    if (kind == TimeRuleKind::gauss_legendre_graded) {
        require(half % 8 == 0, "graded Gauss-Legendre needs a multiple of 16 nodes");
        const Unit8& g = unit8();
        const int panels = half / 8;
        for (int p = 0; p < panels; ++p)
            for (int i = 0; i < 8; ++i) {
                u.push_back((p + g.x[i]) / panels);
                wu.push_back(g.w[i] / panels);
            }
    } else {
        for (int i = 0; i < half; ++i) {
            u.push_back((i + 0.5) / half);
            wu.push_back(1.0 / half);
        }
    }
    Rule r;
    const double h = 0.5 * t;
    r.x.resize(nodes);
    r.w.resize(nodes);
    for (int i = 0; i < half; ++i) {
        const double s = h * std::pow(u[i], grading);
        const double w = h * grading * std::pow(u[i], grading - 1.0) * wu[i];
        r.x[i] = s;
        r.w[i] = w;
        // mirrored node, listed so that x is increasing
        r.x[nodes - 1 - i] = t - s;
        r.w[nodes - 1 - i] = w;
    }
    return r;
}

void lagrange_weights(const double* nodes, int n, double x, double* w) {
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) p *= (x - nodes[j]) / (nodes[i] - nodes[j]);
        w[i] = p;
    }
}

}  // namespace sdheat
