#pragma once

#include <vector>

namespace sdheat {

struct Rule {
    std::vector<double> x, w;
    std::size_t size() const { return x.size(); }
};

// 8-point Gauss-Legendre on every panel [b_i, b_{i+1}]
Rule composite_gauss(const std::vector<double>& breaks);

// [0,t] with panels halving in width toward s = t; nodes/8 panels
Rule duhamel_rule(double t, int nodes);

enum class TimeRuleKind { gauss_legendre_graded, midpoint_graded };

// (0,t) split at t/2, s = (t/2) u^grading from both ends, nodes/2 per half
Rule graded_two_sided(double t, int nodes, TimeRuleKind kind, double grading);

// Lagrange basis weights for interpolation at x through nodes[0..n)
void lagrange_weights(const double* nodes, int n, double x, double* w);

}  // namespace sdheat
