#pragma once
// Gauss-Legendre rules on [-1, 1] and their maps to finite and semi-infinite intervals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "twedge/errors.hpp"

namespace twedge::fredholm {

enum class Domain { finite, semi_infinite };

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    Domain domain = Domain::finite;
    double lo = -1.0;
    double hi = 1.0;  // ignored for semi_infinite

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

inline constexpr int kMaxNodes = 2000;

/// m-point Gauss-Legendre rule on [-1, 1]; Newton iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre(int m) {
    if (m < 1 || m > kMaxNodes) throw usage_error("gauss_legendre: m must be in [1, 2000], got " + std::to_string(m));
    QuadratureRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    if (m % 2) rule.nodes[m / 2] = 0.0;
    return rule;
}

/// Gauss-Legendre mapped affinely to [a, b].
inline QuadratureRule finite_rule(double a, double b, int m) {
    auto rule = gauss_legendre(m);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    rule.lo = a;
    rule.hi = b;
    return rule;
}

inline constexpr double kSemiInfiniteScale = 4.0;

/// Gauss-Legendre mapped to (s0, inf) by s = s0 + L (1 + u) / (1 - u).
inline QuadratureRule semi_infinite_rule(double s0, int m, double L = kSemiInfiniteScale) {
    auto rule = gauss_legendre(m);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double u = rule.nodes[i];
        rule.nodes[i] = s0 + L * (1.0 + u) / (1.0 - u);
        rule.weights[i] *= 2.0 * L / ((1.0 - u) * (1.0 - u));
    }
    rule.domain = Domain::semi_infinite;
    rule.lo = s0;
    rule.hi = std::numeric_limits<double>::infinity();
    return rule;
}

/// Composite rule on [0, inf): panels of width 2 with `per_panel` nodes on [0, zc], then a
/// semi-infinite tail from zc. Suited to integrands that oscillate on a bounded stretch.
inline QuadratureRule ray_rule(double zc, int per_panel = 20, int tail_nodes = 48) {
    QuadratureRule out;
    out.domain = Domain::semi_infinite;
    out.lo = 0.0;
    out.hi = std::numeric_limits<double>::infinity();
    const int panels = zc > 0.0 ? static_cast<int>(std::ceil(zc / 2.0)) : 0;
    for (int p = 0; p < panels; ++p) {
        const auto r = finite_rule(zc * p / panels, zc * (p + 1) / panels, per_panel);
        out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
        out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    }
    const auto tail = semi_infinite_rule(std::max(zc, 0.0), tail_nodes, 2.0);
    out.nodes.insert(out.nodes.end(), tail.nodes.begin(), tail.nodes.end());
    out.weights.insert(out.weights.end(), tail.weights.begin(), tail.weights.end());
    return out;
}

}  // namespace twedge::fredholm
