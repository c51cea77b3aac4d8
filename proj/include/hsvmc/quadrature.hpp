#pragma once

// Composite Gauss-Legendre quadrature with a panel-doubling convergence check.

#include <cmath>
#include <cstddef>
#include <vector>

#include "hsvmc/errors.hpp"

namespace hsvmc {

struct QuadRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// Nodes and weights of the n-point Gauss-Legendre rule via Newton iteration
/// on the Legendre polynomial recurrence.
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Integral of f over [a, b] split into `panels` equal panels.
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const QuadRule& rule) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        double part = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            part += rule.weights[i] * f(lo + 0.5 * h * (rule.nodes[i] + 1.0));
        sum += 0.5 * h * part;
    }
    return sum;
}

/// Doubles the panel count until two successive estimates agree to rel_tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10) {
    static const QuadRule rule = gauss_legendre(16);
    double prev = integrate_panels(f, a, b, 1, rule);
    for (int panels = 2; panels <= 1024; panels *= 2) {
        const double cur = integrate_panels(f, a, b, panels, rule);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw NonConvergence("integrate_adaptive: panel doubling did not converge");
}

}  // namespace hsvmc
