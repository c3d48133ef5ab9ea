#include "psim/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "psim/errors.hpp"

namespace psim {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) raise_validation("quadrature needs at least one node");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    // Newton iteration on P_n, nodes symmetric about the midpoint
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double z_prev = z;
            z = z_prev - p1 / pp;
            if (std::abs(z - z_prev) < 1e-15) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        rule.nodes[i] = xm - xl * z;
        rule.nodes[n - 1 - i] = xm + xl * z;
        double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

QuadratureRule trapezoid_uniform(int n, double a, double b) {
    if (n < 1) raise_validation("quadrature needs at least one node");
    QuadratureRule rule;
    if (n == 1) {
        rule.nodes = {0.5 * (a + b)};
        rule.weights = {b - a};
        return rule;
    }
    double h = (b - a) / (n - 1);
    rule.nodes.resize(n);
    rule.weights.assign(n, h);
    for (int i = 0; i < n; ++i) rule.nodes[i] = a + i * h;
    rule.weights.front() = 0.5 * h;
    rule.weights.back() = 0.5 * h;
    return rule;
}

QuadratureRule trapezoid_on_nodes(std::vector<double> nodes, double a, double b) {
    if (nodes.empty()) raise_validation("quadrature needs at least one node");
    for (size_t i = 1; i < nodes.size(); ++i)
        if (nodes[i] <= nodes[i - 1])
            raise_validation("quadrature nodes must be strictly ascending");
    QuadratureRule rule;
    size_t n = nodes.size();
    if (n == 1) {
        rule.nodes = std::move(nodes);
        rule.weights = {b - a};
        return rule;
    }
    rule.weights.assign(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) {
        double h = nodes[i + 1] - nodes[i];
        rule.weights[i] += 0.5 * h;
        rule.weights[i + 1] += 0.5 * h;
    }
    rule.nodes = std::move(nodes);
    return rule;
}

} // namespace psim
