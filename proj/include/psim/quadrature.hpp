#ifndef PSIM_QUADRATURE_HPP
#define PSIM_QUADRATURE_HPP

#include <vector>

namespace psim {

/// Nodes and weights of a quadrature rule on some interval [a, b];
/// sum_k w_k f(x_k) approximates the integral of f.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite trapezoid rule on n uniformly spaced nodes spanning [a, b].
QuadratureRule trapezoid_uniform(int n, double a, double b);

/// Composite trapezoid weights for user-supplied ascending nodes.
/// A single node gets the whole interval [a, b] as its weight.
QuadratureRule trapezoid_on_nodes(std::vector<double> nodes, double a, double b);

} // namespace psim

#endif
