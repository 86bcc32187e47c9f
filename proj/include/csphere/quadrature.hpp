#pragma once
#include <vector>
#include "csphere/errors.hpp"

namespace csphere::quadrature {

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre rule mapped onto [a,b].
void gauss_legendre_ab(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights);

/// Sphere rule: Gauss-Legendre in cos(theta) on [-1,1], uniform phi on [0, phi0).
struct QuadratureRule {
    std::vector<double> theta_nodes;
    std::vector<double> theta_weights; ///< weights in the cos(theta) variable; sum = 2
    int n_phi = 0;
    double phi0 = 2.0 * 3.14159265358979323846;

    static QuadratureRule sphere(int n_theta, int n_phi,
                                 double phi0 = 2.0 * 3.14159265358979323846);

    std::vector<double> phi_nodes() const;
    double phi_weight() const { return phi0 / n_phi; }
};

/// Composite rule on [a,b]: n_panels panels of p-point Gauss-Legendre.
void composite_gl(int n_panels, int p, double a, double b,
                  std::vector<double>& nodes, std::vector<double>& weights);

/// Composite rule on [a,b] with panel edges graded toward `a`,
/// edge_i = a + (b-a) (i/n)^grading.
void graded_composite_gl(int n_panels, int p, double a, double b, double grading,
                         std::vector<double>& nodes, std::vector<double>& weights);

/// Composite rule on [0,pi] graded toward both poles (grading exponent g),
/// built from a half-interval rule mirrored about pi/2.
void pole_graded_theta(int n_panels_half, int p, double grading,
                       std::vector<double>& nodes, std::vector<double>& weights);

/// tanh-mapped node transform: xi in [0,1] -> [lo, hi], clustering c toward lo.
double tanh_map(double xi, double lo, double hi, double c);
double tanh_map_deriv(double xi, double lo, double hi, double c);

/// Composite midpoint rule in the tanh-mapped variable (n panels).
void mapped_midpoint(int n, double lo, double hi, double c,
                     std::vector<double>& nodes, std::vector<double>& weights);

} // namespace csphere::quadrature
