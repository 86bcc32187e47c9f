#pragma once
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csphere/angular.hpp"
#include "csphere/quadrature.hpp"

namespace csphere::coupling {

using angular::Complex;
using angular::ModeIndex;
using quadrature::QuadratureRule;

/// Pointwise angular function f(theta, phi).
using AngularHandle = std::function<Complex(double, double)>;

struct LabeledHandle {
    std::string label;
    AngularHandle fn;
};

/// Angular projection coefficients of one (l,m) mode.
struct ProjectionSet {
    Complex a_theta{};
    Complex a_phi{};
    Complex b_theta{};
    Complex b_phi{};
    Complex c_thetaphi{};
    /// closed form -(l(l+1)-m^2) Phi0/2, reported alongside with its relative
    /// discrepancy against the quadrature value (not enforced)
    double a_theta_closed = 0.0;
    double a_theta_closed_discrepancy = 0.0;
};

struct GramMatrix {
    int dim = 0;
    Eigen::MatrixXcd entries;
    std::vector<std::string> basis_labels;
    double smallest_eigenvalue = 0.0;
};

/// Discrete sphere inner product <f,g> = sum conj(f) g sin(theta) dtheta dphi
/// over the rule (theta weights are Gauss-Legendre in cos(theta)).
Complex sphere_inner_product(const AngularHandle& f, const AngularHandle& g,
                             const QuadratureRule& rule);

/// All five projection coefficients of the mode, by quadrature under the
/// sin(theta) measure; the 1/sin^2 integrals go through a pole-refined mesh
/// with analytic endpoint tails and throw SingularIntegrand when they fail
/// the mesh-refinement Cauchy check.
ProjectionSet projections(const ModeIndex& idx, const QuadratureRule& rule);

/// i m N^2 Phi0 * integral of |scriptP|^2 sin(theta); same-node delta convention.
Complex coupling_rtheta(const ModeIndex& idx, const QuadratureRule& rule);

/// theta-phi coupling matrix element; unit degree separation uses the ladder
/// coefficient, everything else the (d/dtheta - cot theta) quadrature.
Complex coupling_thetaphi(const ModeIndex& idx, const ModeIndex& idx2,
                          const QuadratureRule& rule);

struct LegendreNorm {
    double closed_form = 0.0; ///< 2 Gamma(l+|m|+1) / ((2l+1) Gamma(l-|m|+1))
    double quadrature = 0.0;  ///< integral of scriptP^2 under the sin(theta) measure
};
LegendreNorm legendre_norm(const ModeIndex& idx);

/// Hermitian Gram matrix of pairwise sphere inner products.
GramMatrix gram(const std::vector<LabeledHandle>& basis, const QuadratureRule& rule);

/// integral of f(theta) sin(theta) dtheta over [0,pi] with the theta^exponent
/// model term extracted and integrated analytically near theta = 0.
double singularity_extracted_integral(const std::function<double(double)>& f,
                                      double exponent);

} // namespace csphere::coupling
