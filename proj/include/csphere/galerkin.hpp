#pragma once
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csphere/angular.hpp"
#include "csphere/coupling.hpp"

namespace csphere::galerkin {

using angular::Complex;
using angular::ModeIndex;
using quadrature::QuadratureRule;

/// Tensorial potential: component pair (row, col in {0,1,2} = r,theta,phi)
/// evaluated at (theta, phi). Empty handle means V = 0.
using PotentialHandle = std::function<Complex(int, int, double, double)>;

struct AngularOperatorSpec {
    PotentialHandle potential;
    double phi0 = 2.0 * 3.14159265358979323846;
    bool include_coupling_blocks = true; ///< scalar problems may skip them
};

enum class BasisFamily { scalar, even_vector, odd_vector };

struct BasisLabel {
    BasisFamily family = BasisFamily::scalar;
    ModeIndex idx;
    std::string name;
};

struct BasisSet {
    std::vector<BasisLabel> labels;
    std::vector<std::string> rejected; ///< validity violations, one per label
};

/// Scalar and curl-constructed vector families over the (l, m) grids; invalid
/// combinations (l <= |m| - 1) are listed in `rejected`.
BasisSet build_basis(std::span<const double> ell_grid, std::span<const double> m_grid,
                     const std::set<BasisFamily>& families);

/// Pointwise evaluator for a labeled basis function (vector families return
/// the 3-component sample).
angular::VshSample eval_basis(const BasisLabel& label, double theta, double phi);

struct BlockSystem {
    Eigen::MatrixXcd l_r, l_theta, l_phi;
    Eigen::MatrixXcd c_rtheta, c_rphi, c_thetar, c_thetaphi, c_phir, c_phitheta;
    Eigen::MatrixXcd m_r, m_theta, m_phi;
    std::vector<BasisLabel> labels;             ///< scalar labels per component
    std::vector<std::string> singular_skipped;  ///< entries surfaced as singular
    double coupling_block_norm = 0.0;           ///< reported boundedness
};

/// Stiffness: analytic Laplace-Beltrami action s(s+1) against the Gram, plus
/// quadrature for the potential; coupling blocks from the ladder/projection
/// matrix elements; mass = Gram.
BlockSystem assemble(const AngularOperatorSpec& spec,
                     const std::vector<BasisLabel>& basis, const QuadratureRule& rule);

struct EigenResult {
    Complex lambda{};
    Complex alpha{};
    Eigen::VectorXcd coefficients;
    std::vector<std::string> basis_labels;
    double residual = 0.0;
};

/// Dense generalized eigensolve; returns the n_eigs pairs nearest `target`.
std::vector<EigenResult> solve_gevp(const BlockSystem& system, int n_eigs,
                                    double target);

/// alpha = (sqrt(1+4 lambda) - 1)/2, principal branch.
Complex alpha_from_lambda(Complex lambda);

struct ConvergenceRow {
    int n = 0;
    double delta = 0.0; ///< |lambda^(N) - lambda^(2N)|
    double ratio = 0.0; ///< delta(N)/delta(2N); 0 when undefined
};

struct ConvergenceReport {
    std::vector<int> Ns;
    std::vector<double> lambdas;
    std::vector<ConvergenceRow> rows;
    std::string regime; ///< "quadratic" or "slow"
};

/// Eigenvalue of the order-|m| angular problem in the N-member continued
/// Legendre family, assembled with the resolution-matched pole-graded rule
/// (N panels per half, grading 5/2); nearest to l(l+1).
double study_eigenvalue(const ModeIndex& mode, int basis_dim, int rule_panels);

/// Self-refinement study: rows (N, |lambda^(N)-lambda^(2N)|, ratio).
ConvergenceReport convergence_study(const ModeIndex& mode, const std::vector<int>& Ns);

enum class TransformDirection { to_xi, to_r };

/// xi = r^{1/(1-alpha_min)} and its inverse.
double radial_transform(double alpha_min, double r, TransformDirection direction);

/// Wraps an angular handle to evaluate at sqrt(theta^2 + eps^2).
coupling::AngularHandle theta_regularize(const coupling::AngularHandle& handle,
                                         double epsilon);

} // namespace csphere::galerkin
