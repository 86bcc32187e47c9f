#pragma once
#include <vector>

#include "csphere/angular.hpp"
#include "csphere/coupling.hpp"
#include "csphere/specfun.hpp"

namespace csphere::radial {

using angular::Complex;
using angular::ModeIndex;
using coupling::ProjectionSet;

struct SolverConfig {
    double k = 1.0;        ///< wavenumber
    double r_inner = 1e-4; ///< epsilon cutoff
    double r_outer = 10.0; ///< R
    int n_radial = 64;     ///< quadrature panels per region
    double tol = 1e-8;     ///< fixed-point tolerance (sup norm)
    int max_iter = 200;

    void require_valid() const;
};

struct HomogeneousCoeffs {
    Complex c1{}, c2{};           ///< E_theta homogeneous mix of j_nu, y_nu
    Complex d1{}, d2{};           ///< E_phi homogeneous mix
    Complex alpha{1.0, 0.0};      ///< E_r Hankel-1 amplitude
    Complex beta{0.0, 0.0};       ///< E_r Hankel-2 amplitude (0 for outgoing)
};

struct RadialSolution {
    ModeIndex mode;
    std::vector<double> grid;
    std::vector<Complex> e_r, e_theta, e_phi;
    int iterations = 0;
    double contraction_estimate = 0.0;
};

/// E_r(l,m;r) = alpha h1_l(kr) + beta h2_l(kr).
Complex radial_er(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                  const SolverConfig& cfg, double r);
/// analytic d/dr of radial_er via the Hankel derivative identities
Complex radial_er_deriv(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                        const SolverConfig& cfg, double r);

/// Green's function of L_theta: k j_nu(k min) y_nu(k max). The prefactor k is
/// fixed by the delta-consistency calibration (unit mass against r^2 dr).
double greens_theta(const specfun::FracOrder& nu, const SolverConfig& cfg, double r,
                    double rp);

/// Discrete unit-mass check: applies a finite-difference L_theta to
/// G(., rp) on an n-point grid and integrates with the r^2 measure.
double greens_delta_mass(const specfun::FracOrder& nu, const SolverConfig& cfg,
                         double rp, int n_grid = 2000);

/// Contraction pre-estimate max|C_thetaphi| sup|G| (R - eps).
double contraction_pre_estimate(const ModeIndex& mode, const SolverConfig& cfg,
                                const ProjectionSet& proj);

/// Two-region kernel integral K_theta(r) = int G (1/r') dE_r/dr' B_theta dr'.
Complex kernel_theta(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                     const SolverConfig& cfg, double r, const ProjectionSet& proj);

/// K_phi(r) = int G (1/r'^2) [ d/dr'(r'^2 K_theta) C_thetaphi - E_r B_phi ] dr'.
Complex kernel_phi(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                   const SolverConfig& cfg, double r, const ProjectionSet& proj);

/// Alternating Green's-function fixed point for (E_theta, E_phi).
RadialSolution coupled_solve(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                             const SolverConfig& cfg, const ProjectionSet& proj);

struct KernelProfiles {
    std::vector<double> grid;
    std::vector<Complex> k_theta;
    std::vector<Complex> k_phi;
};

/// Kernels truncated at first order in the coupling coefficient; differs from
/// the fixed point by O(|C_thetaphi|^2).
KernelProfiles spectral_kernels_first_order(const ModeIndex& mode,
                                            const HomogeneousCoeffs& coeffs,
                                            const SolverConfig& cfg,
                                            const ProjectionSet& proj,
                                            const std::vector<double>& r_grid);

struct PoleSpec {
    Complex ell_n{};
    int order = 1;      ///< 1 or 2
    Complex residue{};  ///< residue amplitude of the spectral weight
};

/// Contour-integral field at one point from simple and double poles of the
/// spectral weight; alpha(l) = l - 1, degree derivative by central difference.
Complex residue_field(const std::vector<PoleSpec>& poles, double mode_m, double r,
                      double theta, double phi);

/// Shared radial grid: nodes of the graded composite panels on [r_inner, r_outer].
std::vector<double> solver_grid(const SolverConfig& cfg);

} // namespace csphere::radial
