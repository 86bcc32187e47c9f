#pragma once
#include <array>
#include <functional>
#include <vector>

#include "csphere/angular.hpp"
#include "csphere/spectral.hpp"

namespace csphere::weightfit {

using angular::Complex;

/// Constrained parametric weight a(l,m) = A l^p m^q exp(-beta(l^2+m^2)).
struct WeightParams {
    double A = 1.0;
    double p = 2.0;
    double q = 1.0;
    double beta = 0.5;

    std::array<double, 4> as_array() const { return {A, p, q, beta}; }
    static WeightParams from_array(const std::array<double, 4>& v)
    {
        return {v[0], v[1], v[2], v[3]};
    }
};

struct FitConfig {
    double lambda_div = 0.0; ///< divergence penalty weight
    double mu0 = 1e-3;       ///< initial barrier parameter
    double c1 = 1e-4;        ///< Armijo constant
    double alpha0 = 1.0;     ///< initial step
    double eps_grad = 1e-5;
    double eps_rel = 1e-7;
    int n_theta = 32;
    int n_phi = 64;
    int outer_cap = 500;
    double ell_min = 0.1;
    double radius = 1.0;
    spectral::MappedQuadConfig quad_ell{8, 1.0, 0.1, 1.5};
    spectral::MappedQuadConfig quad_m{8, 1.0, 0.05, 1.0};

    void require_valid() const;
};

/// Tangential boundary samples on the fit grid (Gauss-Legendre theta nodes
/// times uniform phi).
struct BoundaryData {
    double radius = 1.0;
    int n_theta = 0, n_phi = 0;
    std::vector<Complex> e_theta; ///< [it*n_phi + ip]
    std::vector<Complex> e_phi;
};

/// Synthesizes the tangential field of the parametric weight at r = radius.
BoundaryData synth_boundary(const WeightParams& params, const FitConfig& cfg);

struct ProjectedCoefficient {
    double ell, m;
    Complex a;
};

/// Step-1 projection a(l,m) = <[Phi]_T, E_T> / R^alpha over the given modes.
std::vector<ProjectedCoefficient>
project_boundary(const BoundaryData& data, const std::vector<angular::ModeIndex>& modes,
                 spectral::AlphaSource alpha_source = spectral::AlphaSource::fixed_ell_minus_1);

/// Logarithmic barrier -mu log(p - (3/2 - ell_min)).
double barrier(double p, double ell_min, double mu);

struct ObjectiveParts {
    double misfit = 0.0;        ///< squared boundary misfit
    double divergence = 0.0;    ///< squared divergence penalty integral
    double barrier_total = 0.0; ///< barrier at the supplied mu
    double value = 0.0;
    double relative_boundary_error = 0.0; ///< ||E - E0|| / ||E0||
};

ObjectiveParts objective(const WeightParams& params, const BoundaryData& data,
                         const FitConfig& cfg, double mu);

/// Largest step in {alpha0, alpha0/2, ...} satisfying the Armijo condition.
double armijo_step(const std::function<double(const std::array<double, 4>&)>& f,
                   const std::array<double, 4>& x, const std::array<double, 4>& d,
                   const std::array<double, 4>& grad, const FitConfig& cfg);

struct TraceRow {
    int iter;
    WeightParams params;
    double objective;
    double grad_norm;
    double step;
};

struct FitResult {
    WeightParams params;
    std::vector<TraceRow> trace;
    bool capped = false;         ///< iteration cap hit, best-so-far returned
    bool gradient_check_ok = false;
    double final_boundary_error = 0.0;
};

/// Barrier + quasi-Newton descent with Armijo backtracking; gradients by
/// central finite differences, mu halved per outer iteration.
FitResult optimize(const BoundaryData& data, const WeightParams& init,
                   const FitConfig& cfg);

} // namespace csphere::weightfit
