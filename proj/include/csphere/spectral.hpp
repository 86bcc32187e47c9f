#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "csphere/angular.hpp"
#include "csphere/quadrature.hpp"

namespace csphere::spectral {

using angular::Complex;

/// Spectral coefficient density a(l, m).
struct SpectralWeight {
    enum class Form { tabulated, rational_peak, constrained_param };
    Form form = Form::rational_peak;

    // rational_peak: A0 / ((1+|l-l0|^2)^{p/2} (1+|m-m0|^2)^{p/2})
    double A0 = 1.0, ell0 = 0.5, m0 = 0.3, p = 3.0;

    // constrained_param: A l^p m^q exp(-beta (l^2+m^2)), p > 3/2 - l_min
    double A = 1.0, cp_p = 2.0, q = 1.0, beta = 0.5;

    // tabulated: discrete point masses over modes
    struct TableEntry {
        double ell, m;
        Complex a;
    };
    std::vector<TableEntry> table;

    static SpectralWeight rational(double A0, double ell0, double m0, double p);
    static SpectralWeight constrained(double A, double p, double q, double beta,
                                      double ell_min);
    static SpectralWeight point_masses(std::vector<TableEntry> entries);

    Complex evaluate(double ell, double m) const;
};

struct MappedQuadConfig {
    int n_nodes = 32;
    double c = 1.0; ///< tanh clustering toward the lower end
    double lo = 0.1, hi = 1.5;

    void require_valid() const;
};

/// tanh-mapped Gauss-Legendre nodes and chain-rule weights (single rule).
void mapped_nodes(const MappedQuadConfig& cfg, std::vector<double>& nodes,
                  std::vector<double>& weights);

/// tanh-mapped composite midpoint rule; the synthesis tables use this form
/// because its fixed second-order panels give the clean O(N^-2) refinement
/// that a single Gauss rule does not deliver for analytic weights.
void mapped_midpoint_nodes(const MappedQuadConfig& cfg, std::vector<double>& nodes,
                           std::vector<double>& weights);

struct RegularizationParams {
    double r_c = 0.05;
    double epsilon_theta = 0.0;
};

/// Core multiplier r^2/(r^2 + r_c^2).
double regularized_core(const RegularizationParams& params, double r);

/// Scalar field samples on a separable (r, theta, phi) grid.
struct FieldGrid {
    std::vector<double> r, theta, phi;
    std::vector<Complex> values; ///< [(ir*ntheta + it)*nphi + ip]

    Complex at(std::size_t ir, std::size_t it, std::size_t ip) const
    {
        return values[(ir * theta.size() + it) * phi.size() + ip];
    }
    static FieldGrid uniform(int nr, int ntheta, int nphi, double r_lo, double r_hi);
};

enum class AlphaSource { fixed_ell_minus_1, eigen_table };

/// Tabulated alpha(l, m) with barycentric Lagrange interpolation per axis.
struct AlphaTable {
    std::vector<double> ell_nodes, m_nodes;
    std::vector<double> alpha; ///< [i_ell * m_nodes.size() + i_m]
    double interpolate(double ell, double m) const;
};

struct SynthesisConfig {
    MappedQuadConfig quad_ell;
    MappedQuadConfig quad_m;
    AlphaSource alpha_source = AlphaSource::fixed_ell_minus_1;
    std::optional<AlphaTable> alpha_table;
    std::optional<RegularizationParams> regularization;
};

/// Double spectral-quadrature synthesis of the scalar surrogate field
/// sum a(l,m) r^{alpha} N_{lm} scriptP_l^{|m|}(cos theta) e^{im phi} w_l w_m.
FieldGrid synthesize(const SpectralWeight& weight, const SynthesisConfig& cfg,
                     const FieldGrid& grid_spec);

/// Relative L2 norm of a field over the grid (r^2 sin(theta) measure).
double grid_l2(const FieldGrid& f);
double grid_l2_diff(const FieldGrid& a, const FieldGrid& b);

struct ConvergenceRow {
    int n = 0;
    double error = 0.0;
    double ratio = 0.0; ///< eps_N / eps_2N when the doubled entry exists
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    int reference_n = 0;
};

/// Truncation study: eps_N against the reference resolution.
ConvergenceReport truncation_error(const SpectralWeight& weight,
                                   const SynthesisConfig& cfg,
                                   const std::vector<int>& Ns,
                                   const FieldGrid& grid_spec, int reference_n);

struct SpectralCoefficient {
    double ell = 0.0;
    double m = 0.0;
    double lambda = 0.0; ///< angular eigenvalue l(l+1)
    Complex a{};
    double quad_weight = 1.0;
};

/// H^s norm: sum quad_weight (1+lambda)^s |a|^2 weight_fn(l, m).
double sobolev_norm(const std::vector<SpectralCoefficient>& coeffs, double s,
                    const std::function<double(double, double)>& weight_fn);

struct BoundCheck {
    double fitted_exponent = 0.0;
    double required = 0.0; ///< (s - 1/2) - 0.2
    bool pass = false;
    ConvergenceReport report;
};

/// Fits the decay exponent of eps_N and compares against s - 1/2.
BoundCheck truncation_bound_check(const SpectralWeight& weight,
                                  const SynthesisConfig& cfg, double s,
                                  const std::vector<int>& Ns,
                                  const FieldGrid& grid_spec, int reference_n);

/// integral of |fn|^2 r^2 dr over (0, r_max] through the xi = r^{1/(1-alpha_min)}
/// substitution; throws DomainError when refinement detects divergence.
double singularity_quadrature(const std::function<double(double)>& fn,
                              double alpha_min, double r_max);

} // namespace csphere::spectral
