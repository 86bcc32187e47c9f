#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "csphere/angular.hpp"
#include "csphere/spectral.hpp"

namespace csphere::energy {

using angular::Complex;
using angular::ModeIndex;

enum class Verdict { convergent, divergent };

struct EnergyReport {
    double w_r = 0.0, w_theta = 0.0, w_phi = 0.0; ///< at the smallest cutoff
    std::vector<std::pair<double, double>> cutoff_sequence; ///< (eps, W(eps))
    Verdict verdict = Verdict::convergent;
    double fitted_epsilon_exponent = 0.0;
};

/// One component's integrated energy density: the full integrand including
/// the r^2 sin(theta) measure is amplitude2 * r^{r_exponent} sin^{theta_exponent}.
struct DensityTerm {
    int component = 0; ///< 0 = r, 1 = theta, 2 = phi
    double amplitude2 = 1.0;
    double r_exponent = 0.0;
    double theta_exponent = 1.0;
};

/// Cutoff-sequence energy integral W(eps) = (eps0/4) Phi0 * sum of terms;
/// the verdict is Cauchy-based under eps halving, the fitted exponent comes
/// from the decay of successive differences.
EnergyReport energy_integral(const std::vector<DensityTerm>& terms, double eps,
                             double R, double phi0, double epsilon0 = 1.0);

/// Energy of a sampled scalar-surrogate field over nested radial cutoffs.
EnergyReport energy_integral(const spectral::FieldGrid& field, double eps, double R,
                             double phi0, double epsilon0 = 1.0);

/// Density terms of one continuous mode with the alpha = l - 1 radial law and
/// the regularized phi-law r^{2l} sin^{2|m|-1}.
std::vector<DensityTerm> mode_density_terms(const ModeIndex& idx);

/// Finite-energy admissibility l > -1/2 (strict).
bool admissible(double ell);

/// Eigenvalue-form admissibility lambda > -3/4 (strict).
bool lambda_admissible(double lambda);

/// Least-squares slope of log|E| against log r; throws FitDegenerate.
double fit_radial_exponent(const std::vector<double>& r,
                           const std::vector<double>& abs_e);

/// Vector angular field with analytic angular derivatives.
struct AngularVectorField {
    std::function<angular::VshSample(double, double)> sample;
    /// (1/sin)d_theta(sin F_theta) + (1/sin)d_phi F_phi, analytic
    std::function<Complex(double, double)> angular_divergence;
};

/// max over the sample set of |(alpha+2) F_r + angular divergence|; samples
/// outside theta in (0.05, pi-0.05) are excluded.
double divergence_residual(const AngularVectorField& field, double alpha,
                           const std::vector<std::pair<double, double>>& samples);

/// Single-m field on an (r, theta) grid: components F_c(r,theta) e^{im phi}.
struct AzimuthalModeGrid {
    double m = 0.0;
    std::vector<double> r;     ///< uniform
    std::vector<double> theta; ///< uniform, interior
    std::vector<Complex> comp[3];
    std::vector<Complex> dtheta[3]; ///< optional analytic theta-derivatives

    Complex at(int c, std::size_t ir, std::size_t it) const
    {
        return comp[c][ir * theta.size() + it];
    }
    static AzimuthalModeGrid make(double m, int nr, int ntheta, double r_lo,
                                  double r_hi);
};

/// H = (curl E)/(i k), with mu0 = 1 and omega = k. Radial derivatives use
/// 4th-order stencils; theta uses the analytic arrays when present.
AzimuthalModeGrid curl_magnetic(const AzimuthalModeGrid& field, double k);

struct CavitySpec {
    double phi0 = 3.14159265358979323846;
    double a = 1.0;
    int n = 1;
};

struct CavityReport {
    double ell = 0.0;      ///< = |m| = n Phi0 / (2 pi)
    double m = 0.0;
    double k1a = 0.0;      ///< sqrt(2 l) eigenfrequency estimate
    Verdict energy_verdict = Verdict::convergent;
    double radial_exponent = 0.0;   ///< 2l
    bool angular_convergent = false; ///< integral of sin^{2l-1} finite (l > 0)
    double etheta_slope = 0.0;      ///< measured near-origin law, ~ l - 1
};

CavityReport cavity_analyze(const CavitySpec& spec);

} // namespace csphere::energy
