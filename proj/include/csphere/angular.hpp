#pragma once
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "csphere/errors.hpp"
#include "csphere/quadrature.hpp"
#include "csphere/specfun.hpp"

namespace csphere::angular {

using specfun::Complex;

/// Continuous (l, m) mode label with azimuthal period phi0.
struct ModeIndex {
    double ell = 0.0;
    double m = 0.0;
    double phi0 = 2.0 * 3.14159265358979323846;

    bool valid() const;
    void require_valid() const;
};

/// Value and angular derivatives of a basis/dual function at one sphere point.
struct AngularEval {
    Complex value{};
    Complex dtheta{};
    Complex dphi_factor{}; ///< i*m*value
};

enum class VshFamily { radial, even, odd };

/// One vector-spherical-harmonic sample in spherical components.
struct VshSample {
    VshFamily family = VshFamily::radial;
    Complex r{};
    Complex theta{};
    Complex phi{};
};

/// Spectral parameter s with l(l+1) = s(1-s).
struct SpectralParam {
    Complex s{};
};

enum class PsiVariant { plain, sin_weighted };
enum class PoleSide { north, south };

/// Analytically continued Legendre kernel used by the angular basis:
/// scriptP_l^{|m|}(x) = Gamma(l+|m|+1)/Gamma(l-|m|+1) * P_l^{-|m|}(x).
/// Behaves as theta^{|m|} at the north pole for every real m and reduces to
/// the classical associated Legendre function (Condon-Shortley phase absorbed)
/// at integer orders.
double basis_kernel(double ell, double abs_m, double x);

/// d/dtheta of basis_kernel(l, |m|, cos(theta)).
double basis_kernel_dtheta(double ell, double abs_m, double theta);

/// Second-kind companion with the same scaling:
/// scriptQ_l^{|m|}(x) = Gamma(l+|m|+1)/Gamma(l-|m|+1) * Q_l^{-|m|}(x).
double basis_kernel_q(double ell, double abs_m, double x);
double basis_kernel_q_dtheta(double ell, double abs_m, double theta);

/// Pole-accurate kernel evaluation at theta = t (north) or pi - t (south).
double basis_kernel_polar(double ell, double abs_m, double t, bool south);
double basis_kernel_dtheta_polar(double ell, double abs_m, double t, bool south);

/// N_{lm} = sqrt((2l+1)/(4pi) Gamma(l-|m|+1)/Gamma(l+|m|+1)).
double normalization(const ModeIndex& idx);

/// Measure weight w(l,m) = pi Gamma(l+|m|+1) / (sin(pi(l-|m|)) Gamma(l-|m|+1)).
double spectral_weight(const ModeIndex& idx);

/// Continuous-index scalar basis function Psi_{lm}.
AngularEval eval_psi(const ModeIndex& idx, double theta, double phi,
                     PsiVariant variant = PsiVariant::plain);

/// Biorthogonal dual Psi~_{lm} = w^{-1/2} [P + i cot(pi(l-|m|)) Q] e^{im phi}.
AngularEval eval_dual(const ModeIndex& idx, double theta, double phi);

/// Vector spherical harmonic sample; `normalized` rescales even/odd by
/// 1/sqrt(l(l+1)).
VshSample eval_vsh(VshFamily family, const ModeIndex& idx, double theta, double phi,
                   bool normalized);

/// A vector field sampled on a sphere rule, component-major storage:
/// values[(component*n_theta + i)*n_phi + j].
struct SampledVectorField {
    quadrature::QuadratureRule rule;
    std::vector<Complex> values;

    Complex at(int component, int itheta, int iphi) const
    {
        const int nt = static_cast<int>(rule.theta_nodes.size());
        return values[(static_cast<std::size_t>(component) * nt + itheta) * rule.n_phi + iphi];
    }
};

struct VshCoefficient {
    VshFamily family;
    int ell;
    int m;
    Complex value;
};

struct VshDecomposition {
    std::vector<VshCoefficient> coefficients;
    double reconstruction_error = 0.0; ///< relative L2 error of the truncated expansion
};

/// Projects a sampled vector field on the orthonormal integer VSH basis.
VshDecomposition vsh_decompose(const SampledVectorField& field, int lmax);

/// Fits log|Psi| against log(theta) (north) or log(pi-theta) (south) over the
/// asymptotic window [1e-4, 1e-2]; returns the slope.
double pole_scaling_exponent(const ModeIndex& idx, PoleSide side);

SpectralParam ell_to_s(double ell);
double s_to_ell(const SpectralParam& s);

/// Degree tables for high-degree evaluation: rows j = 0..count-1 hold
/// P^{-mu}_{mu+j}(x_i) (un-normalized negative-order Ferrers kernel), built
/// from two series seeds and the upward degree recurrence.
struct KernelTable {
    double mu = 0.0;
    int count = 0;
    std::vector<double> x;
    std::vector<double> rows;      ///< count x x.size()
    std::vector<double> rows_prev; ///< degree mu+j-1 companion, same layout

    double value(int j, std::size_t i) const { return rows[j * x.size() + i]; }
    /// d/dtheta P^{-mu}_{mu+j}(cos theta_i); sin_theta_i passed by caller.
    double dtheta(int j, std::size_t i, double x_i, double sin_theta_i) const
    {
        const double nu = mu + j;
        return -((nu - mu) * rows_prev[j * x.size() + i] - nu * x_i * value(j, i)) /
               sin_theta_i;
    }
};

KernelTable kernel_degree_table(double mu, int count, std::span<const double> x);

/// Same table built from theta nodes with pole-accurate seeds: the seed values
/// use the polar evaluation, the recurrence runs on x = cos(theta).
KernelTable kernel_degree_table_polar(double mu, int count,
                                      std::span<const double> theta);

} // namespace csphere::angular
