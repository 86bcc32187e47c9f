#pragma once
#include <complex>
#include "csphere/errors.hpp"

namespace csphere::specfun {

using Complex = std::complex<double>;

/// Iteration cap shared by all series and continued fractions.
inline constexpr int kSeriesCap = 5000;
inline constexpr double kSeriesTol = 1e-14;

/// Fractional (possibly complex) Bessel order nu = sqrt(l(l+1)-1).
struct FracOrder {
    double nu = 0.0;           ///< real part of the order
    bool allow_complex = false;
    double complex_part = 0.0; ///< imaginary part, 0 unless allow_complex

    static FracOrder real(double v) { return {v, false, 0.0}; }
    static FracOrder complex_order(double re, double im) { return {re, true, im}; }
};

/// Builds nu = sqrt(l(l+1)-1); complex for l(l+1) < 1 only when allowed.
FracOrder order_from_degree(double ell, bool allow_complex = false);

/// log|Gamma(x)| and the sign of Gamma(x); throws PoleError at non-positive integers.
struct LogGamma {
    double log_abs;
    int sign;
};
LogGamma lgamma_signed(double x);

/// Gamma(a)/Gamma(b), computed in log space.
double gamma_ratio(double a, double b);

/// Gamma(z) for complex z (Lanczos approximation).
Complex gamma_complex(Complex z);

/// Gauss hypergeometric 2F1(a,b;c;x) for real parameters, x < 1.
Complex hyp2f1(double a, double b, double c, double x);

/// Regularized 2F1(a,b;c;x)/Gamma(c); well-defined at non-positive integer c.
double hyp2f1_regularized(double a, double b, double c, double x);

/// Ferrers function P_s^mu(x) of real degree s and real order mu, x in (-1,1).
double legendre_p(double s, double mu, double x);

/// Pole-accurate Ferrers evaluation: argument cos(theta) with
/// theta = t (north) or theta = pi - t (south), t the distance to the pole.
/// Stays accurate where cos(theta) would round to +-1.
double legendre_p_polar(double s, double mu, double t, bool south);
double legendre_q_polar(double s, double mu, double t, bool south);

/// d/dtheta P_s^mu(cos(theta)) via the degree-lowering recurrence.
double legendre_p_dtheta(double s, double mu, double theta, double sin_floor = 1e-10);

/// Legendre function of the second kind. |x| < 1 uses the Ferrers connection
/// formulas; x > 1 uses the hypergeometric series in 1/x^2.
double legendre_q(double s, double mu, double x);

enum class BesselKind { j, y, h1, h2 };

/// Spherical Bessel/Neumann/Hankel of fractional order.
Complex sph_bessel(BesselKind kind, const FracOrder& nu, double x);

/// Convenience wrappers for real order.
double sph_bessel_j(double nu, double x);
double sph_bessel_y(double nu, double x);

/// d/dx of the spherical Bessel/Neumann f_nu using f' = (nu/x) f_nu - f_{nu+1}.
double sph_bessel_j_deriv(double nu, double x);
double sph_bessel_y_deriv(double nu, double x);

/// j_nu(kr) d/dr[y_nu(kr)] - y_nu(kr) d/dr[j_nu(kr)]; equals 1/(k r^2).
double wronskian_jy(double nu, double k, double r);

/// (2l+1)!! continued as 2^{l+1} Gamma(l+3/2)/sqrt(pi), valid for l > -3/2.
double double_factorial_cont(double ell);

} // namespace csphere::specfun
