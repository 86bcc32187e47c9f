#include "csphere/quadrature.hpp"

#include <cmath>

namespace csphere::quadrature {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1)
        throw DomainError("gauss_legendre: n >= 1 required");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int mid = (n + 1) / 2;
    for (int i = 0; i < mid; ++i) {
        // Newton on P_n with a Chebyshev-like initial guess
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

void gauss_legendre_ab(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights)
{
    gauss_legendre(n, nodes, weights);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        nodes[i] = c + h * nodes[i];
        weights[i] *= h;
    }
}

QuadratureRule QuadratureRule::sphere(int n_theta, int n_phi, double phi0)
{
    if (n_theta < 1 || n_phi < 1)
        throw DomainError("QuadratureRule: node counts must be positive");
    if (!(phi0 > 0.0 && phi0 <= 2.0 * kPi))
        throw DomainError("QuadratureRule: phi0 must lie in (0, 2pi]");
    QuadratureRule rule;
    std::vector<double> x, w;
    gauss_legendre(n_theta, x, w);
    rule.theta_nodes.resize(n_theta);
    rule.theta_weights = w;
    for (int i = 0; i < n_theta; ++i)
        rule.theta_nodes[i] = std::acos(-x[i]); // increasing theta
    rule.n_phi = n_phi;
    rule.phi0 = phi0;
    return rule;
}

std::vector<double> QuadratureRule::phi_nodes() const
{
    std::vector<double> out(n_phi);
    for (int j = 0; j < n_phi; ++j)
        out[j] = phi0 * j / n_phi;
    return out;
}

void composite_gl(int n_panels, int p, double a, double b,
                  std::vector<double>& nodes, std::vector<double>& weights)
{
    graded_composite_gl(n_panels, p, a, b, 1.0, nodes, weights);
}

void graded_composite_gl(int n_panels, int p, double a, double b, double grading,
                         std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n_panels < 1 || p < 1)
        throw DomainError("graded_composite_gl: invalid panel spec");
    std::vector<double> xg, wg;
    gauss_legendre(p, xg, wg);
    nodes.clear();
    weights.clear();
    nodes.reserve(n_panels * p);
    weights.reserve(n_panels * p);
    double lo = a;
    for (int i = 1; i <= n_panels; ++i) {
        const double hi = a + (b - a) * std::pow(double(i) / n_panels, grading);
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (int q = 0; q < p; ++q) {
            nodes.push_back(c + h * xg[q]);
            weights.push_back(h * wg[q]);
        }
        lo = hi;
    }
}

void pole_graded_theta(int n_panels_half, int p, double grading,
                       std::vector<double>& nodes, std::vector<double>& weights)
{
    std::vector<double> n_half, w_half;
    graded_composite_gl(n_panels_half, p, 0.0, 0.5 * kPi, grading, n_half, w_half);
    const std::size_t m = n_half.size();
    nodes.resize(2 * m);
    weights.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        nodes[i] = n_half[i];
        weights[i] = w_half[i];
        nodes[2 * m - 1 - i] = kPi - n_half[i];
        weights[2 * m - 1 - i] = w_half[i];
    }
}

// tanh sigmoid normalized by tanh(c) so that xi = 0, 1 land exactly on the
// endpoints and the c -> 0 limit is the affine map
double tanh_map(double xi, double lo, double hi, double c)
{
    const double t = std::tanh(c * (2.0 * xi - 1.0));
    return lo + (hi - lo) * 0.5 * (1.0 + t / std::tanh(c));
}

double tanh_map_deriv(double xi, double lo, double hi, double c)
{
    const double t = std::tanh(c * (2.0 * xi - 1.0));
    return (hi - lo) * c * (1.0 - t * t) / std::tanh(c);
}

void mapped_midpoint(int n, double lo, double hi, double c,
                     std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1)
        throw DomainError("mapped_midpoint: n >= 1 required");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double xi = (i + 0.5) / n;
        nodes[i] = tanh_map(xi, lo, hi, c);
        weights[i] = tanh_map_deriv(xi, lo, hi, c) / n;
    }
}

} // namespace csphere::quadrature
