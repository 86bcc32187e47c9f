#include "csphere/coupling.hpp"

#include <cmath>

namespace csphere::coupling {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_integer(double x, double tol = 1e-12)
{
    return std::abs(x - std::round(x)) < tol;
}

// Half mesh on (theta_min, pi/2], panels shrinking geometrically toward the
// pole; integrands are evaluated in polar form g(t, south) with t the
// distance to the nearer pole, so the pole limit keeps full precision.
struct HalfMesh {
    std::vector<double> nodes;
    std::vector<double> weights;
    double theta_min;
};

using PolarIntegrand = std::function<double(double, bool)>;

HalfMesh half_mesh(int levels, double q = 0.7, int p = 8)
{
    HalfMesh mesh;
    std::vector<double> xg, wg;
    quadrature::gauss_legendre(p, xg, wg);
    std::vector<double> edges;
    double e = 0.5 * kPi;
    for (int i = 0; i <= levels; ++i) {
        edges.push_back(e);
        e *= q;
    }
    mesh.theta_min = edges.back();
    for (int i = levels; i >= 1; --i) {
        const double a = edges[i], b = edges[i - 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int k = 0; k < p; ++k) {
            mesh.nodes.push_back(c + h * xg[k]);
            mesh.weights.push_back(h * wg[k]);
        }
    }
    return mesh;
}

struct SingularIntegralValue {
    double value = 0.0;
    double abs_mass = 0.0; ///< integral of |g|, the cancellation scale
};

// integral over [0,pi] of g where g ~ c t^{beta_n} at the north pole and
// ~ c' t^{beta_s} at the south pole; analytic power tails below theta_min.
SingularIntegralValue singular_theta_integral(const PolarIntegrand& g,
                                              double beta_north, double beta_south,
                                              int levels)
{
    const HalfMesh mesh = half_mesh(levels);
    SingularIntegralValue out;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double a = g(mesh.nodes[i], false);
        const double b = g(mesh.nodes[i], true);
        out.value += mesh.weights[i] * (a + b);
        out.abs_mass += mesh.weights[i] * (std::abs(a) + std::abs(b));
    }
    const double probe = 1e-6;
    if (beta_north > -1.0) {
        const double c0 = g(probe, false) / std::pow(probe, beta_north);
        const double tail =
            c0 * std::pow(mesh.theta_min, beta_north + 1.0) / (beta_north + 1.0);
        out.value += tail;
        out.abs_mass += std::abs(tail);
    }
    if (beta_south > -1.0) {
        const double c0 = g(probe, true) / std::pow(probe, beta_south);
        const double tail =
            c0 * std::pow(mesh.theta_min, beta_south + 1.0) / (beta_south + 1.0);
        out.value += tail;
        out.abs_mass += std::abs(tail);
    }
    return out;
}

// Cauchy check under mesh refinement; throws SingularIntegrand when the value
// is still moving (divergent or unresolved integrand). Values that vanish by
// parity are accepted against the cancellation scale of the integrand.
double checked_singular_integral(const PolarIntegrand& g, double beta_north,
                                 double beta_south, const char* name)
{
    if (beta_north <= -1.0 || beta_south <= -1.0)
        throw SingularIntegrand(std::string(name) +
                                ": endpoint exponent <= -1, integral diverges");
    try {
        const auto coarse = singular_theta_integral(g, beta_north, beta_south, 90);
        const auto fine = singular_theta_integral(g, beta_north, beta_south, 140);
        const double diff = std::abs(fine.value - coarse.value);
        if (diff > 1e-6 * std::abs(fine.value) && diff > 1e-9 * fine.abs_mass)
            throw SingularIntegrand(std::string(name) +
                                    ": failed the mesh-refinement Cauchy check");
        return fine.value;
    } catch (const NonConvergent& e) {
        throw SingularIntegrand(std::string(name) + ": " + e.what());
    }
}

// south-pole exponent of |scriptP_l^{|m|}|: +|m| when l-|m| is an integer
// (reflection coefficient of the divergent branch vanishes), else -|m|.
double south_exponent(double ell, double mu)
{
    return is_integer(ell - mu) ? mu : -mu;
}

} // namespace

Complex sphere_inner_product(const AngularHandle& f, const AngularHandle& g,
                             const QuadratureRule& rule)
{
    const auto phis = rule.phi_nodes();
    const double wphi = rule.phi_weight();
    Complex sum = 0.0;
    for (std::size_t i = 0; i < rule.theta_nodes.size(); ++i) {
        const double th = rule.theta_nodes[i];
        const double wt = rule.theta_weights[i];
        for (std::size_t j = 0; j < phis.size(); ++j) {
            Complex fv, gv;
            try {
                fv = f(th, phis[j]);
                gv = g(th, phis[j]);
            } catch (const Error& err) {
                throw Error("sphere_inner_product: NodeFailure at theta=" +
                            std::to_string(th) + ", phi=" + std::to_string(phis[j]) +
                            ": " + err.what());
            }
            sum += std::conj(fv) * gv * wt * wphi;
        }
    }
    return sum;
}

ProjectionSet projections(const ModeIndex& idx, const QuadratureRule& rule)
{
    idx.require_valid();
    (void)rule; // resolution handled by the dedicated pole mesh below
    const double mu = std::abs(idx.m);
    const double n = angular::normalization(idx);
    const double n2 = n * n;
    const double phi0 = idx.phi0;

    ProjectionSet out;
    out.a_theta_closed = -(idx.ell * (idx.ell + 1.0) - idx.m * idx.m) * 0.5 * phi0;

    const auto kernel = [&](double t, bool south) {
        return angular::basis_kernel_polar(idx.ell, mu, t, south);
    };
    const auto kernel_d = [&](double t, bool south) {
        return angular::basis_kernel_dtheta_polar(idx.ell, mu, t, south);
    };

    // A_theta = B_theta = N^2 Phi0 * int dP/dtheta P sin(theta) dtheta
    const double b_s = south_exponent(idx.ell, mu);
    {
        const auto g = [&](double t, bool south) {
            return kernel_d(t, south) * kernel(t, south) * std::sin(t);
        };
        const double v = checked_singular_integral(g, 2.0 * mu, 2.0 * b_s, "A_theta");
        out.a_theta = Complex(n2 * phi0 * v, 0.0);
        out.b_theta = out.a_theta;
        const double scale = std::max(std::abs(out.a_theta_closed), 1e-30);
        out.a_theta_closed_discrepancy =
            std::abs(out.a_theta.real() - out.a_theta_closed) / scale;
    }

    if (idx.m == 0.0) {
        out.a_phi = out.b_phi = out.c_thetaphi = Complex(0.0, 0.0);
        return out;
    }

    // A_phi = i m N^2 Phi0 * int P^2 dtheta  (one 1/sin cancelled by the measure)
    {
        const auto g = [&](double t, bool south) {
            const double p = kernel(t, south);
            return p * p;
        };
        const double v = checked_singular_integral(g, 2.0 * mu, 2.0 * b_s, "A_phi");
        out.a_phi = Complex(0.0, idx.m) * (n2 * phi0 * v);
    }
    // B_phi = i m N^2 Phi0 * int P^2 / sin(theta) dtheta
    {
        const auto g = [&](double t, bool south) {
            const double p = kernel(t, south);
            return p * p / std::sin(t);
        };
        const double v =
            checked_singular_integral(g, 2.0 * mu - 1.0, 2.0 * b_s - 1.0, "B_phi");
        out.b_phi = Complex(0.0, idx.m) * (n2 * phi0 * v);
    }
    // C_thetaphi = i m N^2 Phi0 * int P dP/dtheta / sin(theta) dtheta;
    // endpoint exponent 2|m|-2: log-divergent at |m| <= 1/2
    {
        const auto g = [&](double t, bool south) {
            return kernel(t, south) * kernel_d(t, south) / std::sin(t);
        };
        const double v = checked_singular_integral(g, 2.0 * mu - 2.0, 2.0 * b_s - 2.0,
                                                   "C_thetaphi");
        out.c_thetaphi = Complex(0.0, idx.m) * (n2 * phi0 * v);
    }
    return out;
}

Complex coupling_rtheta(const ModeIndex& idx, const QuadratureRule& rule)
{
    idx.require_valid();
    (void)rule;
    if (idx.m == 0.0)
        return Complex(0.0, 0.0);
    const double mu = std::abs(idx.m);
    const double n = angular::normalization(idx);
    const auto g = [&](double t, bool south) {
        const double p = angular::basis_kernel_polar(idx.ell, mu, t, south);
        return p * p * std::sin(t);
    };
    const double v = checked_singular_integral(g, 2.0 * mu + 1.0,
                                               2.0 * south_exponent(idx.ell, mu) + 1.0,
                                               "coupling_rtheta");
    return Complex(0.0, idx.m) * (n * n * idx.phi0 * v);
}

Complex coupling_thetaphi(const ModeIndex& idx, const ModeIndex& idx2,
                          const QuadratureRule& rule)
{
    idx.require_valid();
    idx2.require_valid();
    if (std::abs(idx.m - idx2.m) > 1e-12)
        return Complex(0.0, 0.0); // the operator preserves m
    const double mu = std::abs(idx.m);
    const double dl = idx2.ell - idx.ell;
    if (std::abs(std::abs(dl) - 1.0) < 1e-12) {
        const double l_low = std::min(idx.ell, idx2.ell);
        const double num = (l_low - mu) * (l_low + mu + 1.0);
        const double den = (2.0 * l_low + 1.0) * (2.0 * l_low + 3.0);
        return Complex(std::sqrt(num / den), 0.0);
    }
    // quadrature of <Psi_lm, (d/dtheta - cot) Psi_l'm> under sin(theta)
    const auto f = [&](double th, double ph) {
        return angular::eval_psi(idx, th, ph).value;
    };
    const auto g = [&](double th, double ph) {
        const angular::AngularEval e = angular::eval_psi(idx2, th, ph);
        return e.dtheta - e.value * std::cos(th) / std::sin(th);
    };
    return sphere_inner_product(f, g, rule);
}

LegendreNorm legendre_norm(const ModeIndex& idx)
{
    idx.require_valid();
    const double mu = std::abs(idx.m);
    LegendreNorm out;
    out.closed_form = 2.0 / (2.0 * idx.ell + 1.0) *
                      specfun::gamma_ratio(idx.ell + mu + 1.0, idx.ell - mu + 1.0);
    const auto g = [&](double t, bool south) {
        const double p = angular::basis_kernel_polar(idx.ell, mu, t, south);
        return p * p * std::sin(t);
    };
    out.quadrature = checked_singular_integral(
        g, 2.0 * mu + 1.0, 2.0 * south_exponent(idx.ell, mu) + 1.0, "legendre_norm");
    return out;
}

GramMatrix gram(const std::vector<LabeledHandle>& basis, const QuadratureRule& rule)
{
    GramMatrix g;
    g.dim = static_cast<int>(basis.size());
    g.entries.resize(g.dim, g.dim);
    g.basis_labels.reserve(basis.size());
    for (const auto& b : basis)
        g.basis_labels.push_back(b.label);

    // tabulate every handle once, then form the pairwise weighted dots
    const auto phis = rule.phi_nodes();
    const double wphi = rule.phi_weight();
    const std::size_t n_nodes = rule.theta_nodes.size() * phis.size();
    std::vector<std::vector<Complex>> tab(basis.size());
    std::vector<double> wts(n_nodes);
    for (std::size_t i = 0; i < rule.theta_nodes.size(); ++i)
        for (std::size_t j = 0; j < phis.size(); ++j)
            wts[i * phis.size() + j] = rule.theta_weights[i] * wphi;
    for (std::size_t b = 0; b < basis.size(); ++b) {
        tab[b].resize(n_nodes);
        for (std::size_t i = 0; i < rule.theta_nodes.size(); ++i)
            for (std::size_t j = 0; j < phis.size(); ++j)
                tab[b][i * phis.size() + j] =
                    basis[b].fn(rule.theta_nodes[i], phis[j]);
    }
    for (int i = 0; i < g.dim; ++i) {
        for (int j = i; j < g.dim; ++j) {
            Complex v = 0.0;
            for (std::size_t q = 0; q < n_nodes; ++q)
                v += wts[q] * std::conj(tab[i][q]) * tab[j][q];
            g.entries(i, j) = v;
            g.entries(j, i) = std::conj(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.entries,
                                                       Eigen::EigenvaluesOnly);
    g.smallest_eigenvalue = es.eigenvalues().minCoeff();
    return g;
}

double singularity_extracted_integral(const std::function<double(double)>& f,
                                      double exponent)
{
    if (exponent <= -2.0)
        throw DomainError("singularity_extracted_integral: f sin(theta) not integrable");
    const double theta_c = 0.5;
    // model coefficient from a probe deep inside the asymptotic window
    const double probe = 1e-6;
    const double c0 = f(probe) / std::pow(probe, exponent);

    // analytic: int_0^theta_c c0 theta^e sin(theta) dtheta by series
    double analytic = 0.0;
    {
        double sign = 1.0, fact = 1.0;
        for (int k = 0; k < 40; ++k) {
            const double p = exponent + 2.0 * k + 2.0;
            const double term = sign * std::pow(theta_c, p) / (fact * p);
            analytic += term;
            if (std::abs(term) < 1e-16 * std::abs(analytic))
                break;
            sign = -sign;
            fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
        analytic *= c0;
    }

    const auto remainder = [&](int n) {
        std::vector<double> xs, ws;
        quadrature::graded_composite_gl(n, 6, 0.0, theta_c, 2.0, xs, ws);
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += ws[i] * (f(xs[i]) - c0 * std::pow(xs[i], exponent)) * std::sin(xs[i]);
        std::vector<double> xt, wt;
        quadrature::gauss_legendre_ab(64, theta_c, kPi, xt, wt);
        for (std::size_t i = 0; i < xt.size(); ++i)
            s += wt[i] * f(xt[i]) * std::sin(xt[i]);
        return s;
    };
    const double r1 = remainder(32);
    const double r2 = remainder(64);
    const double r3 = remainder(128);
    const double d12 = std::abs(r1 - r2), d23 = std::abs(r2 - r3);
    const double scale = std::max(std::abs(r3) + std::abs(analytic), 1e-30);
    // Richardson-style smoothness check on the extracted remainder
    if (d23 > 1e-7 * scale && d23 > 0.7 * d12)
        throw ModelMismatch(
            "singularity_extracted_integral: remainder fails the smoothness test");
    return analytic + r3;
}

} // namespace csphere::coupling
