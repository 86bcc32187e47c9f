#include "csphere/radial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace csphere::radial {

namespace {

using specfun::sph_bessel_j;
using specfun::sph_bessel_j_deriv;
using specfun::sph_bessel_y;
using specfun::sph_bessel_y_deriv;

specfun::FracOrder order_of(const ModeIndex& mode)
{
    return specfun::order_from_degree(mode.ell);
}

// panel edges graded geometrically (ratio 2) toward r_inner
std::vector<double> panel_edges(double lo, double hi, int n)
{
    std::vector<double> edges(n + 1);
    const double total = std::pow(2.0, n) - 1.0;
    edges[0] = lo;
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) {
        acc += std::pow(2.0, i - 1.0);
        edges[i] = lo + (hi - lo) * acc / total;
    }
    edges[n] = hi;
    return edges;
}

// dense trapezoid grid shared by the fixed-point iteration
std::vector<double> dense_grid(const SolverConfig& cfg)
{
    const int n_nodes = std::max(1200, 16 * cfg.n_radial);
    const auto edges = panel_edges(cfg.r_inner, cfg.r_outer, cfg.n_radial);
    std::vector<double> grid;
    grid.reserve(n_nodes + cfg.n_radial);
    const int per_panel = std::max(2, n_nodes / cfg.n_radial);
    for (int p = 0; p < cfg.n_radial; ++p)
        for (int i = 0; i < per_panel; ++i)
            grid.push_back(edges[p] + (edges[p + 1] - edges[p]) * i / per_panel);
    grid.push_back(cfg.r_outer);
    return grid;
}

struct BesselTables {
    std::vector<double> j, y, dj, dy; // at k*r; dj, dy are d/dr
};

BesselTables tabulate(const std::vector<double>& grid, double nu, double k)
{
    BesselTables t;
    const std::size_t n = grid.size();
    t.j.resize(n);
    t.y.resize(n);
    t.dj.resize(n);
    t.dy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = k * grid[i];
        t.j[i] = sph_bessel_j(nu, x);
        t.y[i] = sph_bessel_y(nu, x);
        t.dj[i] = k * sph_bessel_j_deriv(nu, x);
        t.dy[i] = k * sph_bessel_y_deriv(nu, x);
    }
    return t;
}

std::vector<Complex> cumtrapz(const std::vector<double>& grid,
                              const std::vector<Complex>& w)
{
    std::vector<Complex> out(grid.size());
    out[0] = Complex(0.0, 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (w[i] + w[i - 1]);
    return out;
}

} // namespace

void SolverConfig::require_valid() const
{
    if (!(r_inner >= 0.0 && r_inner < r_outer))
        throw DomainError("SolverConfig: requires 0 <= r_inner < r_outer");
    if (!(k > 0.0) || !(tol > 0.0) || n_radial < 2 || max_iter < 1)
        throw DomainError("SolverConfig: invalid parameters");
}

Complex radial_er(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                  const SolverConfig& cfg, double r)
{
    const double x = cfg.k * r;
    const auto fo = specfun::FracOrder::real(mode.ell);
    const Complex h1 = specfun::sph_bessel(specfun::BesselKind::h1, fo, x);
    const Complex h2 = specfun::sph_bessel(specfun::BesselKind::h2, fo, x);
    return coeffs.alpha * h1 + coeffs.beta * h2;
}

Complex radial_er_deriv(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                        const SolverConfig& cfg, double r)
{
    const double x = cfg.k * r;
    const double l = mode.ell;
    const double dj = cfg.k * sph_bessel_j_deriv(l, x);
    const double dy = cfg.k * sph_bessel_y_deriv(l, x);
    const Complex dh1(dj, dy);
    const Complex dh2(dj, -dy);
    return coeffs.alpha * dh1 + coeffs.beta * dh2;
}

double greens_theta(const specfun::FracOrder& nu, const SolverConfig& cfg, double r,
                    double rp)
{
    if (nu.allow_complex && nu.complex_part != 0.0)
        throw ComplexOrderUnsupported("greens_theta: complex order not supported");
    const double lo = std::min(r, rp), hi = std::max(r, rp);
    return cfg.k * sph_bessel_j(nu.nu, cfg.k * lo) * sph_bessel_y(nu.nu, cfg.k * hi);
}

double greens_delta_mass(const specfun::FracOrder& nu, const SolverConfig& cfg,
                         double rp, int n_grid)
{
    const double lo = std::max(cfg.r_inner, 0.25 * rp);
    const double hi = std::min(cfg.r_outer, 4.0 * rp);
    const double h = (hi - lo) / (n_grid - 1);
    std::vector<double> g(n_grid), r(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        r[i] = lo + h * i;
        g[i] = greens_theta(nu, cfg, r[i], rp);
    }
    // L_theta = d^2/dr^2 + (2/r) d/dr + k^2 - (l(l+1)-1)/r^2, the operator that
    // annihilates j_nu(kr) and y_nu(kr); mass taken against the r^2 dr measure
    const double c = nu.nu * (nu.nu + 1.0);
    double mass = 0.0;
    for (int i = 1; i + 1 < n_grid; ++i) {
        const double d2 = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h);
        const double d1 = (g[i + 1] - g[i - 1]) / (2.0 * h);
        const double lg =
            d2 + 2.0 / r[i] * d1 + (cfg.k * cfg.k - c / (r[i] * r[i])) * g[i];
        mass += lg * r[i] * r[i] * h;
    }
    return mass;
}

// declared below; the estimate reuses the iteration workspace tables
namespace {
double coupling_operator_bound(const ModeIndex& mode, const SolverConfig& cfg);
}

double contraction_pre_estimate(const ModeIndex& mode, const SolverConfig& cfg,
                                const ProjectionSet& proj)
{
    return std::abs(proj.c_thetaphi) * coupling_operator_bound(mode, cfg);
}

namespace {

// geometric (width-ratio-2) panel rule on [lo, hi], dense end at `dense_end`
void geometric_panels(double lo, double hi, int n, bool dense_at_lo,
                      std::vector<double>& xs, std::vector<double>& ws)
{
    const auto edges_raw = panel_edges(0.0, hi - lo, n);
    std::vector<double> xg, wg;
    quadrature::gauss_legendre(4, xg, wg);
    xs.clear();
    ws.clear();
    for (int p = 0; p < n; ++p) {
        double a, b;
        if (dense_at_lo) {
            a = lo + edges_raw[p];
            b = lo + edges_raw[p + 1];
        } else {
            a = hi - edges_raw[p + 1];
            b = hi - edges_raw[p];
        }
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t q = 0; q < xg.size(); ++q) {
            xs.push_back(c + h * xg[q]);
            ws.push_back(h * wg[q]);
        }
    }
}

// two-region panel integral of G(r, r') w(r') dr' with an exact split at r;
// both regions graded geometrically toward their small-r'-behaviour end
Complex two_region_integral(const std::function<Complex(double)>& w, double nu,
                            const SolverConfig& cfg, double r, int n_panels)
{
    const double k = cfg.k;
    std::vector<double> xs, ws;
    Complex inner = 0.0;
    geometric_panels(cfg.r_inner, r, n_panels, true, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i)
        inner += ws[i] * sph_bessel_j(nu, k * xs[i]) * w(xs[i]);
    Complex outer = 0.0;
    geometric_panels(r, cfg.r_outer, n_panels, true, xs, ws);
    for (std::size_t i = 0; i < xs.size(); ++i)
        outer += ws[i] * sph_bessel_y(nu, k * xs[i]) * w(xs[i]);
    return k * (sph_bessel_y(nu, k * r) * inner + sph_bessel_j(nu, k * r) * outer);
}

Complex two_region_checked(const std::function<Complex(double)>& w, double nu,
                           const SolverConfig& cfg, double r)
{
    const Complex v1 = two_region_integral(w, nu, cfg, r, cfg.n_radial);
    const Complex v2 = two_region_integral(w, nu, cfg, r, 2 * cfg.n_radial);
    const Complex v4 = two_region_integral(w, nu, cfg, r, 4 * cfg.n_radial);
    const double d12 = std::abs(v2 - v1);
    const double d24 = std::abs(v4 - v2);
    const double scale = std::abs(v4) + 1e-300;
    if (d24 > 1e-10 * scale && d24 > 0.5 * d12)
        throw QuadratureStall("kernel quadrature: refinement fails to halve the error");
    return v4;
}

} // namespace

Complex kernel_theta(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                     const SolverConfig& cfg, double r, const ProjectionSet& proj)
{
    cfg.require_valid();
    if (!(r > cfg.r_inner && r < cfg.r_outer))
        throw DomainError("kernel_theta: r outside (r_inner, r_outer)");
    if (std::abs(proj.b_theta) == 0.0)
        return Complex(0.0, 0.0);
    const auto nu = order_of(mode);
    const auto w = [&](double rp) {
        return radial_er_deriv(mode, coeffs, cfg, rp) / rp;
    };
    return proj.b_theta * two_region_checked(w, nu.nu, cfg, r);
}

Complex kernel_phi(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                   const SolverConfig& cfg, double r, const ProjectionSet& proj)
{
    cfg.require_valid();
    if (!(r > cfg.r_inner && r < cfg.r_outer))
        throw DomainError("kernel_phi: r outside (r_inner, r_outer)");
    const auto nu = order_of(mode);

    Complex total = 0.0;
    if (std::abs(proj.b_phi) != 0.0) {
        const auto w = [&](double rp) {
            return radial_er(mode, coeffs, cfg, rp) / (rp * rp);
        };
        total -= proj.b_phi * two_region_checked(w, nu.nu, cfg, r);
    }
    if (std::abs(proj.c_thetaphi) != 0.0) {
        // int G (1/r'^2) d(r'^2 K_theta) dr' = [G K_theta] - int (dG - 2G/r') K_theta
        const auto kth = [&](double rp) {
            return kernel_theta(mode, coeffs, cfg, rp, proj);
        };
        const double k = cfg.k;
        std::vector<double> xs, ws;
        Complex inner = 0.0;
        geometric_panels(cfg.r_inner, r, cfg.n_radial, true, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double rp = xs[i];
            const double dg = k * k * sph_bessel_j_deriv(nu.nu, k * rp);
            const double gg = k * sph_bessel_j(nu.nu, k * rp);
            inner += ws[i] * (dg - 2.0 * gg / rp) * kth(rp);
        }
        Complex outer = 0.0;
        geometric_panels(r, cfg.r_outer, cfg.n_radial, true, xs, ws);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double rp = xs[i];
            const double dg = k * k * sph_bessel_y_deriv(nu.nu, k * rp);
            const double gg = k * sph_bessel_y(nu.nu, k * rp);
            outer += ws[i] * (dg - 2.0 * gg / rp) * kth(rp);
        }
        const double eps_in = cfg.r_inner * (1.0 + 1e-9) + 1e-300;
        const double eps_out = cfg.r_outer * (1.0 - 1e-9);
        const Complex byparts =
            greens_theta(nu, cfg, r, eps_out) * kth(eps_out) -
            greens_theta(nu, cfg, r, eps_in) * kth(eps_in) -
            (sph_bessel_y(nu.nu, k * r) * inner + sph_bessel_j(nu.nu, k * r) * outer);
        total += proj.c_thetaphi * byparts;
    }
    return total;
}

std::vector<double> solver_grid(const SolverConfig& cfg)
{
    return dense_grid(cfg);
}

namespace {

struct IterationWorkspace {
    std::vector<double> grid;
    BesselTables bt;
    std::vector<Complex> er, der;
    SolverConfig cfg;
    double nu = 0.0;

    std::vector<Complex> greens_apply(const std::vector<Complex>& src) const
    {
        const std::size_t n = grid.size();
        std::vector<Complex> wj(n), wy(n);
        for (std::size_t i = 0; i < n; ++i) {
            wj[i] = bt.j[i] * src[i];
            wy[i] = bt.y[i] * src[i];
        }
        const auto cj = cumtrapz(grid, wj);
        const auto cy = cumtrapz(grid, wy);
        std::vector<Complex> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = cfg.k * (bt.y[i] * cj[i] + bt.j[i] * (cy[n - 1] - cy[i]));
        return out;
    }

    // int G (1/r'^2) d/dr'(r'^2 f) dr' by parts: [G f] - int (dG/dr' - 2G/r') f
    std::vector<Complex> greens_apply_dr2(const std::vector<Complex>& f) const
    {
        const std::size_t n = grid.size();
        std::vector<Complex> wj(n), wy(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid[i];
            wj[i] = (bt.dj[i] - 2.0 * bt.j[i] / r) * f[i];
            wy[i] = (bt.dy[i] - 2.0 * bt.y[i] / r) * f[i];
        }
        const auto cj = cumtrapz(grid, wj);
        const auto cy = cumtrapz(grid, wy);
        std::vector<Complex> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex integral =
                cfg.k * (bt.y[i] * cj[i] + bt.j[i] * (cy[n - 1] - cy[i]));
            const Complex boundary = cfg.k * bt.j[i] * bt.y[n - 1] * f[n - 1] -
                                     cfg.k * bt.j[0] * bt.y[i] * f[0];
            out[i] = boundary - integral;
        }
        return out;
    }
};

IterationWorkspace make_workspace(const ModeIndex& mode,
                                  const HomogeneousCoeffs& coeffs,
                                  const SolverConfig& cfg)
{
    IterationWorkspace w;
    w.cfg = cfg;
    w.grid = dense_grid(cfg);
    w.nu = specfun::order_from_degree(mode.ell).nu;
    w.bt = tabulate(w.grid, w.nu, cfg.k);
    const std::size_t n = w.grid.size();
    w.er.resize(n);
    w.der.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.er[i] = radial_er(mode, coeffs, cfg, w.grid[i]);
        w.der[i] = radial_er_deriv(mode, coeffs, cfg, w.grid[i]);
    }
    return w;
}

double sup_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// sup-norm bound of the discrete Green-coupling map f -> int G (1/r'^2) d(r'^2 f):
// dominated by sup|G|-type sums of the by-parts kernel plus boundary terms
double coupling_operator_bound(const ModeIndex& mode, const SolverConfig& cfg)
{
    HomogeneousCoeffs unit;
    const auto w = make_workspace(mode, unit, cfg);
    const std::size_t n = w.grid.size();
    std::vector<double> aj(n), ay(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = w.grid[i];
        aj[i] = std::abs(w.bt.dj[i] - 2.0 * w.bt.j[i] / r);
        ay[i] = std::abs(w.bt.dy[i] - 2.0 * w.bt.y[i] / r);
    }
    std::vector<double> cj(n, 0.0), cy(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double h = 0.5 * (w.grid[i] - w.grid[i - 1]);
        cj[i] = cj[i - 1] + h * (aj[i] + aj[i - 1]);
        cy[i] = cy[i - 1] + h * (ay[i] + ay[i - 1]);
    }
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double integral =
            cfg.k * (std::abs(w.bt.y[i]) * cj[i] +
                     std::abs(w.bt.j[i]) * (cy[n - 1] - cy[i]));
        const double boundary = cfg.k * std::abs(w.bt.j[i] * w.bt.y[n - 1]) +
                                cfg.k * std::abs(w.bt.j[0] * w.bt.y[i]);
        bound = std::max(bound, integral + boundary);
    }
    return bound;
}

} // namespace

RadialSolution coupled_solve(const ModeIndex& mode, const HomogeneousCoeffs& coeffs,
                             const SolverConfig& cfg, const ProjectionSet& proj)
{
    cfg.require_valid();
    const auto w = make_workspace(mode, coeffs, cfg);
    const std::size_t n = w.grid.size();

    std::vector<Complex> hom_theta(n), hom_phi(n), src_theta(n), src_er(n);
    for (std::size_t i = 0; i < n; ++i) {
        hom_theta[i] = coeffs.c1 * w.bt.j[i] + coeffs.c2 * w.bt.y[i];
        hom_phi[i] = coeffs.d1 * w.bt.j[i] + coeffs.d2 * w.bt.y[i];
        src_theta[i] = w.der[i] / (w.grid[i] * w.grid[i]);
        src_er[i] = w.er[i] / (w.grid[i] * w.grid[i]);
    }
    const auto i_theta_fixed = w.greens_apply(src_theta);
    const auto i_phi_fixed = w.greens_apply(src_er);

    std::vector<Complex> etheta(n, Complex(0.0, 0.0)), ephi(n, Complex(0.0, 0.0));
    std::vector<Complex> etheta_new(n), ephi_new(n);

    double prev_delta = -1.0;
    double ratio = 0.0;
    int consecutive_expanding = 0;
    int iter = 0;
    bool converged = false;
    for (; iter < cfg.max_iter; ++iter) {
        const auto coupled_theta = w.greens_apply_dr2(ephi);
        for (std::size_t i = 0; i < n; ++i)
            etheta_new[i] = hom_theta[i] + proj.b_theta * i_theta_fixed[i] -
                            proj.c_thetaphi * coupled_theta[i];
        const auto coupled_phi = w.greens_apply_dr2(etheta_new);
        for (std::size_t i = 0; i < n; ++i)
            ephi_new[i] = hom_phi[i] + proj.b_phi * i_phi_fixed[i] +
                          std::conj(proj.c_thetaphi) * coupled_phi[i];

        const double delta = sup_diff(etheta_new, etheta) + sup_diff(ephi_new, ephi);
        etheta.swap(etheta_new);
        ephi.swap(ephi_new);
        if (prev_delta > 0.0) {
            ratio = delta / prev_delta;
            consecutive_expanding = (ratio >= 1.0) ? consecutive_expanding + 1 : 0;
            if (consecutive_expanding >= 5)
                throw NotContractive("coupled_solve: expanding for 5 iterations");
        }
        prev_delta = delta;
        if (delta < cfg.tol) {
            ++iter;
            converged = true;
            break;
        }
    }
    if (!converged)
        throw MaxIterExceeded("coupled_solve: iteration cap reached");

    RadialSolution out;
    out.mode = mode;
    out.grid = w.grid;
    out.e_r = w.er;
    out.e_theta = std::move(etheta);
    out.e_phi = std::move(ephi);
    out.iterations = iter;
    out.contraction_estimate = ratio;
    return out;
}

KernelProfiles spectral_kernels_first_order(const ModeIndex& mode,
                                            const HomogeneousCoeffs& coeffs,
                                            const SolverConfig& cfg,
                                            const ProjectionSet& proj,
                                            const std::vector<double>& r_grid)
{
    cfg.require_valid();
    const auto w = make_workspace(mode, coeffs, cfg);
    const std::size_t n = w.grid.size();

    std::vector<Complex> hom_theta(n), hom_phi(n), src_theta(n), src_er(n);
    for (std::size_t i = 0; i < n; ++i) {
        hom_theta[i] = coeffs.c1 * w.bt.j[i] + coeffs.c2 * w.bt.y[i];
        hom_phi[i] = coeffs.d1 * w.bt.j[i] + coeffs.d2 * w.bt.y[i];
        src_theta[i] = w.der[i] / (w.grid[i] * w.grid[i]);
        src_er[i] = w.er[i] / (w.grid[i] * w.grid[i]);
    }
    const auto i_theta = w.greens_apply(src_theta);
    const auto i_phi = w.greens_apply(src_er);

    std::vector<Complex> theta0(n), phi0(n);
    for (std::size_t i = 0; i < n; ++i) {
        theta0[i] = hom_theta[i] + proj.b_theta * i_theta[i];
        phi0[i] = hom_phi[i] + proj.b_phi * i_phi[i];
    }
    const auto cross_theta = w.greens_apply_dr2(phi0);
    const auto cross_phi = w.greens_apply_dr2(theta0);
    std::vector<Complex> ktheta(n), kphi(n);
    for (std::size_t i = 0; i < n; ++i) {
        ktheta[i] = theta0[i] - proj.c_thetaphi * cross_theta[i];
        kphi[i] = phi0[i] + std::conj(proj.c_thetaphi) * cross_phi[i];
    }

    KernelProfiles out;
    out.grid = r_grid;
    out.k_theta.resize(r_grid.size());
    out.k_phi.resize(r_grid.size());
    for (std::size_t q = 0; q < r_grid.size(); ++q) {
        const double r = std::clamp(r_grid[q], w.grid.front(), w.grid.back());
        const auto it = std::upper_bound(w.grid.begin(), w.grid.end(), r);
        std::size_t hi = static_cast<std::size_t>(it - w.grid.begin());
        if (hi >= w.grid.size())
            hi = w.grid.size() - 1;
        const std::size_t lo = hi == 0 ? 0 : hi - 1;
        const double t = (w.grid[hi] > w.grid[lo])
                             ? (r - w.grid[lo]) / (w.grid[hi] - w.grid[lo])
                             : 0.0;
        out.k_theta[q] = (1.0 - t) * ktheta[lo] + t * ktheta[hi];
        out.k_phi[q] = (1.0 - t) * kphi[lo] + t * kphi[hi];
    }
    return out;
}

Complex residue_field(const std::vector<PoleSpec>& poles, double mode_m, double r,
                      double theta, double phi)
{
    const Complex two_pi_i(0.0, 2.0 * 3.14159265358979323846);
    Complex total = 0.0;
    const auto term = [&](double ell) {
        const Complex alpha(ell - 1.0, 0.0);
        const angular::ModeIndex idx{ell, mode_m};
        return std::pow(Complex(r, 0.0), alpha) *
               angular::eval_psi(idx, theta, phi).value;
    };
    for (const auto& p : poles) {
        if (p.order < 1 || p.order > 2)
            throw UnsupportedPoleOrder("residue_field: pole order must be 1 or 2");
        const double ell = p.ell_n.real();
        if (p.order == 1) {
            Complex t = term(ell);
            if (p.ell_n.imag() != 0.0)
                t *= std::pow(Complex(r, 0.0), Complex(0.0, p.ell_n.imag()));
            total += two_pi_i * p.residue * t;
        } else {
            const double h = 1e-5;
            const Complex d = (term(ell + h) - term(ell - h)) / (2.0 * h);
            total += two_pi_i * p.residue * d;
        }
    }
    return total;
}

} // namespace csphere::radial
