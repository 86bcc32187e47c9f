#include "csphere/angular.hpp"

#include <algorithm>
#include <cmath>

namespace csphere::angular {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleProximity = 1e-8;

bool is_integer(double x, double tol = 1e-12)
{
    return std::abs(x - std::round(x)) < tol;
}

double require_theta(double theta)
{
    if (!(theta > 0.0 && theta < kPi))
        throw DomainError("theta must lie in (0, pi)");
    if (theta < kPoleProximity || kPi - theta < kPoleProximity)
        throw NearPole("evaluation within 1e-8 of a coordinate pole");
    return theta;
}

} // namespace

bool ModeIndex::valid() const
{
    return ell > std::abs(m) - 1.0 && phi0 > 0.0 && phi0 <= 2.0 * kPi + 1e-15;
}

void ModeIndex::require_valid() const
{
    if (!valid())
        throw DomainError("ModeIndex: requires l > |m| - 1 and phi0 in (0, 2pi]");
}

double basis_kernel(double ell, double abs_m, double x)
{
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           specfun::legendre_p(ell, -abs_m, x);
}

double basis_kernel_dtheta(double ell, double abs_m, double theta)
{
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           specfun::legendre_p_dtheta(ell, -abs_m, theta);
}

double basis_kernel_q(double ell, double abs_m, double x)
{
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           specfun::legendre_q(ell, -abs_m, x);
}

double basis_kernel_q_dtheta(double ell, double abs_m, double theta)
{
    // same degree-lowering identity as for P; both are Legendre solutions
    const double x = std::cos(theta);
    const double st = std::sin(theta);
    const double qm1 = specfun::legendre_q(ell - 1.0, -abs_m, x);
    const double q0 = specfun::legendre_q(ell, -abs_m, x);
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           (-((ell - abs_m) * qm1 - ell * x * q0) / st);
}

double basis_kernel_polar(double ell, double abs_m, double t, bool south)
{
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           specfun::legendre_p_polar(ell, -abs_m, t, south);
}

double basis_kernel_dtheta_polar(double ell, double abs_m, double t, bool south)
{
    // d/dtheta P^{-mu}_l(cos theta) = -[(l-mu) P^{-mu}_{l-1} - l x P^{-mu}_l]/sin(theta)
    const double st = std::sin(t);
    const double x = south ? -std::cos(t) : std::cos(t);
    const double pm1 = specfun::legendre_p_polar(ell - 1.0, -abs_m, t, south);
    const double p0 = specfun::legendre_p_polar(ell, -abs_m, t, south);
    return specfun::gamma_ratio(ell + abs_m + 1.0, ell - abs_m + 1.0) *
           (-((ell - abs_m) * pm1 - ell * x * p0) / st);
}

double normalization(const ModeIndex& idx)
{
    idx.require_valid();
    const double mu = std::abs(idx.m);
    return std::sqrt((2.0 * idx.ell + 1.0) / (4.0 * kPi) *
                     specfun::gamma_ratio(idx.ell - mu + 1.0, idx.ell + mu + 1.0));
}

double spectral_weight(const ModeIndex& idx)
{
    idx.require_valid();
    const double mu = std::abs(idx.m);
    const double s = std::sin(kPi * (idx.ell - mu));
    if (std::abs(s) < 1e-12)
        throw IntegerDifferencePole("spectral_weight: l - |m| at an integer");
    return kPi / s * specfun::gamma_ratio(idx.ell + mu + 1.0, idx.ell - mu + 1.0);
}

AngularEval eval_psi(const ModeIndex& idx, double theta, double phi, PsiVariant variant)
{
    idx.require_valid();
    require_theta(theta);
    const double mu = std::abs(idx.m);
    const double x = std::cos(theta);
    const double n = normalization(idx);
    double p = basis_kernel(idx.ell, mu, x);
    double dp = basis_kernel_dtheta(idx.ell, mu, theta);
    if (variant == PsiVariant::sin_weighted) {
        const double st = std::sin(theta);
        const double sw = std::pow(st, mu);
        dp = mu * std::pow(st, mu - 1.0) * x * p + sw * dp;
        p *= sw;
    }
    const Complex az = std::polar(1.0, idx.m * phi);
    AngularEval out;
    out.value = n * p * az;
    out.dtheta = n * dp * az;
    out.dphi_factor = Complex(0.0, idx.m) * out.value;
    return out;
}

AngularEval eval_dual(const ModeIndex& idx, double theta, double phi)
{
    idx.require_valid();
    require_theta(theta);
    const double mu = std::abs(idx.m);
    const double diff = idx.ell - mu;
    const double s = std::sin(kPi * diff);
    if (std::abs(s) < 1e-12)
        throw IntegerDifferencePole("eval_dual: cot(pi(l-|m|)) pole");
    const double cot = std::cos(kPi * diff) / s;
    const double w = spectral_weight(idx);
    const Complex inv_sqrt_w = 1.0 / std::sqrt(Complex(w, 0.0));
    const double x = std::cos(theta);

    Complex f(basis_kernel(idx.ell, mu, x), 0.0);
    Complex df(basis_kernel_dtheta(idx.ell, mu, theta), 0.0);
    if (std::abs(cot) > 1e-15) {
        f += Complex(0.0, cot) * basis_kernel_q(idx.ell, mu, x);
        df += Complex(0.0, cot) * basis_kernel_q_dtheta(idx.ell, mu, theta);
    }
    const Complex az = std::polar(1.0, idx.m * phi);
    AngularEval out;
    out.value = inv_sqrt_w * f * az;
    out.dtheta = inv_sqrt_w * df * az;
    out.dphi_factor = Complex(0.0, idx.m) * out.value;
    return out;
}

VshSample eval_vsh(VshFamily family, const ModeIndex& idx, double theta, double phi,
                   bool normalized)
{
    const AngularEval y = eval_psi(idx, theta, phi, PsiVariant::plain);
    const double st = std::sin(theta);
    VshSample out;
    out.family = family;
    switch (family) {
    case VshFamily::radial:
        out.r = y.value;
        break;
    case VshFamily::even:
        out.theta = y.dtheta;
        out.phi = y.dphi_factor / st;
        break;
    case VshFamily::odd:
        out.theta = y.dphi_factor / st;
        out.phi = -y.dtheta;
        break;
    }
    if (normalized && family != VshFamily::radial) {
        const double lam = idx.ell * (idx.ell + 1.0);
        if (lam <= 0.0)
            throw DomainError("eval_vsh: normalization requires l(l+1) > 0");
        const double scale = 1.0 / std::sqrt(lam);
        out.theta *= scale;
        out.phi *= scale;
    }
    return out;
}

VshDecomposition vsh_decompose(const SampledVectorField& field, int lmax)
{
    const auto& rule = field.rule;
    const int nt = static_cast<int>(rule.theta_nodes.size());
    const int np = rule.n_phi;
    if (nt < lmax + 1)
        throw GridTooCoarse("vsh_decompose: need at least lmax+1 theta nodes");
    if (nt < 2 * lmax + 2)
        throw GridTooCoarse("vsh_decompose: need >= 2*lmax+2 theta nodes for exactness");

    VshDecomposition out;
    const auto phis = rule.phi_nodes();
    const double wphi = rule.phi_weight();

    // accumulate <Y, field> with the sin(theta) measure (theta weights are in cos(theta))
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) {
            ModeIndex idx{double(l), double(m), rule.phi0};
            Complex acc_r = 0.0, acc_e = 0.0, acc_o = 0.0;
            for (int i = 0; i < nt; ++i) {
                const double th = rule.theta_nodes[i];
                const double wt = rule.theta_weights[i];
                for (int j = 0; j < np; ++j) {
                    const double w = wt * wphi;
                    if (l >= 1) {
                        const VshSample e =
                            eval_vsh(VshFamily::even, idx, th, phis[j], true);
                        const VshSample o =
                            eval_vsh(VshFamily::odd, idx, th, phis[j], true);
                        acc_e += w * (std::conj(e.theta) * field.at(1, i, j) +
                                      std::conj(e.phi) * field.at(2, i, j));
                        acc_o += w * (std::conj(o.theta) * field.at(1, i, j) +
                                      std::conj(o.phi) * field.at(2, i, j));
                    }
                    const VshSample r = eval_vsh(VshFamily::radial, idx, th, phis[j], true);
                    acc_r += w * std::conj(r.r) * field.at(0, i, j);
                }
            }
            out.coefficients.push_back({VshFamily::radial, l, m, acc_r});
            if (l >= 1) {
                out.coefficients.push_back({VshFamily::even, l, m, acc_e});
                out.coefficients.push_back({VshFamily::odd, l, m, acc_o});
            }
        }
    }

    // reconstruction error on the sampling grid
    double num = 0.0, den = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double th = rule.theta_nodes[i];
        const double wt = rule.theta_weights[i];
        for (int j = 0; j < np; ++j) {
            Complex rec[3] = {0.0, 0.0, 0.0};
            for (const auto& c : out.coefficients) {
                ModeIndex idx{double(c.ell), double(c.m), rule.phi0};
                const VshSample s = eval_vsh(c.family, idx, th, phis[j], true);
                rec[0] += c.value * s.r;
                rec[1] += c.value * s.theta;
                rec[2] += c.value * s.phi;
            }
            const double w = wt * wphi;
            for (int comp = 0; comp < 3; ++comp) {
                num += w * std::norm(field.at(comp, i, j) - rec[comp]);
                den += w * std::norm(field.at(comp, i, j));
            }
        }
    }
    out.reconstruction_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return out;
}

double pole_scaling_exponent(const ModeIndex& idx, PoleSide side)
{
    idx.require_valid();
    if (std::abs(idx.m) <= 0.0)
        throw DomainError("pole_scaling_exponent: requires |m| > 0");
    constexpr int kSamples = 12;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (int i = 0; i < kSamples; ++i) {
        const double t = 1e-4 * std::pow(100.0, double(i) / (kSamples - 1));
        const double theta = (side == PoleSide::north) ? t : kPi - t;
        const AngularEval e = eval_psi(idx, theta, 0.0, PsiVariant::plain);
        const double mag = std::abs(e.value);
        if (!(mag > 0.0) || !std::isfinite(mag))
            continue;
        const double lx = std::log(t), ly = std::log(mag);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 4)
        throw FitDegenerate("pole_scaling_exponent: too few usable samples");
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw FitDegenerate("pole_scaling_exponent: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

SpectralParam ell_to_s(double ell)
{
    const double L = ell * (ell + 1.0);
    const double disc = 0.25 - L;
    if (disc >= 0.0)
        return {Complex(0.5 + std::sqrt(disc), 0.0)};
    return {Complex(0.5, std::sqrt(-disc))};
}

double s_to_ell(const SpectralParam& sp)
{
    const Complex L = sp.s * (1.0 - sp.s);
    const Complex ell = -0.5 + std::sqrt(0.25 + L);
    if (std::abs(ell.imag()) > 1e-9)
        throw DomainError("s_to_ell: spectral parameter maps to complex degree");
    return ell.real();
}

namespace {

KernelTable kernel_table_impl(double mu, int count, std::vector<double> xs,
                              const std::vector<double>& pm1,
                              const std::vector<double>& p0,
                              const std::vector<double>& p1);

} // namespace

KernelTable kernel_degree_table(double mu, int count, std::span<const double> x)
{
    if (count < 1)
        throw DomainError("kernel_degree_table: count >= 1");
    std::vector<double> xs(x.begin(), x.end());
    const std::size_t n = xs.size();
    std::vector<double> pm1(n), p0(n), p1(n);
    for (std::size_t i = 0; i < n; ++i) {
        pm1[i] = specfun::legendre_p(mu - 1.0, -mu, xs[i]);
        p0[i] = specfun::legendre_p(mu, -mu, xs[i]);
        p1[i] = count > 1 ? specfun::legendre_p(mu + 1.0, -mu, xs[i]) : 0.0;
    }
    return kernel_table_impl(mu, count, std::move(xs), pm1, p0, p1);
}

KernelTable kernel_degree_table_polar(double mu, int count,
                                      std::span<const double> theta)
{
    if (count < 1)
        throw DomainError("kernel_degree_table: count >= 1");
    const std::size_t n = theta.size();
    std::vector<double> xs(n), pm1(n), p0(n), p1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool south = theta[i] > 0.5 * kPi;
        const double t = south ? kPi - theta[i] : theta[i];
        const double s = std::sin(0.5 * t);
        const double xmag = 1.0 - 2.0 * s * s;
        xs[i] = south ? -xmag : xmag;
        pm1[i] = specfun::legendre_p_polar(mu - 1.0, -mu, t, south);
        p0[i] = specfun::legendre_p_polar(mu, -mu, t, south);
        p1[i] = count > 1 ? specfun::legendre_p_polar(mu + 1.0, -mu, t, south) : 0.0;
    }
    return kernel_table_impl(mu, count, std::move(xs), pm1, p0, p1);
}

namespace {

KernelTable kernel_table_impl(double mu, int count, std::vector<double> xs,
                              const std::vector<double>& pm1,
                              const std::vector<double>& p0,
                              const std::vector<double>& p1)
{
    KernelTable t;
    t.mu = mu;
    t.count = count;
    t.x = std::move(xs);
    const std::size_t n = t.x.size();
    t.rows.assign(std::size_t(count) * n, 0.0);
    t.rows_prev.assign(std::size_t(count) * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        t.rows[i] = p0[i];
        t.rows_prev[i] = pm1[i];
        if (count > 1) {
            t.rows[n + i] = p1[i];
            t.rows_prev[n + i] = p0[i];
        }
    }
    // upward degree recurrence for order -mu:
    // (nu + mu + 1) P_{nu+1} = (2nu+1) x P_nu - (nu - mu) P_{nu-1}
    for (int j = 1; j + 1 < count; ++j) {
        const double nu = mu + j;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = ((2.0 * nu + 1.0) * t.x[i] * t.rows[j * n + i] -
                                 (nu - mu) * t.rows[(j - 1) * n + i]) /
                                (nu + mu + 1.0);
            t.rows[(j + 1) * n + i] = next;
            t.rows_prev[(j + 1) * n + i] = t.rows[j * n + i];
        }
    }
    return t;
}

} // namespace

} // namespace csphere::angular
