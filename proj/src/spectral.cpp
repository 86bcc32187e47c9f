#include "csphere/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "csphere/specfun.hpp"

namespace csphere::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SpectralWeight SpectralWeight::rational(double A0, double ell0, double m0, double p)
{
    SpectralWeight w;
    w.form = Form::rational_peak;
    w.A0 = A0;
    w.ell0 = ell0;
    w.m0 = m0;
    w.p = p;
    if (!(A0 > 0.0))
        throw DomainError("SpectralWeight: rational peak requires A0 > 0");
    return w;
}

SpectralWeight SpectralWeight::constrained(double A, double p, double q, double beta,
                                           double ell_min)
{
    if (!(p > 1.5 - ell_min))
        throw DomainError("SpectralWeight: requires p > 3/2 - l_min");
    if (!(A > 0.0 && q > 0.0 && beta > 0.0))
        throw DomainError("SpectralWeight: requires A, q, beta > 0");
    SpectralWeight w;
    w.form = Form::constrained_param;
    w.A = A;
    w.cp_p = p;
    w.q = q;
    w.beta = beta;
    return w;
}

SpectralWeight SpectralWeight::point_masses(std::vector<TableEntry> entries)
{
    SpectralWeight w;
    w.form = Form::tabulated;
    w.table = std::move(entries);
    return w;
}

Complex SpectralWeight::evaluate(double ell, double m) const
{
    switch (form) {
    case Form::rational_peak: {
        const double dl = ell - ell0, dm = m - m0;
        return Complex(A0 / (std::pow(1.0 + dl * dl, 0.5 * p) *
                             std::pow(1.0 + dm * dm, 0.5 * p)),
                       0.0);
    }
    case Form::constrained_param:
        return Complex(A * std::pow(ell, cp_p) * std::pow(m, q) *
                           std::exp(-beta * (ell * ell + m * m)),
                       0.0);
    case Form::tabulated:
        for (const auto& e : table)
            if (std::abs(e.ell - ell) < 1e-12 && std::abs(e.m - m) < 1e-12)
                return e.a;
        return Complex(0.0, 0.0);
    }
    return Complex(0.0, 0.0);
}

void MappedQuadConfig::require_valid() const
{
    if (!(n_nodes >= 1 && c > 0.0 && lo < hi))
        throw DomainError("MappedQuadConfig: invalid configuration");
}

void mapped_nodes(const MappedQuadConfig& cfg, std::vector<double>& nodes,
                  std::vector<double>& weights)
{
    cfg.require_valid();
    std::vector<double> xg, wg;
    quadrature::gauss_legendre(cfg.n_nodes, xg, wg);
    nodes.resize(cfg.n_nodes);
    weights.resize(cfg.n_nodes);
    for (int i = 0; i < cfg.n_nodes; ++i) {
        const double xi = 0.5 * (xg[i] + 1.0);
        nodes[i] = quadrature::tanh_map(xi, cfg.lo, cfg.hi, cfg.c);
        weights[i] = 0.5 * wg[i] * quadrature::tanh_map_deriv(xi, cfg.lo, cfg.hi, cfg.c);
    }
}

void mapped_midpoint_nodes(const MappedQuadConfig& cfg, std::vector<double>& nodes,
                           std::vector<double>& weights)
{
    cfg.require_valid();
    quadrature::mapped_midpoint(cfg.n_nodes, cfg.lo, cfg.hi, cfg.c, nodes, weights);
}

double regularized_core(const RegularizationParams& params, double r)
{
    if (!(params.r_c > 0.0))
        throw DomainError("regularized_core: requires r_c > 0");
    if (r < 0.0)
        throw DomainError("regularized_core: requires r >= 0");
    return r * r / (r * r + params.r_c * params.r_c);
}

FieldGrid FieldGrid::uniform(int nr, int ntheta, int nphi, double r_lo, double r_hi)
{
    FieldGrid g;
    g.r.resize(nr);
    g.theta.resize(ntheta);
    g.phi.resize(nphi);
    for (int i = 0; i < nr; ++i)
        g.r[i] = r_lo + (r_hi - r_lo) * (i + 0.5) / nr;
    for (int i = 0; i < ntheta; ++i)
        g.theta[i] = kPi * (i + 0.5) / ntheta;
    for (int i = 0; i < nphi; ++i)
        g.phi[i] = 2.0 * kPi * i / nphi;
    g.values.assign(std::size_t(nr) * ntheta * nphi, Complex(0.0, 0.0));
    return g;
}

double AlphaTable::interpolate(double ell, double m) const
{
    const auto inside = [](const std::vector<double>& v, double x) {
        return x >= v.front() - 1e-12 && x <= v.back() + 1e-12;
    };
    if (!inside(ell_nodes, ell) || !inside(m_nodes, m))
        throw AlphaTableMiss("AlphaTable: query outside the tabulated hull");

    // barycentric Lagrange weights per axis (small tables)
    const auto bary = [](const std::vector<double>& nodes, double x,
                         std::vector<double>& coef) {
        const std::size_t n = nodes.size();
        coef.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(x - nodes[i]) < 1e-14) {
                coef[i] = 1.0;
                return;
            }
        }
        std::vector<double> w(n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    w[i] /= (nodes[i] - nodes[j]);
        double denom = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            coef[i] = w[i] / (x - nodes[i]);
            denom += coef[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            coef[i] /= denom;
    };
    std::vector<double> cl, cm;
    bary(ell_nodes, ell, cl);
    bary(m_nodes, m, cm);
    double out = 0.0;
    for (std::size_t i = 0; i < ell_nodes.size(); ++i)
        for (std::size_t j = 0; j < m_nodes.size(); ++j)
            out += cl[i] * cm[j] * alpha[i * m_nodes.size() + j];
    return out;
}

namespace {

double alpha_of(const SynthesisConfig& cfg, double ell, double m)
{
    if (cfg.alpha_source == AlphaSource::fixed_ell_minus_1)
        return ell - 1.0;
    if (!cfg.alpha_table)
        throw DomainError("synthesize: eigen_table alpha source without a table");
    return cfg.alpha_table->interpolate(ell, m);
}

struct EllTerm {
    double ell;
    Complex coef;
};

// adds the whole same-m group at once: the l-sum collapses into an (r, theta)
// profile before the phi axis is touched
void accumulate_m_group(FieldGrid& f, const SynthesisConfig& cfg, double m,
                        const std::vector<EllTerm>& terms)
{
    const std::size_t nr = f.r.size(), nt = f.theta.size(), np = f.phi.size();
    const double mu = std::abs(m);

    std::vector<Complex> prof(nr * nt, Complex(0.0, 0.0));
    std::vector<double> radial(nr), angular_t(nt);
    for (const auto& term : terms) {
        const double ell = term.ell;
        const double alpha = alpha_of(cfg, ell, m);
        for (std::size_t i = 0; i < nr; ++i) {
            double v = std::pow(f.r[i], alpha);
            if (cfg.regularization)
                v *= regularized_core(*cfg.regularization, f.r[i]);
            radial[i] = v;
        }
        // N_{lm} scriptP = sqrt((2l+1)/4pi) sqrt(G(l+mu+1)/G(l-mu+1)) P^{-mu}_l
        const double norm =
            std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) *
            std::exp(0.5 * (std::lgamma(ell + mu + 1.0) - std::lgamma(ell - mu + 1.0)));
        for (std::size_t i = 0; i < nt; ++i)
            angular_t[i] = norm * specfun::legendre_p(ell, -mu, std::cos(f.theta[i]));
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const Complex c = term.coef * radial[ir];
            Complex* row = &prof[ir * nt];
            for (std::size_t it = 0; it < nt; ++it)
                row[it] += c * angular_t[it];
        }
    }

    std::vector<Complex> az(np);
    for (std::size_t i = 0; i < np; ++i)
        az[i] = std::polar(1.0, m * f.phi[i]);

    const auto work = [&](std::size_t r_lo, std::size_t r_hi) {
        for (std::size_t ir = r_lo; ir < r_hi; ++ir)
            for (std::size_t it = 0; it < nt; ++it) {
                const Complex amp = prof[ir * nt + it];
                Complex* row = &f.values[(ir * nt + it) * np];
                for (std::size_t ip = 0; ip < np; ++ip)
                    row[ip] += amp * az[ip];
            }
    };
    if (nr >= 8) {
        const std::size_t mid = nr / 2;
        std::thread th(work, 0, mid);
        work(mid, nr);
        th.join();
    } else {
        work(0, nr);
    }
}

} // namespace

FieldGrid synthesize(const SpectralWeight& weight, const SynthesisConfig& cfg,
                     const FieldGrid& grid_spec)
{
    FieldGrid f = grid_spec;
    std::fill(f.values.begin(), f.values.end(), Complex(0.0, 0.0));

    if (weight.form == SpectralWeight::Form::tabulated) {
        for (const auto& e : weight.table)
            accumulate_m_group(f, cfg, e.m, {{e.ell, e.a}});
        return f;
    }

    std::vector<double> ln, lw, mn, mw;
    mapped_midpoint_nodes(cfg.quad_ell, ln, lw);
    mapped_midpoint_nodes(cfg.quad_m, mn, mw);
    std::vector<EllTerm> terms(ln.size());
    for (std::size_t k = 0; k < mn.size(); ++k) {
        for (std::size_t j = 0; j < ln.size(); ++j) {
            const angular::ModeIndex idx{ln[j], mn[k]};
            if (!idx.valid())
                throw DomainError("synthesize: quadrature node violates l > |m| - 1");
            terms[j] = {ln[j], weight.evaluate(ln[j], mn[k]) * lw[j] * mw[k]};
        }
        accumulate_m_group(f, cfg, mn[k], terms);
    }
    return f;
}

double grid_l2(const FieldGrid& f)
{
    const std::size_t nr = f.r.size(), nt = f.theta.size(), np = f.phi.size();
    const double dr = nr > 1 ? f.r[1] - f.r[0] : 1.0;
    const double dt = nt > 1 ? f.theta[1] - f.theta[0] : kPi;
    const double dp = np > 0 ? 2.0 * kPi / np : 2.0 * kPi;
    double acc = 0.0;
    for (std::size_t ir = 0; ir < nr; ++ir) {
        const double wr = f.r[ir] * f.r[ir] * dr;
        for (std::size_t it = 0; it < nt; ++it) {
            const double wt = std::sin(f.theta[it]) * dt;
            double s = 0.0;
            const Complex* row = &f.values[(ir * nt + it) * np];
            for (std::size_t ip = 0; ip < np; ++ip)
                s += std::norm(row[ip]);
            acc += wr * wt * dp * s;
        }
    }
    return std::sqrt(acc);
}

double grid_l2_diff(const FieldGrid& a, const FieldGrid& b)
{
    FieldGrid d = a;
    for (std::size_t i = 0; i < d.values.size(); ++i)
        d.values[i] -= b.values[i];
    return grid_l2(d);
}

ConvergenceReport truncation_error(const SpectralWeight& weight,
                                   const SynthesisConfig& cfg,
                                   const std::vector<int>& Ns,
                                   const FieldGrid& grid_spec, int reference_n)
{
    SynthesisConfig ref_cfg = cfg;
    ref_cfg.quad_ell.n_nodes = reference_n;
    ref_cfg.quad_m.n_nodes = reference_n;
    const FieldGrid ref = synthesize(weight, ref_cfg, grid_spec);
    const double ref_norm = grid_l2(ref);

    std::vector<double> eps;
    for (int n : Ns) {
        SynthesisConfig c = cfg;
        c.quad_ell.n_nodes = n;
        c.quad_m.n_nodes = n;
        if (n == reference_n) {
            eps.push_back(0.0);
            continue;
        }
        const FieldGrid fn = synthesize(weight, c, grid_spec);
        eps.push_back(grid_l2_diff(fn, ref) / ref_norm);
    }

    ConvergenceReport rep;
    rep.reference_n = reference_n;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        ConvergenceRow row;
        row.n = Ns[i];
        row.error = eps[i];
        row.ratio = 0.0;
        for (std::size_t j = 0; j < Ns.size(); ++j)
            if (Ns[j] == 2 * Ns[i] && eps[j] > 0.0)
                row.ratio = eps[i] / eps[j];
        rep.rows.push_back(row);
    }
    return rep;
}

double sobolev_norm(const std::vector<SpectralCoefficient>& coeffs, double s,
                    const std::function<double(double, double)>& weight_fn)
{
    double acc = 0.0;
    for (const auto& c : coeffs) {
        const double w = weight_fn ? weight_fn(c.ell, c.m) : 1.0;
        acc += c.quad_weight * std::pow(1.0 + c.lambda, s) * std::norm(c.a) * w;
    }
    return acc;
}

BoundCheck truncation_bound_check(const SpectralWeight& weight,
                                  const SynthesisConfig& cfg, double s,
                                  const std::vector<int>& Ns,
                                  const FieldGrid& grid_spec, int reference_n)
{
    BoundCheck out;
    out.report = truncation_error(weight, cfg, Ns, grid_spec, reference_n);
    double acc = 0.0;
    int cnt = 0;
    for (const auto& row : out.report.rows)
        if (row.ratio > 0.0) {
            acc += std::log2(row.ratio);
            ++cnt;
        }
    if (cnt == 0)
        throw DomainError("truncation_bound_check: no doubled pairs in the N list");
    out.fitted_exponent = acc / cnt;
    out.required = (s - 0.5) - 0.2;
    out.pass = out.fitted_exponent >= out.required;
    return out;
}

double singularity_quadrature(const std::function<double(double)>& fn,
                              double alpha_min, double r_max)
{
    if (!(alpha_min < 1.0))
        throw DomainError("singularity_quadrature: requires alpha_min < 1");
    const double p = 1.0 - alpha_min;
    const double xi_max = std::pow(r_max, 1.0 / p);

    const auto value = [&](int n) {
        std::vector<double> xs, ws;
        quadrature::graded_composite_gl(n, 6, 0.0, xi_max, 2.0, xs, ws);
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double xi = xs[i];
            const double r = std::pow(xi, p);
            const double f = fn(r);
            acc += ws[i] * f * f * r * r * p * std::pow(xi, -alpha_min);
        }
        return acc;
    };
    const double v1 = value(64);
    const double v2 = value(128);
    const double v3 = value(256);
    const double d12 = std::abs(v2 - v1), d23 = std::abs(v3 - v2);
    if (d23 > 1e-8 * std::abs(v3) && d23 > 0.85 * d12)
        throw DomainError("singularity_quadrature: divergence detected under refinement");
    return v3;
}

} // namespace csphere::spectral
