#include "doctest.h"

#include <cmath>

#include "csphere/spectral.hpp"
#include "csphere/specfun.hpp"

using namespace csphere;
using angular::Complex;
using spectral::FieldGrid;
using spectral::MappedQuadConfig;
using spectral::SpectralWeight;
using spectral::SynthesisConfig;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("mapped_nodes: affine limit, containment, clustering, weight sum")
{
    MappedQuadConfig cfg;
    cfg.n_nodes = 24;
    cfg.lo = 0.1;
    cfg.hi = 1.5;

    // c -> 0 limit approaches the affine Gauss-Legendre rule
    cfg.c = 1e-6;
    std::vector<double> n1, w1, ng, wg;
    spectral::mapped_nodes(cfg, n1, w1);
    quadrature::gauss_legendre_ab(cfg.n_nodes, cfg.lo, cfg.hi, ng, wg);
    double max_dev = 0.0;
    for (int i = 0; i < cfg.n_nodes; ++i)
        max_dev = std::max(max_dev, std::abs(n1[i] - ng[i]));
    CHECK(max_dev < 1e-5);

    // all nodes inside [lo, hi]; weight sum reproduces the mapped length
    cfg.c = 2.0;
    spectral::mapped_nodes(cfg, n1, w1);
    double sum = 0.0;
    for (int i = 0; i < cfg.n_nodes; ++i) {
        CHECK(n1[i] >= cfg.lo);
        CHECK(n1[i] <= cfg.hi);
        sum += w1[i];
    }
    const double len = quadrature::tanh_map(1.0, cfg.lo, cfg.hi, cfg.c) -
                       quadrature::tanh_map(0.0, cfg.lo, cfg.hi, cfg.c);
    CHECK(sum == doctest::Approx(len).epsilon(1e-12));

    // node density near lo grows monotonically with c
    double gap_prev = 1e9;
    for (double c : {1.0, 2.0, 4.0}) {
        cfg.c = c;
        spectral::mapped_nodes(cfg, n1, w1);
        const double gap = n1[1] - n1[0];
        CHECK(gap < gap_prev);
        gap_prev = gap;
    }

    // pullback polynomial exactness: f(l(xi)) l'(xi) = xi^3 integrates to 1/4
    cfg.c = 1.5;
    spectral::mapped_nodes(cfg, n1, w1);
    std::vector<double> xg, wq;
    quadrature::gauss_legendre(cfg.n_nodes, xg, wq);
    double acc = 0.0;
    for (int i = 0; i < cfg.n_nodes; ++i) {
        const double xi = 0.5 * (xg[i] + 1.0);
        const double f = std::pow(xi, 3.0) /
                         quadrature::tanh_map_deriv(xi, cfg.lo, cfg.hi, cfg.c);
        acc += w1[i] * f;
    }
    CHECK(acc == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("regularized_core bounds and example points")
{
    spectral::RegularizationParams reg;
    reg.r_c = 0.05;
    CHECK(spectral::regularized_core(reg, 0.0) == 0.0);
    CHECK(spectral::regularized_core(reg, 0.05) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(spectral::regularized_core(reg, 0.5) ==
          doctest::Approx(100.0 / 101.0).epsilon(1e-15));
    for (double r : {0.01, 0.3, 2.0, 50.0}) {
        const double v = spectral::regularized_core(reg, r);
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("synthesize: point mass reproduces the bare mode")
{
    const double ell = 0.7, m = 0.3;
    auto w = SpectralWeight::point_masses({{ell, m, Complex(1.0, 0.0)}});
    SynthesisConfig cfg;
    auto grid = FieldGrid::uniform(6, 8, 4, 0.1, 1.0);
    const auto f = spectral::synthesize(w, cfg, grid);

    const double mu = std::abs(m);
    const double norm =
        std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) *
        std::exp(0.5 * (std::lgamma(ell + mu + 1.0) - std::lgamma(ell - mu + 1.0)));
    for (std::size_t ir : {std::size_t(0), std::size_t(4)})
        for (std::size_t it : {std::size_t(1), std::size_t(6)})
            for (std::size_t ip : {std::size_t(0), std::size_t(3)}) {
                const Complex want =
                    std::pow(f.r[ir], ell - 1.0) * norm *
                    specfun::legendre_p(ell, -mu, std::cos(f.theta[it])) *
                    std::polar(1.0, m * f.phi[ip]);
                CHECK(std::abs(f.at(ir, it, ip) - want) < 1e-13);
            }
}

TEST_CASE("synthesize: zero weight and linearity")
{
    SynthesisConfig cfg;
    auto grid = FieldGrid::uniform(4, 6, 4, 0.1, 1.0);

    const auto zero = spectral::synthesize(SpectralWeight::point_masses({}), cfg, grid);
    for (const auto& v : zero.values)
        CHECK(std::abs(v) == 0.0);

    auto w1 = SpectralWeight::point_masses({{0.6, 0.2, Complex(1.0, 0.5)}});
    auto w2 = SpectralWeight::point_masses({{1.1, 0.4, Complex(-0.3, 0.0)}});
    auto w12 = SpectralWeight::point_masses(
        {{0.6, 0.2, Complex(1.0, 0.5)}, {1.1, 0.4, Complex(-0.3, 0.0)}});
    const auto f1 = spectral::synthesize(w1, cfg, grid);
    const auto f2 = spectral::synthesize(w2, cfg, grid);
    const auto f12 = spectral::synthesize(w12, cfg, grid);
    for (std::size_t i = 0; i < f12.values.size(); ++i)
        CHECK(std::abs(f12.values[i] - f1.values[i] - f2.values[i]) < 1e-12);
}

TEST_CASE("truncation_error: reference row vanishes, ratios near 4")
{
    const auto w = SpectralWeight::rational(1.0, 0.5, 0.3, 3.0);
    SynthesisConfig cfg;
    cfg.quad_ell = {8, 1.0, 0.05, 1.5};
    cfg.quad_m = {8, 1.0, 0.0, 1.0};
    auto grid = FieldGrid::uniform(12, 12, 6, 0.1, 1.0);

    const auto rep =
        spectral::truncation_error(w, cfg, {8, 16, 32, 64, 128}, grid, 128);
    CHECK(rep.rows.back().error == 0.0); // N = N_ref

    const auto rep2 =
        spectral::truncation_error(w, cfg, {8, 16, 32}, grid, 512);
    for (const auto& row : rep2.rows)
        if (row.ratio > 0.0) {
            INFO("N=", row.n, " eps=", row.error, " ratio=", row.ratio);
            CHECK(row.ratio > 3.0);
            CHECK(row.ratio < 5.0);
        }
}

TEST_CASE("sobolev_norm basics")
{
    std::vector<spectral::SpectralCoefficient> coeffs = {
        {0.5, 0.2, 0.75, Complex(2.0, 0.0), 0.5}};
    const auto unit = [](double, double) { return 1.0; };
    CHECK(spectral::sobolev_norm(coeffs, 0.0, unit) ==
          doctest::Approx(0.5 * 4.0).epsilon(1e-14));
    // s = 1 dominates s = 0 for lambda >= 0
    coeffs.push_back({1.3, 0.1, 1.3 * 2.3, Complex(0.0, 0.7), 1.0});
    CHECK(spectral::sobolev_norm(coeffs, 1.0, unit) >=
          spectral::sobolev_norm(coeffs, 0.0, unit));
}

TEST_CASE("truncation_bound_check: smooth vs rough weight")
{
    SynthesisConfig cfg;
    cfg.quad_ell = {8, 1.0, 0.05, 1.5};
    cfg.quad_m = {8, 1.0, 0.0, 1.0};
    auto grid = FieldGrid::uniform(10, 10, 6, 0.1, 1.0);

    const auto smooth = SpectralWeight::rational(1.0, 0.5, 0.3, 3.0);
    const auto b3 =
        spectral::truncation_bound_check(smooth, cfg, 2.0, {8, 16, 32}, grid, 512);
    CHECK(b3.fitted_exponent == doctest::Approx(2.0).epsilon(0.25));
    CHECK(b3.pass);

    const auto rough = SpectralWeight::rational(1.0, 0.5, 0.3, 1.0);
    const auto b1 =
        spectral::truncation_bound_check(rough, cfg, 2.0, {8, 16, 32}, grid, 512);
    CHECK(b1.fitted_exponent <= b3.fitted_exponent + 0.1);
}

TEST_CASE("alpha table interpolation")
{
    spectral::AlphaTable t;
    t.ell_nodes = {0.2, 0.6, 1.0, 1.4};
    t.m_nodes = {0.1, 0.5, 0.9};
    t.alpha.resize(12);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            t.alpha[i * 3 + j] = t.ell_nodes[i] - 1.0; // alpha = l - 1 exactly
    CHECK(t.interpolate(0.77, 0.3) == doctest::Approx(-0.23).epsilon(1e-12));
    CHECK_THROWS_AS((void)t.interpolate(2.0, 0.3), AlphaTableMiss);

    // synthesize with the tabulated alpha agrees with the fixed law
    auto w = SpectralWeight::point_masses({{0.8, 0.3, Complex(1.0, 0.0)}});
    SynthesisConfig fixed_cfg;
    SynthesisConfig table_cfg;
    table_cfg.alpha_source = spectral::AlphaSource::eigen_table;
    table_cfg.alpha_table = t;
    auto grid = FieldGrid::uniform(4, 6, 4, 0.1, 1.0);
    const auto a = spectral::synthesize(w, fixed_cfg, grid);
    const auto b = spectral::synthesize(w, table_cfg, grid);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(std::abs(a.values[i] - b.values[i]) < 1e-12);
}

TEST_CASE("singularity_quadrature")
{
    // constant: integral of r^2 over (0,1] = 1/3 via both routes
    const auto one = [](double) { return 1.0; };
    CHECK(spectral::singularity_quadrature(one, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // r^{-0.4}: finite, matches a direct graded-quadrature oracle
    const auto f = [](double r) { return std::pow(r, -0.4); };
    std::vector<double> xs, ws;
    quadrature::graded_composite_gl(3000, 6, 0.0, 1.0, 3.0, xs, ws);
    double direct = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        direct += ws[i] * f(xs[i]) * f(xs[i]) * xs[i] * xs[i];
    CHECK(spectral::singularity_quadrature(f, -0.4, 1.0) ==
          doctest::Approx(direct).epsilon(1e-8));

    // marginally divergent integrand is detected under refinement
    const auto g = [](double r) { return std::pow(r, -1.51); };
    CHECK_THROWS_AS((void)spectral::singularity_quadrature(g, -1.51, 1.0),
                    DomainError);
}
