#include <filesystem>
#include <iostream>
#include <string>
#include <typeinfo>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csphere/energy.hpp"
#include "csphere/galerkin.hpp"
#include "csphere/io.hpp"
#include "csphere/radial.hpp"
#include "csphere/spectral.hpp"
#include "csphere/weightfit.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace csphere;

namespace {

constexpr const char* kVersion = "csphere 1.0.0";
constexpr double kPi = 3.14159265358979323846;

struct Common {
    std::string output_dir = ".";
    long seed = 0;
};

void write_manifest(const Common& c, const std::string& command, const json& params)
{
    json m;
    m["version"] = kVersion;
    m["command"] = command;
    m["seed"] = c.seed;
    m["parameters"] = params;
    io::write_text((fs::path(c.output_dir) / "manifest.json").string(),
                   m.dump(2) + "\n");
}

void write_error(const Common& c, const std::string& type, const std::string& msg,
                 int code)
{
    json e;
    e["error_type"] = type;
    e["message"] = msg;
    e["exit_code"] = code;
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    io::write_text((fs::path(c.output_dir) / "error.json").string(), e.dump(2) + "\n");
    std::cerr << type << ": " << msg << "\n";
}

int classify_error(const Error& e)
{
    if (dynamic_cast<const NonConvergence*>(&e) ||
        dynamic_cast<const NonConvergent*>(&e) ||
        dynamic_cast<const NotContractive*>(&e) ||
        dynamic_cast<const MaxIterExceeded*>(&e) ||
        dynamic_cast<const NoDescentStep*>(&e))
        return 3;
    if (dynamic_cast<const SingularIntegrand*>(&e) ||
        dynamic_cast<const QuadratureStall*>(&e) ||
        dynamic_cast<const ModelMismatch*>(&e))
        return 4;
    if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const PoleError*>(&e) ||
        dynamic_cast<const NearPole*>(&e) || dynamic_cast<const OutsideDomain*>(&e) ||
        dynamic_cast<const ConstraintViolation*>(&e) ||
        dynamic_cast<const IntegerDifferencePole*>(&e))
        return 5;
    return 6;
}

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(std::stoi(tok));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw DomainError("empty integer list");
    return out;
}

int cmd_basis(const Common& c, double ell, double m, const std::string& variant,
              int n_theta, int n_phi, bool pole_check)
{
    angular::ModeIndex idx{ell, m};
    if (!idx.valid()) {
        std::cerr << "invalid mode: requires l > |m| - 1\n";
        return 2;
    }
    write_manifest(c, "basis",
                   {{"ell", ell},
                    {"m", m},
                    {"variant", variant},
                    {"n_theta", n_theta},
                    {"n_phi", n_phi},
                    {"pole_check", pole_check}});

    const auto pv = variant == "sin-weighted" ? angular::PsiVariant::sin_weighted
                                              : angular::PsiVariant::plain;
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < n_theta; ++i) {
        const double th = kPi * (i + 0.5) / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            const double ph = 2.0 * kPi * j / n_phi;
            const auto e = angular::eval_psi(idx, th, ph, pv);
            rows.push_back({io::fmt17(th), io::fmt17(ph), io::fmt17(e.value.real()),
                            io::fmt17(e.value.imag()), io::fmt17(e.dtheta.real()),
                            io::fmt17(e.dtheta.imag())});
        }
    }
    io::write_csv((fs::path(c.output_dir) / "basis_samples.csv").string(),
                  {"theta", "phi", "psi_re", "psi_im", "dpsi_dtheta_re",
                   "dpsi_dtheta_im"},
                  rows);
    if (pole_check) {
        const double slope =
            angular::pole_scaling_exponent(idx, angular::PoleSide::north);
        json rep = {{"north_slope", slope}, {"expected", std::abs(m)}};
        io::write_text((fs::path(c.output_dir) / "pole_check.json").string(),
                       rep.dump(2) + "\n");
        std::cout << "pole slope " << io::fmt17(slope) << " (expected "
                  << io::fmt17(std::abs(m)) << ")\n";
    }
    return 0;
}

int cmd_eigen(const Common& c, double ell, double m, const std::string& n_list,
              const std::string& table_check)
{
    const auto Ns = parse_int_list(n_list);
    write_manifest(c, "eigen",
                   {{"ell", ell}, {"m", m}, {"N", n_list}, {"table_check", table_check}});

    angular::ModeIndex mode{ell, m};
    const double lambda = galerkin::study_eigenvalue(mode, Ns.back(), Ns.back());
    const auto alpha = galerkin::alpha_from_lambda({lambda, 0.0});
    json out = {{"lambda", {lambda, 0.0}},
                {"alpha", {alpha.real(), alpha.imag()}},
                {"basis_dimension", Ns.back()}};
    io::write_text((fs::path(c.output_dir) / "eigen.json").string(), out.dump(2) + "\n");
    std::cout << "lambda = " << io::fmt17(lambda) << "\n";

    if (Ns.size() >= 2 || table_check == "galerkin") {
        const auto rep = galerkin::convergence_study(mode, Ns);
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : rep.rows)
            rows.push_back(
                {std::to_string(r.n), io::fmt17(r.delta), io::fmt17(r.ratio)});
        io::write_csv((fs::path(c.output_dir) / "convergence.csv").string(),
                      {"N", "delta", "ratio"}, rows);
        if (table_check == "galerkin") {
            bool pass = true;
            for (const auto& r : rep.rows)
                if (r.ratio > 0.0)
                    pass = pass && r.ratio > 1.25 && r.ratio < 1.60;
            for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
                pass = pass && rep.rows[i].delta > rep.rows[i + 1].delta;
            std::cout << "table-check galerkin: " << (pass ? "PASS" : "FAIL") << "\n";
            if (!pass)
                return 3;
        }
    }
    return 0;
}

spectral::SynthesisConfig table_synthesis_config(int n, double c_cluster, bool reg)
{
    spectral::SynthesisConfig cfg;
    cfg.quad_ell = {n, c_cluster, 0.05, 1.5};
    cfg.quad_m = {n, c_cluster, 0.0, 1.0};
    if (reg)
        cfg.regularization = spectral::RegularizationParams{0.05, 0.0};
    return cfg;
}

int cmd_field(const Common& c, const std::string& weight_name, int n_nodes, int grid_n,
              double rc)
{
    write_manifest(c, "field",
                   {{"weight", weight_name}, {"N", n_nodes}, {"grid", grid_n},
                    {"rc", rc}});
    if (weight_name != "appendixB") {
        std::cerr << "unknown weight preset: " << weight_name << "\n";
        return 2;
    }
    const auto w = spectral::SpectralWeight::rational(1.0, 0.5, 0.3, 3.0);
    auto cfg = table_synthesis_config(n_nodes, 1.0, rc > 0.0);
    if (rc > 0.0)
        cfg.regularization = spectral::RegularizationParams{rc, 0.0};
    auto grid = spectral::FieldGrid::uniform(grid_n, grid_n, grid_n, 0.1, 1.0);
    const auto f = spectral::synthesize(w, cfg, grid);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t ir = 0; ir < f.r.size(); ++ir)
        for (std::size_t it = 0; it < f.theta.size(); ++it)
            rows.push_back({io::fmt17(f.r[ir]), io::fmt17(f.theta[it]),
                            io::fmt17(f.at(ir, it, 0).real()),
                            io::fmt17(f.at(ir, it, 0).imag())});
    io::write_csv((fs::path(c.output_dir) / "field_slice.csv").string(),
                  {"r", "theta", "re", "im"}, rows);
    json summary = {{"grid_l2", spectral::grid_l2(f)}};
    io::write_text((fs::path(c.output_dir) / "field.json").string(),
                   summary.dump(2) + "\n");
    return 0;
}

int cmd_convergence(const Common& c, const std::string& weight_name,
                    const std::string& n_list, const std::string& table_check,
                    int grid_n, int reference_n)
{
    const auto Ns = parse_int_list(n_list);
    write_manifest(c, "convergence",
                   {{"weight", weight_name},
                    {"N", n_list},
                    {"table_check", table_check},
                    {"grid", grid_n},
                    {"reference_n", reference_n},
                    {"quadrature", "tanh-mapped composite midpoint, c = 1"},
                    {"window_ell", "[0.05, 1.5]"},
                    {"window_m", "[0, 1]"}});
    if (weight_name != "appendixB") {
        std::cerr << "unknown weight preset: " << weight_name << "\n";
        return 2;
    }
    const auto w = spectral::SpectralWeight::rational(1.0, 0.5, 0.3, 3.0);
    const bool reg = table_check == "regularized";
    const auto cfg = table_synthesis_config(Ns.front(), 1.0, reg);
    auto grid = spectral::FieldGrid::uniform(grid_n, grid_n, grid_n, 0.1, 1.0);
    const auto rep = spectral::truncation_error(w, cfg, Ns, grid, reference_n);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        rows.push_back({std::to_string(r.n), io::fmt17(r.error), io::fmt17(r.ratio)});
    io::write_csv((fs::path(c.output_dir) / "convergence.csv").string(),
                  {"N", "error", "ratio"}, rows);

    if (!table_check.empty()) {
        const double lo = reg ? 4.4 : 3.5;
        const double hi = reg ? 5.2 : 4.5;
        bool any = false, all = true;
        for (const auto& r : rep.rows)
            if (r.ratio > 0.0) {
                any = true;
                all = all && r.ratio >= lo && r.ratio <= hi;
            }
        const bool pass = any && all;
        std::cout << "table-check " << table_check << ": " << (pass ? "PASS" : "FAIL")
                  << "\n";
        if (!pass)
            return 3;
    }
    return 0;
}

int cmd_energy(const Common& c, double ell, double m, const std::string& law)
{
    write_manifest(c, "energy", {{"ell", ell}, {"m", m}, {"law", law}});
    if (law != "ell-minus-1") {
        std::cerr << "unknown radial law: " << law << "\n";
        return 2;
    }
    const std::vector<energy::DensityTerm> terms = {{0, 1.0, 2.0 * ell, 1.0}};
    const auto rep = energy::energy_integral(terms, 1e-3, 1.0, 2.0 * kPi);
    json out = {{"ell", ell},
                {"verdict", rep.verdict == energy::Verdict::convergent ? "convergent"
                                                                       : "divergent"},
                {"fitted_epsilon_exponent", rep.fitted_epsilon_exponent},
                {"admissible", energy::admissible(ell)}};
    io::write_text((fs::path(c.output_dir) / "energy.json").string(),
                   out.dump(2) + "\n");
    std::vector<std::vector<std::string>> rows;
    for (const auto& [eps, wv] : rep.cutoff_sequence)
        rows.push_back({io::fmt17(eps), io::fmt17(wv)});
    io::write_csv((fs::path(c.output_dir) / "cutoff_sequence.csv").string(),
                  {"eps", "W"}, rows);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_cavity(const Common& c, double phi0, int n, double a)
{
    write_manifest(c, "cavity", {{"phi0", phi0}, {"n", n}, {"a", a}});
    const auto rep = energy::cavity_analyze({phi0, a, n});
    json out = {{"ell", rep.ell},
                {"m", rep.m},
                {"k1a", rep.k1a},
                {"energy_verdict",
                 rep.energy_verdict == energy::Verdict::convergent ? "convergent"
                                                                    : "divergent"},
                {"radial_exponent", rep.radial_exponent},
                {"angular_convergent", rep.angular_convergent},
                {"etheta_slope", rep.etheta_slope}};
    io::write_text((fs::path(c.output_dir) / "cavity.json").string(),
                   out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_fit(const Common& c, double A, double p, double q, double beta)
{
    write_manifest(c, "fit",
                   {{"truth_A", A}, {"truth_p", p}, {"truth_q", q},
                    {"truth_beta", beta}});
    weightfit::FitConfig cfg;
    cfg.n_theta = 32;
    cfg.n_phi = 64;
    cfg.quad_ell = {8, 1.0, 0.1, 1.5};
    cfg.quad_m = {8, 1.0, 0.05, 1.0};
    const weightfit::WeightParams truth{A, p, q, beta};
    const auto data = weightfit::synth_boundary(truth, cfg);
    const auto res = weightfit::optimize(data, {1.0, 2.0, 1.0, 0.5}, cfg);

    std::vector<std::vector<std::string>> rows;
    for (const auto& t : res.trace)
        rows.push_back({std::to_string(t.iter), io::fmt17(t.params.A),
                        io::fmt17(t.params.p), io::fmt17(t.params.q),
                        io::fmt17(t.params.beta), io::fmt17(t.objective),
                        io::fmt17(t.grad_norm), io::fmt17(t.step)});
    io::write_csv((fs::path(c.output_dir) / "fit_trace.csv").string(),
                  {"iter", "A", "p", "q", "beta", "objective", "grad_norm", "step"},
                  rows);
    json out = {{"A", res.params.A},
                {"p", res.params.p},
                {"q", res.params.q},
                {"beta", res.params.beta},
                {"boundary_error", res.final_boundary_error},
                {"capped", res.capped},
                {"gradient_check_ok", res.gradient_check_ok}};
    io::write_text((fs::path(c.output_dir) / "fit.json").string(), out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_solve_mode(const Common& c, double ell, double m, double k, double r_inner,
                   double r_outer, double b_theta, double b_phi_im, double c_im)
{
    write_manifest(c, "solve-mode",
                   {{"ell", ell},
                    {"m", m},
                    {"k", k},
                    {"r_inner", r_inner},
                    {"r_outer", r_outer},
                    {"b_theta", b_theta},
                    {"b_phi_im", b_phi_im},
                    {"c_im", c_im}});
    angular::ModeIndex mode{ell, m};
    if (!mode.valid()) {
        std::cerr << "invalid mode: requires l > |m| - 1\n";
        return 2;
    }
    radial::SolverConfig cfg;
    cfg.k = k;
    cfg.r_inner = r_inner;
    cfg.r_outer = r_outer;
    radial::HomogeneousCoeffs coeffs;
    coupling::ProjectionSet proj;
    proj.b_theta = {b_theta, 0.0};
    proj.b_phi = {0.0, b_phi_im};
    proj.c_thetaphi = {0.0, c_im};

    const auto sol = radial::coupled_solve(mode, coeffs, cfg, proj);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sol.grid.size(); ++i)
        rows.push_back({io::fmt17(sol.grid[i]), io::fmt17(sol.e_r[i].real()),
                        io::fmt17(sol.e_r[i].imag()),
                        io::fmt17(sol.e_theta[i].real()),
                        io::fmt17(sol.e_theta[i].imag()),
                        io::fmt17(sol.e_phi[i].real()),
                        io::fmt17(sol.e_phi[i].imag())});
    io::write_csv((fs::path(c.output_dir) / "radial_solution.csv").string(),
                  {"r", "er_re", "er_im", "etheta_re", "etheta_im", "ephi_re",
                   "ephi_im"},
                  rows);
    json side = {{"ell", ell},
                 {"m", m},
                 {"k", k},
                 {"r_inner", r_inner},
                 {"r_outer", r_outer},
                 {"iterations", sol.iterations},
                 {"contraction_estimate", sol.contraction_estimate}};
    io::write_text((fs::path(c.output_dir) / "radial_solution.json").string(),
                   side.dump(2) + "\n");
    std::cout << "iterations " << sol.iterations << ", contraction "
              << io::fmt17(sol.contraction_estimate) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Continuous-angular-index spherical field toolkit"};
    app.set_config("--config", "", "key = value configuration file");
    Common common;
    app.add_option("--output-dir", common.output_dir, "output directory");
    app.add_option("--seed", common.seed, "seed for randomized multi-starts");
    app.require_subcommand(1);

    double b_ell = 1.0, b_m = 0.0;
    std::string b_variant = "plain";
    int b_ntheta = 32, b_nphi = 16;
    bool b_pole = false;
    auto* basis = app.add_subcommand("basis", "sample the angular basis");
    basis->add_option("--ell", b_ell)->required();
    basis->add_option("--m", b_m)->required();
    basis->add_option("--variant", b_variant)
        ->check(CLI::IsMember({"plain", "sin-weighted"}));
    basis->add_option("--n-theta", b_ntheta);
    basis->add_option("--n-phi", b_nphi);
    basis->add_flag("--pole-check", b_pole);

    double e_ell = 2.0, e_m = 0.0;
    std::string e_N = "64", e_check;
    auto* eigen = app.add_subcommand("eigen", "angular eigenvalue and convergence");
    eigen->add_option("--ell", e_ell)->required();
    eigen->add_option("--m", e_m)->required();
    eigen->add_option("--N", e_N);
    eigen->add_option("--table-check", e_check)->check(CLI::IsMember({"galerkin"}));

    std::string f_weight = "appendixB";
    int f_n = 16, f_grid = 32;
    double f_rc = 0.0;
    auto* field = app.add_subcommand("field", "synthesize a spectral-integral field");
    field->add_option("--weight", f_weight);
    field->add_option("--N", f_n);
    field->add_option("--grid", f_grid);
    field->add_option("--rc", f_rc);

    std::string c_weight = "appendixB", c_N = "8,16,32,64,128", c_check;
    int c_grid = 64, c_ref = 512;
    auto* conv = app.add_subcommand("convergence", "truncation-convergence table");
    conv->add_option("--weight", c_weight);
    conv->add_option("--N", c_N);
    conv->add_option("--table-check", c_check)
        ->check(CLI::IsMember({"eisenstein", "regularized"}));
    conv->add_option("--grid", c_grid);
    conv->add_option("--reference-n", c_ref);

    double en_ell = 0.3, en_m = 0.0;
    std::string en_law = "ell-minus-1";
    auto* en = app.add_subcommand("energy", "cutoff-sequence energy verdict");
    en->add_option("--ell", en_ell)->required();
    en->add_option("--m", en_m);
    en->add_option("--law", en_law);

    double cv_phi0 = kPi, cv_a = 1.0;
    int cv_n = 1;
    auto* cav = app.add_subcommand("cavity", "conical-cavity mode analysis");
    cav->add_option("--phi0", cv_phi0)->required();
    cav->add_option("--n", cv_n);
    cav->add_option("--a", cv_a);

    double ft_A = 0.8, ft_p = 1.8, ft_q = 0.9, ft_beta = 0.4;
    auto* fit = app.add_subcommand("fit", "spectral-weight fit on synthetic data");
    fit->add_option("--A", ft_A);
    fit->add_option("--p", ft_p);
    fit->add_option("--q", ft_q);
    fit->add_option("--beta", ft_beta);

    double s_ell = 1.5, s_m = 0.5, s_k = 1.0, s_rin = 0.05, s_rout = 6.0;
    double s_btheta = 0.5, s_bphi = 0.8, s_c = 0.04;
    auto* solve = app.add_subcommand("solve-mode", "coupled radial fixed point");
    solve->add_option("--ell", s_ell)->required();
    solve->add_option("--m", s_m)->required();
    solve->add_option("--k", s_k);
    solve->add_option("--r-inner", s_rin);
    solve->add_option("--r-outer", s_rout);
    solve->add_option("--b-theta", s_btheta);
    solve->add_option("--b-phi-im", s_bphi);
    solve->add_option("--c-im", s_c);

    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::error_code ec;
    fs::create_directories(common.output_dir, ec);

    try {
        if (basis->parsed())
            return cmd_basis(common, b_ell, b_m, b_variant, b_ntheta, b_nphi, b_pole);
        if (eigen->parsed())
            return cmd_eigen(common, e_ell, e_m, e_N, e_check);
        if (field->parsed())
            return cmd_field(common, f_weight, f_n, f_grid, f_rc);
        if (conv->parsed())
            return cmd_convergence(common, c_weight, c_N, c_check, c_grid, c_ref);
        if (en->parsed())
            return cmd_energy(common, en_ell, en_m, en_law);
        if (cav->parsed())
            return cmd_cavity(common, cv_phi0, cv_n, cv_a);
        if (fit->parsed())
            return cmd_fit(common, ft_A, ft_p, ft_q, ft_beta);
        if (solve->parsed())
            return cmd_solve_mode(common, s_ell, s_m, s_k, s_rin, s_rout, s_btheta,
                                  s_bphi, s_c);
    } catch (const Error& e) {
        const int code = classify_error(e);
        write_error(common, typeid(e).name(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(common, "std::exception", e.what(), 6);
        return 6;
    }
    return 2;
}
