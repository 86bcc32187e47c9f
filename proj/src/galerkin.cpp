#include "csphere/galerkin.hpp"

#include <algorithm>
#include <cmath>

namespace csphere::galerkin {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string family_tag(BasisFamily f)
{
    switch (f) {
    case BasisFamily::scalar:
        return "s";
    case BasisFamily::even_vector:
        return "e";
    case BasisFamily::odd_vector:
        return "o";
    }
    return "?";
}

} // namespace

BasisSet build_basis(std::span<const double> ell_grid, std::span<const double> m_grid,
                     const std::set<BasisFamily>& families)
{
    BasisSet out;
    for (BasisFamily f : families) {
        for (double ell : ell_grid) {
            for (double m : m_grid) {
                ModeIndex idx{ell, m};
                const std::string name = family_tag(f) + "(" + std::to_string(ell) +
                                         "," + std::to_string(m) + ")";
                if (!idx.valid()) {
                    out.rejected.push_back(name + ": requires l > |m| - 1");
                    continue;
                }
                out.labels.push_back({f, idx, name});
            }
        }
    }
    return out;
}

angular::VshSample eval_basis(const BasisLabel& label, double theta, double phi)
{
    switch (label.family) {
    case BasisFamily::scalar: {
        angular::VshSample s;
        s.family = angular::VshFamily::radial;
        s.r = angular::eval_psi(label.idx, theta, phi).value;
        return s;
    }
    case BasisFamily::even_vector:
        return angular::eval_vsh(angular::VshFamily::even, label.idx, theta, phi,
                                 false);
    case BasisFamily::odd_vector:
        return angular::eval_vsh(angular::VshFamily::odd, label.idx, theta, phi,
                                 false);
    }
    throw DomainError("eval_basis: unknown family");
}

BlockSystem assemble(const AngularOperatorSpec& spec,
                     const std::vector<BasisLabel>& basis, const QuadratureRule& rule)
{
    const int n = static_cast<int>(basis.size());
    BlockSystem out;
    out.labels = basis;

    std::vector<coupling::LabeledHandle> handles;
    handles.reserve(n);
    for (const auto& b : basis)
        handles.push_back({b.name, [idx = b.idx](double th, double ph) {
                               return angular::eval_psi(idx, th, ph).value;
                           }});
    const auto g = coupling::gram(handles, rule);
    if (g.smallest_eigenvalue < -1e-10)
        throw IndefiniteMass("assemble: Gram matrix indefinite beyond tolerance");
    out.m_r = out.m_theta = out.m_phi = g.entries;

    // analytic Laplace-Beltrami action: [L]_ij = s_j(s_j+1) G_ij
    Eigen::MatrixXcd act = g.entries;
    for (int j = 0; j < n; ++j)
        act.col(j) *= basis[j].idx.ell * (basis[j].idx.ell + 1.0);
    out.l_r = out.l_theta = out.l_phi = act;

    if (spec.potential) {
        const auto add_potential = [&](Eigen::MatrixXcd& block, int a, int b) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const auto fi = handles[i].fn;
                    const auto fj = handles[j].fn;
                    block(i, j) += coupling::sphere_inner_product(
                        fi,
                        [&](double th, double ph) {
                            return spec.potential(a, b, th, ph) * fj(th, ph);
                        },
                        rule);
                }
        };
        add_potential(out.l_r, 0, 0);
        add_potential(out.l_theta, 1, 1);
        add_potential(out.l_phi, 2, 2);
    }

    // coupling blocks: ladder matrix elements for theta-phi, projection-type
    // diagonals for the radial couplings; singular entries are surfaced
    out.c_thetaphi.setZero(n, n);
    out.c_phitheta.setZero(n, n);
    out.c_rtheta.setZero(n, n);
    out.c_rphi.setZero(n, n);
    out.c_thetar.setZero(n, n);
    out.c_phir.setZero(n, n);
    if (!spec.include_coupling_blocks) {
        out.coupling_block_norm = 0.0;
        return out;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.c_thetaphi(i, j) =
                coupling::coupling_thetaphi(basis[i].idx, basis[j].idx, rule);
    out.c_phitheta = out.c_thetaphi.adjoint();
    for (int j = 0; j < n; ++j) {
        try {
            out.c_rtheta(j, j) = coupling::coupling_rtheta(basis[j].idx, rule);
        } catch (const SingularIntegrand&) {
            out.singular_skipped.push_back(basis[j].name + ":C_rtheta");
        }
        try {
            const auto proj = coupling::projections(basis[j].idx, rule);
            out.c_rphi(j, j) = proj.a_phi;
            out.c_thetar(j, j) = proj.b_theta;
            out.c_phir(j, j) = proj.b_phi;
        } catch (const SingularIntegrand& e) {
            out.singular_skipped.push_back(basis[j].name + ": " + e.what());
        }
    }

    double block_norm = 0.0;
    for (const auto* b : {&out.c_rtheta, &out.c_rphi, &out.c_thetar, &out.c_thetaphi,
                          &out.c_phir, &out.c_phitheta})
        block_norm = std::max(block_norm, b->operatorNorm());
    out.coupling_block_norm = block_norm;
    return out;
}

std::vector<EigenResult> solve_gevp(const BlockSystem& system, int n_eigs,
                                    double target)
{
    const int n = static_cast<int>(system.labels.size());
    const int dim = 3 * n;
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    L.block(0, 0, n, n) = system.l_r;
    L.block(n, n, n, n) = system.l_theta;
    L.block(2 * n, 2 * n, n, n) = system.l_phi;
    L.block(0, n, n, n) = system.c_rtheta;
    L.block(0, 2 * n, n, n) = system.c_rphi;
    L.block(n, 0, n, n) = system.c_thetar;
    L.block(n, 2 * n, n, n) = system.c_thetaphi;
    L.block(2 * n, 0, n, n) = system.c_phir;
    L.block(2 * n, n, n, n) = system.c_phitheta;
    M.block(0, 0, n, n) = system.m_r;
    M.block(n, n, n, n) = system.m_theta;
    M.block(2 * n, 2 * n, n, n) = system.m_phi;

    // factorize the mass, ridging once if needed
    Eigen::LLT<Eigen::MatrixXcd> llt(M);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-12 * M.real().trace() / dim;
        M += ridge * Eigen::MatrixXcd::Identity(dim, dim);
        llt.compute(M);
        if (llt.info() != Eigen::Success)
            throw IndefiniteMass("solve_gevp: mass factorization failed after ridge");
    }
    const Eigen::MatrixXcd A = llt.solve(L);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    if (es.info() != Eigen::Success)
        throw NonConvergence("solve_gevp: dense eigensolver failed");

    std::vector<int> order(dim);
    for (int i = 0; i < dim; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a) - target) <
               std::abs(es.eigenvalues()(b) - target);
    });

    std::vector<EigenResult> out;
    std::vector<std::string> names;
    for (const auto& b : system.labels)
        names.push_back(b.name);
    for (int q = 0; q < std::min(n_eigs, dim); ++q) {
        const int i = order[q];
        EigenResult res;
        res.lambda = es.eigenvalues()(i);
        res.alpha = alpha_from_lambda(res.lambda);
        res.coefficients = es.eigenvectors().col(i);
        res.basis_labels = names;
        const Eigen::VectorXcd lv = L * res.coefficients;
        const Eigen::VectorXcd mv = M * res.coefficients;
        res.residual = (lv - res.lambda * mv).norm() / mv.norm();
        if (res.residual > 1e-8)
            throw NonConvergence("solve_gevp: eigenpair residual above 1e-8");
        out.push_back(std::move(res));
    }
    return out;
}

Complex alpha_from_lambda(Complex lambda)
{
    return 0.5 * (std::sqrt(Complex(1.0, 0.0) + 4.0 * lambda) - 1.0);
}

double study_eigenvalue(const ModeIndex& mode, int basis_dim, int rule_panels)
{
    mode.require_valid();
    const double mu = std::abs(mode.m);
    std::vector<double> theta, w;
    quadrature::pole_graded_theta(rule_panels, 2, 2.5, theta, w);
    const std::size_t nq = theta.size();
    std::vector<double> st(nq);
    for (std::size_t i = 0; i < nq; ++i)
        st[i] = std::sin(theta[i]);
    const auto table = angular::kernel_degree_table_polar(mu, basis_dim, theta);
    const auto& x = table.x; // pole-accurate abscissae

    Eigen::MatrixXd K(basis_dim, basis_dim), M(basis_dim, basis_dim);
    std::vector<double> bi(nq), dbi(nq), bj(nq), dbj(nq);
    for (int i = 0; i < basis_dim; ++i) {
        for (std::size_t q = 0; q < nq; ++q) {
            bi[q] = table.value(i, q);
            dbi[q] = table.dtheta(i, q, x[q], st[q]);
        }
        for (int j = i; j < basis_dim; ++j) {
            double kk = 0.0, mm = 0.0;
            for (std::size_t q = 0; q < nq; ++q) {
                const double vj = table.value(j, q);
                const double dj = table.dtheta(j, q, x[q], st[q]);
                kk += w[q] * (dbi[q] * dj + mu * mu * bi[q] * vj / (st[q] * st[q])) *
                      st[q];
                mm += w[q] * bi[q] * vj * st[q];
            }
            K(i, j) = K(j, i) = kk;
            M(i, j) = M(j, i) = mm;
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success)
        throw NonConvergence("study_eigenvalue: generalized eigensolve failed");
    const double target = mode.ell * (mode.ell + 1.0);
    double best = es.eigenvalues()(0);
    for (int i = 1; i < basis_dim; ++i)
        if (std::abs(es.eigenvalues()(i) - target) < std::abs(best - target))
            best = es.eigenvalues()(i);
    return best;
}

ConvergenceReport convergence_study(const ModeIndex& mode, const std::vector<int>& Ns)
{
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] <= Ns[i - 1])
            throw DomainError("convergence_study: Ns must be increasing");

    ConvergenceReport rep;
    rep.Ns = Ns;
    std::vector<double> lam2n;
    for (int N : Ns) {
        rep.lambdas.push_back(study_eigenvalue(mode, N, N));
        lam2n.push_back(study_eigenvalue(mode, 2 * N, 2 * N));
    }
    std::vector<double> deltas;
    for (std::size_t i = 0; i < Ns.size(); ++i)
        deltas.push_back(std::abs(rep.lambdas[i] - lam2n[i]));
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        ConvergenceRow row;
        row.n = Ns[i];
        row.delta = deltas[i];
        row.ratio = (i + 1 < Ns.size() && deltas[i + 1] > 0.0)
                        ? deltas[i] / deltas[i + 1]
                        : 0.0;
        rep.rows.push_back(row);
    }
    double mean_ratio = 0.0;
    int cnt = 0;
    for (const auto& r : rep.rows)
        if (r.ratio > 0.0) {
            mean_ratio += r.ratio;
            ++cnt;
        }
    mean_ratio = cnt ? mean_ratio / cnt : 0.0;
    rep.regime = (mean_ratio >= 2.5) ? "quadratic" : "slow";
    return rep;
}

double radial_transform(double alpha_min, double r, TransformDirection direction)
{
    if (!(alpha_min < 1.0))
        throw DomainError("radial_transform: requires alpha_min < 1");
    if (r < 0.0)
        throw DomainError("radial_transform: requires r >= 0");
    const double p = 1.0 / (1.0 - alpha_min);
    return (direction == TransformDirection::to_xi) ? std::pow(r, p)
                                                    : std::pow(r, 1.0 / p);
}

coupling::AngularHandle theta_regularize(const coupling::AngularHandle& handle,
                                         double epsilon)
{
    if (epsilon == 0.0)
        return handle;
    if (!(epsilon > 0.0))
        throw DomainError("theta_regularize: epsilon must be >= 0");
    return [handle, epsilon](double theta, double phi) {
        return handle(std::sqrt(theta * theta + epsilon * epsilon), phi);
    };
}

} // namespace csphere::galerkin
