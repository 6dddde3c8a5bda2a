#include "rdcont/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace rdcont {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<std::complex<double>> sort_by_real_desc(
    std::vector<std::complex<double>> eigs) {
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return eigs;
}

std::vector<std::complex<double>> dense_spectrum(const SparseMat& jacobian) {
    const Eigen::MatrixXd dense(jacobian);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, /*computeVectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dense eigensolver failed to converge");
    std::vector<std::complex<double>> eigs(solver.eigenvalues().data(),
                                           solver.eigenvalues().data() +
                                               solver.eigenvalues().size());
    return eigs;
}

// Shift-invert subspace iteration for the eigenvalues of largest real part.
// The shift sits above the Gershgorin bound on the real parts, so the
// eigenvalues nearest the shift are the rightmost ones.
std::vector<std::complex<double>> iterative_spectrum(const SparseMat& jacobian,
                                                     int k) {
    const int n = static_cast<int>(jacobian.rows());
    // Row-wise Gershgorin bound on the eigenvalue real parts. Row sums keep
    // the diffusion stencil's cancellation at the Neumann boundary (column
    // sums do not), so the bound stays at the reaction scale and the shift
    // sits close to the rightmost eigenvalues.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < jacobian.outerSize(); ++col)
        for (SparseMat::InnerIterator it(jacobian, col); it; ++it) {
            if (it.row() == it.col())
                diag[it.row()] = it.value();
            else
                off[it.row()] += std::abs(it.value());
        }
    const double bound = (diag + off).maxCoeff();
    const double shift = bound + 0.05 * (1.0 + std::abs(bound));

    SparseMat shifted = -jacobian;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
    shifted.makeCompressed();
    Eigen::SparseLU<SparseMat> lu(shifted);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("shift-invert factorization failed");

    // A generous subspace pushes the convergence-limiting edge below any
    // cluster hugging the requested eigenvalues.
    const int subspace = std::min(n, std::max(4 * k + 8, 32));
    Eigen::MatrixXd basis = Eigen::MatrixXd::Random(n, subspace);
    const int max_sweeps = 500;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        basis = lu.solve(basis);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, subspace);
        const Eigen::MatrixXd jb = jacobian * basis;
        const Eigen::MatrixXd projected = basis.transpose() * jb;
        Eigen::EigenSolver<Eigen::MatrixXd> small(projected, true);

        std::vector<int> order(subspace);
        for (int i = 0; i < subspace; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const auto ea = small.eigenvalues()[a];
            const auto eb = small.eigenvalues()[b];
            return ea.real() != eb.real() ? ea.real() > eb.real()
                                          : ea.imag() > eb.imag();
        });

        // Converged when each requested Ritz pair has a small eigenresidual
        // ||J v - mu v|| relative to the eigenvalue scale.
        bool converged = sweep >= 2;
        for (int i = 0; converged && i < k; ++i) {
            const std::complex<double> mu = small.eigenvalues()[order[i]];
            const Eigen::VectorXcd y = small.eigenvectors().col(order[i]);
            const Eigen::VectorXcd res =
                jb * y - mu * (basis * y);
            if (res.norm() > 1e-8 * std::max(1.0, std::abs(mu)))
                converged = false;
        }
        if (converged) {
            std::vector<std::complex<double>> out(k);
            for (int i = 0; i < k; ++i)
                out[i] = small.eigenvalues()[order[i]];
            return out;
        }
    }
    throw std::runtime_error(
        "iterative eigensolver did not converge after 500 sweeps");
}

Mat2 dispersion_matrix(const ModelSpec& model, double k_squared) {
    const Mat2 j = model.kinetics_jacobian(model.uniform_steady_state());
    Mat2 a = model.gamma() * j;
    a(0, 0) -= k_squared;
    a(1, 1) -= model.d() * k_squared;
    return a;
}

DispersionReport report_for(const ModelSpec& model, int m, double k_squared) {
    DispersionReport rep;
    rep.mode = m;
    rep.wavenumber = m * kPi;
    rep.a_matrix = dispersion_matrix(model, k_squared);
    const double tr = rep.a_matrix.trace();
    const double det = rep.a_matrix.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        rep.eigenvalues = {std::complex<double>((tr + root) / 2.0, 0.0),
                           std::complex<double>((tr - root) / 2.0, 0.0)};
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        rep.eigenvalues = {std::complex<double>(tr / 2.0, im),
                           std::complex<double>(tr / 2.0, -im)};
    }
    rep.lambda_max =
        std::max(rep.eigenvalues[0].real(), rep.eigenvalues[1].real());
    return rep;
}

// Continuum Turing test for a 2x2 kinetics Jacobian: A_0 stable and
// det(-D k^2 + gamma j) < 0 for some k > 0.
bool turing_unstable(const Mat2& j, double d, double gamma) {
    const double tr0 = gamma * j.trace();
    const double det0 = gamma * gamma * j.determinant();
    if (tr0 >= 0.0 || det0 <= 0.0) return false;
    const double cross = d * j(0, 0) + j(1, 1);
    if (cross <= 0.0) return false;
    return gamma * gamma * cross * cross > 4.0 * d * det0;
}

}  // namespace

std::vector<std::complex<double>> leading_spectrum(const SparseMat& jacobian,
                                                   int k, int dense_limit) {
    if (k < 1) throw std::invalid_argument("leading_spectrum requires k >= 1");
    if (jacobian.rows() <= dense_limit) {
        auto eigs = sort_by_real_desc(dense_spectrum(jacobian));
        eigs.resize(std::min<std::size_t>(eigs.size(), k));
        return eigs;
    }
    return iterative_spectrum(jacobian, k);
}

StabilityVerdict stability_verdict(const SparseMat& jacobian, int k) {
    StabilityVerdict verdict;
    verdict.method = jacobian.rows() <= 802 ? SpectrumMethod::Dense
                                            : SpectrumMethod::Iterative;
    verdict.leading_eigenvalues = leading_spectrum(jacobian, k);
    const double lead = verdict.leading_eigenvalues.front().real();
    verdict.marginal = std::abs(lead) < kStabilityTol;
    verdict.stable = lead < -kStabilityTol;
    return verdict;
}

DispersionReport dispersion(const ModelSpec& model, int m) {
    const double k = m * kPi;
    return report_for(model, m, k * k);
}

DispersionReport dispersion_discrete(const ModelSpec& model, int m,
                                     const Grid1D& grid) {
    return report_for(model, m, -discrete_laplacian_eigenvalue(grid, m));
}

std::optional<std::pair<double, double>> gamma_instability_roots(
    const ModelSpec& model, int m) {
    if (m < 1) throw std::invalid_argument("mode must be >= 1");
    const Mat2 j = model.kinetics_jacobian(model.uniform_steady_state());
    const double k2 = (m * kPi) * (m * kPi);
    const double d = model.d();
    // det(A_m(gamma)) = det(j) gamma^2 - k^2 (d j11 + j22) gamma + d k^4.
    const double a = j.determinant();
    const double b = -k2 * (d * j(0, 0) + j(1, 1));
    const double c = d * k2 * k2;
    const double disc = b * b - 4.0 * a * c;
    if (a == 0.0 || disc <= 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    double lo = (-b - root) / (2.0 * a);
    double hi = (-b + root) / (2.0 * a);
    if (lo > hi) std::swap(lo, hi);
    if (lo <= 0.0 || hi <= 0.0) return std::nullopt;
    // The window is only a Turing window when A_0 stays stable inside it.
    const double mid = 0.5 * (lo + hi);
    if (!turing_unstable(j, d, mid)) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::optional<double> critical_gamma(const ModelSpec& model, int m_max) {
    std::optional<double> best;
    for (int m = 1; m <= m_max; ++m) {
        const auto roots = gamma_instability_roots(model, m);
        if (roots && (!best || roots->first < *best)) best = roots->first;
    }
    return best;
}

bool turing_region_local(const ModelSpec& model, double x, double theta) {
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("position outside [0,1]");
    const double mod = std::cos(model.heterogeneity().n * kPi * x);
    Mat2 j;
    if (model.kind() == ModelKind::Schnakenberg) {
        // Local production beta(x) with eta(x) = 1 - beta(x) shifted
        // consistently; the local uniform state is (beta(x), 1).
        const double beta = model.params().beta0 * (1.0 + theta * mod);
        j << -1.0, -2.0 * beta, 1.0, 2.0 * beta - 1.0;
    } else {
        const double a = model.params().a0 * (1.0 + theta * mod);
        const double b = model.params().b;
        if (1.0 + a <= 0.0) return false;  // no positive local steady state
        const double ustar = (1.0 + a) / b;
        j << 2.0 / ustar - b, -1.0 / (ustar * ustar), 2.0 * ustar, -1.0;
    }
    return turing_unstable(j, model.d(), model.gamma());
}

double fredholm_projection(const ModelSpec& model, int m,
                           double singular_tol) {
    const DispersionReport rep = dispersion(model, m);
    const Mat2& a = rep.a_matrix;
    const double scale = a.cwiseAbs().maxCoeff();
    if (std::abs(a.determinant()) > singular_tol * scale * scale)
        throw std::invalid_argument(
            "A_m is nonsingular; the adjoint null space is empty");

    // Unit left null vector of A_m (right null vector of A_m^T).
    const Eigen::JacobiSVD<Mat2> svd(a.transpose(), Eigen::ComputeFullV);
    const Vec2 null_vec = svd.matrixV().col(1);

    // integral of coupling^T c* cos(n pi x) cos(m pi x) over (0,1).
    const int n_quad = 4096;
    const double h = 1.0 / n_quad;
    auto integrand = [&](double x) {
        return model.heterogeneity_term(x).dot(null_vec) *
               std::cos(m * kPi * x);
    };
    double acc = 0.5 * (integrand(0.0) + integrand(1.0));
    for (int i = 1; i < n_quad; ++i) acc += integrand(i * h);
    return acc * h;
}

}  // namespace rdcont
