#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "rdcont/discretization.hpp"

namespace rdcont {

/// Homogeneous dispersion data for one cosine mode: A_m = -D k_m^2 +
/// gamma j_Fhat(u0) and its eigenvalue pair.
struct DispersionReport {
    int mode = 0;
    double wavenumber = 0.0;  // k_m = m pi
    Mat2 a_matrix = Mat2::Zero();
    std::array<std::complex<double>, 2> eigenvalues{};
    double lambda_max = 0.0;  // max real part over the pair
};

enum class SpectrumMethod { Dense, Iterative };

struct StabilityVerdict {
    std::vector<std::complex<double>> leading_eigenvalues;
    bool stable = false;
    bool marginal = false;  // leading real part inside the tolerance band
    SpectrumMethod method = SpectrumMethod::Dense;
};

/// Real parts inside (-stability_tol, stability_tol) are reported marginal,
/// never stable: fold detection relies on clean sign changes.
inline constexpr double kStabilityTol = 1e-8;

/// The k eigenvalues of largest real part, sorted descending by real part.
/// Dense decomposition up to dense_limit rows, shift-invert iteration above.
std::vector<std::complex<double>> leading_spectrum(const SparseMat& jacobian,
                                                   int k,
                                                   int dense_limit = 802);

StabilityVerdict stability_verdict(const SparseMat& jacobian, int k = 4);

/// Exact 2x2 dispersion relation of the homogeneous problem at the uniform
/// steady state. With discrete_k, k_m^2 is replaced by the grid stencil
/// eigenvalue so oracle comparisons carry no discretization bias.
DispersionReport dispersion(const ModelSpec& model, int m);
DispersionReport dispersion_discrete(const ModelSpec& model, int m,
                                     const Grid1D& grid);

/// Positive real roots in gamma of det(A_m(gamma)) = 0, the endpoints of the
/// mode-m Turing window. nullopt when the window does not exist.
std::optional<std::pair<double, double>> gamma_instability_roots(
    const ModelSpec& model, int m);

/// Smallest lower instability root over modes 1..m_max: the critical gamma
/// of the homogeneous system. nullopt when no mode has a window.
std::optional<double> critical_gamma(const ModelSpec& model, int m_max = 10);

/// Tests whether the homogeneous system with the production value found at
/// position x (beta(x), or a(x)) is Turing unstable for some continuous
/// wavenumber k > 0.
bool turing_region_local(const ModelSpec& model, double x, double theta);

/// L2 inner product of the heterogeneity with the adjoint null eigenfunction
/// c* cos(m pi x) of a singular A_m. Zero means continuation can proceed
/// despite the singular linearization.
double fredholm_projection(const ModelSpec& model, int m,
                           double singular_tol = 1e-6);

}  // namespace rdcont
