#include "rdcont/model.hpp"

#include <cmath>
#include <iostream>

namespace rdcont {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 coupling_for(ModelKind kind, const KineticParams& p) {
    // Schnakenberg: beta(x) = beta0(1 + theta cos(n pi x)), eta = 1 - beta,
    // so the species-2 production moves opposite to species 1.
    if (kind == ModelKind::Schnakenberg) return Vec2(p.beta0, -p.beta0);
    return Vec2(p.a0, 0.0);
}

}  // namespace

ModelSpec::ModelSpec(ModelKind kind, double d, double gamma,
                     KineticParams params, int het_n)
    : kind_(kind), d_(d), gamma_(gamma), params_(params) {
    if (d <= 0.0) throw ModelError("diffusivity must be positive");
    if (gamma <= 0.0) throw ModelError("gamma must be positive");
    if (het_n < 0) throw ModelError("heterogeneity frequency must be >= 0");
    if (kind == ModelKind::Schnakenberg) {
        if (params.beta0 < 0.0 || params.beta0 > 1.0)
            throw ModelError("beta0 must lie in [0,1]");
    } else {
        if (params.a0 <= 0.0) throw ModelError("a0 must be positive");
        if (params.b <= 0.0) throw ModelError("b must be positive");
    }
    if (het_n == 0) {
        // cos(0) = 1: a constant production shift, so the mean-zero
        // decomposition rule does not hold. Accepted for testing only.
        std::cerr << "rdcont: warning: heterogeneity frequency n=0 gives a "
                     "nonzero-mean production term\n";
    }
    het_.n = het_n;
    het_.coupling = coupling_for(kind, params);
}

ModelSpec ModelSpec::with_gamma(double gamma) const {
    return ModelSpec(kind_, d_, gamma, params_, het_.n);
}

Vec2 ModelSpec::kinetics_autonomous(const Vec2& u) const {
    if (kind_ == ModelKind::Schnakenberg) {
        const double r = u[0] * u[1] * u[1];
        return Vec2(-r + params_.beta0, r - u[1] + 1.0 - params_.beta0);
    }
    if (u[1] == 0.0)
        throw ModelError("Gierer-Meinhardt kinetics undefined at v = 0");
    return Vec2(u[0] * u[0] / u[1] - params_.b * u[0] + params_.a0,
                u[0] * u[0] - u[1]);
}

Vec2 ModelSpec::heterogeneity_term(double x) const {
    return het_.coupling * std::cos(het_.n * kPi * x);
}

Vec2 ModelSpec::kinetics(const Vec2& u, double x, double theta) const {
    return kinetics_autonomous(u) + theta * heterogeneity_term(x);
}

Mat2 ModelSpec::kinetics_jacobian(const Vec2& u) const {
    Mat2 j;
    if (kind_ == ModelKind::Schnakenberg) {
        j << -u[1] * u[1], -2.0 * u[0] * u[1],
              u[1] * u[1],  2.0 * u[0] * u[1] - 1.0;
        return j;
    }
    if (u[1] == 0.0)
        throw ModelError("Gierer-Meinhardt Jacobian undefined at v = 0");
    j << 2.0 * u[0] / u[1] - params_.b, -u[0] * u[0] / (u[1] * u[1]),
         2.0 * u[0],                    -1.0;
    return j;
}

Vec2 ModelSpec::uniform_steady_state() const {
    if (kind_ == ModelKind::Schnakenberg) return Vec2(params_.beta0, 1.0);
    const double ustar = (1.0 + params_.a0) / params_.b;
    return Vec2(ustar, ustar * ustar);
}

Vec2 ModelSpec::heterogeneity_mean() const {
    // Composite trapezoid over (0,1); exact in exact arithmetic for cosines.
    const int n_quad = 4096;
    const double h = 1.0 / n_quad;
    Vec2 acc = 0.5 * (heterogeneity_term(0.0) + heterogeneity_term(1.0));
    for (int i = 1; i < n_quad; ++i) acc += heterogeneity_term(i * h);
    return acc * h;
}

ModelSpec make_schnakenberg(double gamma, double beta0, double d, int n) {
    KineticParams p;
    p.beta0 = beta0;
    return ModelSpec(ModelKind::Schnakenberg, d, gamma, p, n);
}

ModelSpec make_gierer_meinhardt(double gamma, double a0, double b, double d,
                                int n) {
    KineticParams p;
    p.a0 = a0;
    p.b = b;
    return ModelSpec(ModelKind::GiererMeinhardt, d, gamma, p, n);
}

}  // namespace rdcont
