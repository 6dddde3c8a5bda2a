#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rdcont {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class ModelKind { Schnakenberg, GiererMeinhardt };

/// Spatially varying production term theta * coupling * cos(n*pi*x).
///
/// theta is the active continuation parameter and is deliberately
/// unbounded here; range limits belong to experiment configs.
struct HeterogeneityProfile {
    double theta = 0.0;
    int n = 1;                 // cosine mode frequency, n >= 0
    Vec2 coupling = Vec2::Zero();
};

struct KineticParams {
    double beta0 = 0.8;   // Schnakenberg: substrate share of unit production
    double a0 = 0.1;      // Gierer-Meinhardt: mean activator production
    double b = 1.0;       // Gierer-Meinhardt: activator decay
};

class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// A two-species reaction-diffusion problem on (0,1): kinetics split into
/// an autonomous part and a mean-zero production heterogeneity grown by theta.
/// Immutable after construction; safe to share across threads.
class ModelSpec {
public:
    ModelSpec(ModelKind kind, double d, double gamma, KineticParams params,
              int het_n);

    ModelKind kind() const { return kind_; }
    double diffusivity(int species) const { return species == 0 ? 1.0 : d_; }
    double d() const { return d_; }
    double gamma() const { return gamma_; }
    const KineticParams& params() const { return params_; }
    const HeterogeneityProfile& heterogeneity() const { return het_; }

    ModelSpec with_gamma(double gamma) const;

    /// Autonomous kinetics F_hat(u).
    Vec2 kinetics_autonomous(const Vec2& u) const;

    /// Spatial production term G(x) (u-independent for both case studies).
    Vec2 heterogeneity_term(double x) const;

    /// F_hat(u) + theta * G(x).
    Vec2 kinetics(const Vec2& u, double x, double theta) const;

    /// Exact 2x2 Jacobian of the autonomous kinetics.
    Mat2 kinetics_jacobian(const Vec2& u) const;

    /// Root of F_hat with nonsingular Jacobian: (beta0, 1) for Schnakenberg,
    /// ((1+a0)/b, ((1+a0)/b)^2) for Gierer-Meinhardt.
    Vec2 uniform_steady_state() const;

    /// Numerically integrates G over (0,1); vanishes for n >= 1.
    Vec2 heterogeneity_mean() const;

private:
    ModelKind kind_;
    double d_;
    double gamma_;
    KineticParams params_;
    HeterogeneityProfile het_;
};

/// Builds the two case-study models with their conventional defaults.
ModelSpec make_schnakenberg(double gamma, double beta0 = 0.8,
                            double d = 1.0 / 40.0, int n = 1);
ModelSpec make_gierer_meinhardt(double gamma, double a0 = 0.1, double b = 1.0,
                                double d = 20.0, int n = 1);

}  // namespace rdcont
