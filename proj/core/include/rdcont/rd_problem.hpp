#pragma once

#include <optional>
#include <variant>

#include "rdcont/continuation.hpp"
#include "rdcont/stability.hpp"

namespace rdcont {

enum class ActiveParam { Theta, Gamma };

/// Steady-state problem Phi(u; p) = 0 for a discretized model, with either
/// the heterogeneity amplitude theta or the scale gamma as the active
/// continuation parameter (the other held fixed).
class RdProblem : public ContinuationProblem {
public:
    RdProblem(ModelSpec model, Grid1D grid, ActiveParam active,
              double fixed_value);

    int dim() const override { return 2 * grid_.n_points; }
    Eigen::VectorXd residual(const Eigen::VectorXd& u,
                             double param) const override;
    SparseMat jacobian(const Eigen::VectorXd& u, double param) const override;
    Eigen::VectorXd param_derivative(const Eigen::VectorXd& u,
                                     double param) const override;
    double leading_real(const Eigen::VectorXd& u, double param) const override;
    /// max over x of u, the projection plotted in bifurcation diagrams.
    double projection(const Eigen::VectorXd& u) const override;

    const Grid1D& grid() const { return grid_; }
    const ModelSpec& base_model() const { return model_; }
    ActiveParam active() const { return active_; }
    double theta_at(double param) const {
        return active_ == ActiveParam::Theta ? param : fixed_;
    }
    ModelSpec model_at(double param) const {
        return active_ == ActiveParam::Gamma ? model_.with_gamma(param)
                                             : model_;
    }

private:
    ModelSpec model_;
    Grid1D grid_;
    ActiveParam active_;
    double fixed_;  // theta when continuing gamma, unused otherwise
};

/// Branch of the base state in theta from the uniform steady state.
Branch trace_base_branch(const ModelSpec& model, const Grid1D& grid,
                         const ContinuationSettings& settings);

enum class ThetaPlusStatus { Fold, NoFoldInRange, NumericallyUnresolved };

struct ThetaPlusResult {
    ThetaPlusStatus status = ThetaPlusStatus::NoFoldInRange;
    std::optional<double> value;  // refined first-fold theta when status==Fold
};

/// First fold of the base branch in theta, or no-fold when the branch
/// reaches the theta limit, or a distinguished unresolved outcome.
ThetaPlusResult theta_plus(const ModelSpec& model, const Grid1D& grid,
                           const ContinuationSettings& settings);

}  // namespace rdcont
