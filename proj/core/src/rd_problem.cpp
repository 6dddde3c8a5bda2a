#include "rdcont/rd_problem.hpp"

namespace rdcont {

RdProblem::RdProblem(ModelSpec model, Grid1D grid, ActiveParam active,
                     double fixed_value)
    : model_(std::move(model)),
      grid_(grid),
      active_(active),
      fixed_(fixed_value) {}

Eigen::VectorXd RdProblem::residual(const Eigen::VectorXd& u,
                                    double param) const {
    return rdcont::residual(model_at(param), StateVector(grid_, u),
                            theta_at(param));
}

SparseMat RdProblem::jacobian(const Eigen::VectorXd& u, double param) const {
    return assemble_jacobian(model_at(param), StateVector(grid_, u),
                             theta_at(param));
}

Eigen::VectorXd RdProblem::param_derivative(const Eigen::VectorXd& u,
                                            double param) const {
    if (active_ == ActiveParam::Theta)
        return residual_theta_derivative(model_, grid_);
    return residual_gamma_derivative(model_.with_gamma(param),
                                     StateVector(grid_, u), fixed_);
}

double RdProblem::leading_real(const Eigen::VectorXd& u, double param) const {
    const StabilityVerdict verdict =
        stability_verdict(jacobian(u, param), /*k=*/1);
    return verdict.leading_eigenvalues.front().real();
}

double RdProblem::projection(const Eigen::VectorXd& u) const {
    return u.head(grid_.n_points).maxCoeff();
}

Branch trace_base_branch(const ModelSpec& model, const Grid1D& grid,
                         const ContinuationSettings& settings) {
    const RdProblem problem(model, grid, ActiveParam::Theta, 0.0);
    const StateVector uniform =
        StateVector::constant(grid, model.uniform_steady_state());
    const BranchPoint seed =
        make_branch_point(problem, uniform.values, 0.0, settings);
    Branch branch = continue_branch(problem, seed, settings);
    branch.provenance = "base branch from uniform steady state";
    return branch;
}

ThetaPlusResult theta_plus(const ModelSpec& model, const Grid1D& grid,
                           const ContinuationSettings& settings) {
    ContinuationSettings s = settings;
    s.mode = ContinuationMode::Arclength;
    Branch branch = trace_base_branch(model, grid, s);

    ThetaPlusResult result;
    if (!branch.folds.empty()) {
        result.status = ThetaPlusStatus::Fold;
        result.value = branch.folds.front().param_value;
        return result;
    }
    switch (branch.termination) {
        case BranchTermination::ParamLimit:
        case BranchTermination::ClosedLoop:
            result.status = ThetaPlusStatus::NoFoldInRange;
            break;
        case BranchTermination::MaxPoints:
        case BranchTermination::Unresolved:
        case BranchTermination::FirstFold:
            result.status = ThetaPlusStatus::NumericallyUnresolved;
            break;
    }
    return result;
}

}  // namespace rdcont
