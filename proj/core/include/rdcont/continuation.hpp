#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rdcont/newton.hpp"

namespace rdcont {

/// A parameterized root-finding problem Phi(u; p) = 0 traced by the
/// continuation engine. Implementations exist for the discretized
/// steady-state operator (parameter theta or gamma) and for toy problems
/// in tests.
class ContinuationProblem {
public:
    virtual ~ContinuationProblem() = default;
    virtual int dim() const = 0;
    virtual Eigen::VectorXd residual(const Eigen::VectorXd& u,
                                     double param) const = 0;
    virtual SparseMat jacobian(const Eigen::VectorXd& u,
                               double param) const = 0;
    virtual Eigen::VectorXd param_derivative(const Eigen::VectorXd& u,
                                             double param) const = 0;
    /// Real part of the leading eigenvalue; NaN when not evaluated.
    virtual double leading_real(const Eigen::VectorXd& u, double param) const;
    /// Scalar projection used for branch-identity checks and plots.
    virtual double projection(const Eigen::VectorXd& u) const;
};

struct BranchPoint {
    double param_value = 0.0;
    Eigen::VectorXd state;
    double leading_eigenvalue_real = 0.0;
    bool stable = false;
    double arclength = 0.0;
    double tangent_param_component = 0.0;
};

enum class FoldDetection { TangentSignChange, CorrectorFailureBisection };

struct FoldRecord {
    double param_value = 0.0;
    Eigen::VectorXd state;
    FoldDetection detection_method = FoldDetection::TangentSignChange;
};

enum class BranchTermination {
    ParamLimit,
    MaxPoints,
    FirstFold,
    ClosedLoop,
    Unresolved,
};

struct Branch {
    std::vector<BranchPoint> points;
    std::vector<FoldRecord> folds;
    BranchTermination termination = BranchTermination::ParamLimit;
    std::string provenance;
    /// State infinity-norm gap to the seed when the trace closed on itself.
    double closure_gap = 0.0;
};

enum class ContinuationMode { Natural, Arclength };

struct ContinuationSettings {
    double initial_step = 1e-3;
    double min_step = 1e-6;
    double max_step = 1e-2;
    double param_min = 0.0;
    double param_max = 1.0;
    int max_points = 2000;
    ContinuationMode mode = ContinuationMode::Arclength;
    /// +1 traces toward param_max first, -1 toward param_min.
    int direction = +1;
    /// Step acceptance: reject corrections farther than this multiple of the
    /// predictor step from the prediction (the branch-identity guard).
    double jump_threshold = 10.0;
    double fold_param_tol = 1e-4;
    double fold_tangent_tol = 1e-6;
    bool compute_stability = true;
    bool detect_closed_loop = false;
    /// Arclength mode: stop after recording the first fold instead of
    /// continuing through it.
    bool stop_at_first_fold = false;
    NewtonSettings newton;
};

/// Euler predictor: u - J^{-1} (dPhi/dp) dp. Throws when the Jacobian
/// factorization fails; callers should switch to arclength mode then.
Eigen::VectorXd euler_predict(const ContinuationProblem& problem,
                              const BranchPoint& point, double dparam);

/// Traces a branch from a converged seed. Natural mode stops at the first
/// fold (corrector-failure bisection); arclength mode rounds folds and flips
/// the parameter direction, recording each fold from the tangent sign change.
Branch continue_branch(const ContinuationProblem& problem,
                       const BranchPoint& seed,
                       const ContinuationSettings& settings);

/// Seeds a branch point at the given parameter, converging and tagging it.
BranchPoint make_branch_point(const ContinuationProblem& problem,
                              const Eigen::VectorXd& state, double param,
                              const ContinuationSettings& settings);

/// Refines a fold bracketed by two adjacent points with opposite tangent
/// parameter components, to fold_param_tol in the parameter.
FoldRecord refine_fold(const ContinuationProblem& problem,
                       const BranchPoint& before, const BranchPoint& after,
                       const ContinuationSettings& settings);

}  // namespace rdcont
