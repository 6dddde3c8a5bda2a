#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rdcont/discretization.hpp"

namespace rdcont {

struct NewtonSettings {
    double abs_tol = 1e-10;       // residual infinity-norm threshold
    int max_iters = 25;
    double damping = 0.5;         // backtracking factor
    double min_damping = 1e-4;
    // Scale-aware fallback: on fine grids the 1/h^2-scaled residual can
    // bottom out above abs_tol in floating point, so a vanishing Newton
    // step with a loosely small residual also counts as converged.
    double step_tol = 1e-11;
    double loose_tol = 1e-6;
};

/// Failure is a value: the continuation engine consumes non-convergence
/// as fold evidence, so no exception is thrown for a stalled solve.
struct NewtonOutcome {
    Eigen::VectorXd state;
    bool converged = false;
    int iterations = 0;
    double final_residual_norm = 0.0;
    double jacobian_condition_estimate = 0.0;
};

/// Generic residual/Jacobian callbacks so the same corrector serves both
/// the plain and the arclength-bordered systems.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<SparseMat(const Eigen::VectorXd&)>;

/// Damped Newton with backtracking on the residual infinity-norm.
NewtonOutcome newton_solve_generic(const ResidualFn& residual_fn,
                                   const JacobianFn& jacobian_fn,
                                   const Eigen::VectorXd& seed,
                                   const NewtonSettings& settings);

/// Solves the steady-state problem for a model at fixed theta.
NewtonOutcome newton_solve(const ModelSpec& model, const StateVector& seed,
                           double theta, const NewtonSettings& settings);

}  // namespace rdcont
