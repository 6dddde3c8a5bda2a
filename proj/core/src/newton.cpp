#include "rdcont/newton.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

namespace rdcont {

namespace {

double condition_estimate(const SparseMat& jac,
                          const Eigen::SparseLU<SparseMat>& lu) {
    // One-sided estimate: ||J||_inf * ||J^{-1} e|| for an alternating-sign
    // probe vector. Cheap and adequate as a singularity diagnostic.
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(jac.rows());
    for (int k = 0; k < jac.outerSize(); ++k)
        for (SparseMat::InnerIterator it(jac, k); it; ++it)
            row_sums[it.row()] += std::abs(it.value());
    Eigen::VectorXd probe(jac.rows());
    for (int i = 0; i < probe.size(); ++i) probe[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const Eigen::VectorXd sol = lu.solve(probe);
    return row_sums.maxCoeff() * sol.lpNorm<Eigen::Infinity>() /
           probe.lpNorm<Eigen::Infinity>();
}

}  // namespace

NewtonOutcome newton_solve_generic(const ResidualFn& residual_fn,
                                   const JacobianFn& jacobian_fn,
                                   const Eigen::VectorXd& seed,
                                   const NewtonSettings& settings) {
    NewtonOutcome out;
    out.state = seed;

    Eigen::VectorXd res = residual_fn(out.state);
    double res_norm = res.lpNorm<Eigen::Infinity>();
    out.final_residual_norm = res_norm;
    if (!res.allFinite()) return out;
    if (res_norm <= settings.abs_tol) {
        out.converged = true;
        return out;
    }

    Eigen::SparseLU<SparseMat> lu;
    for (int iter = 1; iter <= settings.max_iters; ++iter) {
        SparseMat jac;
        try {
            jac = jacobian_fn(out.state);
        } catch (const ModelError&) {
            out.iterations = iter;
            return out;
        }
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            out.jacobian_condition_estimate =
                std::numeric_limits<double>::infinity();
            return out;
        }
        out.jacobian_condition_estimate = condition_estimate(jac, lu);

        const Eigen::VectorXd step = lu.solve(-res);
        if (!step.allFinite()) return out;

        // Backtrack until the residual norm decreases.
        double alpha = 1.0;
        Eigen::VectorXd trial;
        Eigen::VectorXd trial_res;
        double trial_norm = std::numeric_limits<double>::infinity();
        while (alpha >= settings.min_damping) {
            trial = out.state + alpha * step;
            trial_res = residual_fn(trial);
            trial_norm = trial_res.allFinite()
                             ? trial_res.lpNorm<Eigen::Infinity>()
                             : std::numeric_limits<double>::infinity();
            if (trial_norm < res_norm) break;
            alpha *= settings.damping;
        }
        if (trial_norm >= res_norm) {
            out.iterations = iter;
            return out;  // stalled
        }

        out.state = trial;
        res = trial_res;
        res_norm = trial_norm;
        out.iterations = iter;
        out.final_residual_norm = res_norm;
        const double step_size = alpha * step.lpNorm<Eigen::Infinity>();
        if (res_norm <= settings.abs_tol ||
            (step_size <= settings.step_tol *
                              (1.0 + out.state.lpNorm<Eigen::Infinity>()) &&
             res_norm <= settings.loose_tol)) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

NewtonOutcome newton_solve(const ModelSpec& model, const StateVector& seed,
                           double theta, const NewtonSettings& settings) {
    const Grid1D grid = seed.grid;
    auto residual_fn = [&, grid](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        try {
            return residual(model, StateVector(grid, x), theta);
        } catch (const ModelError&) {
            return Eigen::VectorXd::Constant(
                x.size(), std::numeric_limits<double>::quiet_NaN());
        }
    };
    auto jacobian_fn = [&, grid](const Eigen::VectorXd& x) {
        return assemble_jacobian(model, StateVector(grid, x), theta);
    };
    return newton_solve_generic(residual_fn, jacobian_fn, seed.values,
                                settings);
}

}  // namespace rdcont
