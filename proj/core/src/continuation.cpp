#include "rdcont/continuation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

namespace rdcont {

namespace {

// Arclength metric: states are scaled by 1/sqrt(dim) so parameter and state
// contributions stay balanced across grid resolutions.
double scaled_norm(const Eigen::VectorXd& du, double dp, int dim) {
    return std::sqrt(du.squaredNorm() / dim + dp * dp);
}

SparseMat bordered_matrix(const SparseMat& jac,
                          const Eigen::VectorXd& param_col,
                          const Eigen::VectorXd& row_state, double row_param,
                          int dim) {
    const int n = static_cast<int>(jac.rows());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(jac.nonZeros() + 2 * n + 1);
    for (int k = 0; k < jac.outerSize(); ++k)
        for (SparseMat::InnerIterator it(jac, k); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i) {
        if (param_col[i] != 0.0) trip.emplace_back(i, n, param_col[i]);
        if (row_state[i] != 0.0)
            trip.emplace_back(n, i, row_state[i] / dim);
    }
    trip.emplace_back(n, n, row_param);
    SparseMat out(n + 1, n + 1);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

struct Tangent {
    Eigen::VectorXd state;
    double param = 0.0;
};

// Normalized branch tangent from the bordered system
//   [ J        dPhi/dp ] [t_u]   [0]
//   [ prev_u/d  prev_p ] [t_p] = [1],
// well defined through folds as long as the previous tangent is not
// orthogonal to the branch.
std::optional<Tangent> branch_tangent(const ContinuationProblem& problem,
                                      const Eigen::VectorXd& u, double param,
                                      const Tangent& prev) {
    const int n = problem.dim();
    const SparseMat bordered =
        bordered_matrix(problem.jacobian(u, param),
                        problem.param_derivative(u, param), prev.state,
                        prev.param, n);
    Eigen::SparseLU<SparseMat> lu(bordered);
    if (lu.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs[n] = 1.0;
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) return std::nullopt;
    Tangent t{sol.head(n), sol[n]};
    const double norm = scaled_norm(t.state, t.param, n);
    if (norm == 0.0 || !std::isfinite(norm)) return std::nullopt;
    t.state /= norm;
    t.param /= norm;
    return t;
}

struct CorrectedPoint {
    Eigen::VectorXd state;
    double param = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Newton correction of the pseudo-arclength system: Phi = 0 plus the
// hyperplane constraint through the predictor orthogonal to the tangent.
CorrectedPoint correct_arclength(const ContinuationProblem& problem,
                                 const Eigen::VectorXd& pred_u, double pred_p,
                                 const Tangent& tangent,
                                 const NewtonSettings& newton) {
    const int n = problem.dim();
    auto residual_fn = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd out(n + 1);
        try {
            out.head(n) = problem.residual(y.head(n), y[n]);
        } catch (const ModelError&) {
            return Eigen::VectorXd::Constant(
                n + 1, std::numeric_limits<double>::quiet_NaN());
        }
        out[n] = (y.head(n) - pred_u).dot(tangent.state) / n +
                 (y[n] - pred_p) * tangent.param;
        return out;
    };
    auto jacobian_fn = [&](const Eigen::VectorXd& y) {
        return bordered_matrix(problem.jacobian(y.head(n), y[n]),
                               problem.param_derivative(y.head(n), y[n]),
                               tangent.state, tangent.param, n);
    };
    Eigen::VectorXd seed(n + 1);
    seed.head(n) = pred_u;
    seed[n] = pred_p;
    const NewtonOutcome outcome =
        newton_solve_generic(residual_fn, jacobian_fn, seed, newton);
    return {outcome.state.head(n), outcome.state[n], outcome.converged,
            outcome.iterations};
}

CorrectedPoint correct_natural(const ContinuationProblem& problem,
                               const Eigen::VectorXd& seed, double param,
                               const NewtonSettings& newton) {
    auto residual_fn = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        try {
            return problem.residual(u, param);
        } catch (const ModelError&) {
            return Eigen::VectorXd::Constant(
                u.size(), std::numeric_limits<double>::quiet_NaN());
        }
    };
    auto jacobian_fn = [&](const Eigen::VectorXd& u) {
        return problem.jacobian(u, param);
    };
    const NewtonOutcome outcome =
        newton_solve_generic(residual_fn, jacobian_fn, seed, newton);
    return {outcome.state, param, outcome.converged, outcome.iterations};
}

BranchPoint tag_point(const ContinuationProblem& problem,
                      const Eigen::VectorXd& state, double param,
                      double arclength, double tangent_param,
                      bool compute_stability) {
    BranchPoint pt;
    pt.param_value = param;
    pt.state = state;
    pt.arclength = arclength;
    pt.tangent_param_component = tangent_param;
    if (compute_stability) {
        pt.leading_eigenvalue_real = problem.leading_real(state, param);
        pt.stable = pt.leading_eigenvalue_real < 0.0;
    } else {
        pt.leading_eigenvalue_real = std::numeric_limits<double>::quiet_NaN();
        pt.stable = false;
    }
    return pt;
}

}  // namespace

double ContinuationProblem::leading_real(const Eigen::VectorXd&,
                                         double) const {
    return std::numeric_limits<double>::quiet_NaN();
}

double ContinuationProblem::projection(const Eigen::VectorXd& u) const {
    return u.size() > 0 ? u.maxCoeff() : 0.0;
}

Eigen::VectorXd euler_predict(const ContinuationProblem& problem,
                              const BranchPoint& point, double dparam) {
    const Eigen::VectorXd dres =
        problem.param_derivative(point.state, point.param_value);
    if (dres.isZero(0.0)) return point.state;
    const SparseMat jac = problem.jacobian(point.state, point.param_value);
    Eigen::SparseLU<SparseMat> lu(jac);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error(
            "euler_predict: singular Jacobian; switch to arclength mode");
    const Eigen::VectorXd sensitivity = lu.solve(dres);
    if (!sensitivity.allFinite())
        throw std::runtime_error(
            "euler_predict: singular Jacobian; switch to arclength mode");
    return point.state - sensitivity * dparam;
}

BranchPoint make_branch_point(const ContinuationProblem& problem,
                              const Eigen::VectorXd& state, double param,
                              const ContinuationSettings& settings) {
    const CorrectedPoint c =
        correct_natural(problem, state, param, settings.newton);
    if (!c.converged)
        throw std::runtime_error("make_branch_point: seed did not converge");
    return tag_point(problem, c.state, param, 0.0, 0.0,
                     settings.compute_stability);
}

FoldRecord refine_fold(const ContinuationProblem& problem,
                       const BranchPoint& before, const BranchPoint& after,
                       const ContinuationSettings& settings) {
    if (before.tangent_param_component * after.tangent_param_component > 0.0)
        throw std::invalid_argument(
            "refine_fold: bracket tangents do not change sign");
    const int n = problem.dim();

    Tangent left{before.state, before.param_value};
    // Direction of travel at the left endpoint.
    Tangent travel{Eigen::VectorXd::Zero(n), 0.0};
    travel.state = (after.state - before.state);
    travel.param = after.param_value - before.param_value;
    const double span = scaled_norm(travel.state, travel.param, n);
    travel.state /= span;
    travel.param /= span;
    const auto t_left =
        branch_tangent(problem, before.state, before.param_value, travel);
    if (!t_left) throw std::runtime_error("refine_fold: tangent solve failed");

    const double sign_left = before.tangent_param_component > 0.0 ? 1.0 : -1.0;
    double s_lo = 0.0;
    double s_hi = span;
    BranchPoint base = before;
    Tangent tangent_at_base = *t_left;
    FoldRecord record;
    record.detection_method = FoldDetection::TangentSignChange;
    record.param_value = after.param_value;
    record.state = after.state;
    double best_tp = std::abs(after.tangent_param_component);

    for (int iter = 0; iter < 80 && (s_hi - s_lo) > 1e-13; ++iter) {
        const double s_mid = 0.5 * (s_lo + s_hi);
        const Eigen::VectorXd pred_u =
            base.state + (s_mid - s_lo) * tangent_at_base.state;
        const double pred_p =
            base.param_value + (s_mid - s_lo) * tangent_at_base.param;
        const CorrectedPoint c = correct_arclength(
            problem, pred_u, pred_p, tangent_at_base, settings.newton);
        if (!c.converged) {
            s_hi = s_mid;  // shrink toward the known-good side
            continue;
        }
        const auto t_mid =
            branch_tangent(problem, c.state, c.param, tangent_at_base);
        if (!t_mid) {
            s_hi = s_mid;
            continue;
        }
        if (std::abs(t_mid->param) < best_tp) {
            best_tp = std::abs(t_mid->param);
            record.param_value = c.param;
            record.state = c.state;
        }
        if (best_tp < settings.fold_tangent_tol) break;
        if (t_mid->param * sign_left > 0.0) {
            // Still on the incoming side: advance the base point.
            base.state = c.state;
            base.param_value = c.param;
            tangent_at_base = *t_mid;
            s_lo = s_mid;
        } else {
            s_hi = s_mid;
        }
    }
    return record;
}

Branch continue_branch(const ContinuationProblem& problem,
                       const BranchPoint& seed,
                       const ContinuationSettings& settings) {
    Branch branch;
    const int n = problem.dim();
    const bool natural = settings.mode == ContinuationMode::Natural;

    BranchPoint current = seed;
    current.arclength = 0.0;

    Tangent prev{Eigen::VectorXd::Zero(n),
                 static_cast<double>(settings.direction)};
    auto tangent = branch_tangent(problem, current.state, current.param_value,
                                  prev);
    if (!tangent) {
        branch.points.push_back(current);
        branch.termination = BranchTermination::Unresolved;
        return branch;
    }
    if (tangent->param * settings.direction < 0.0) {
        tangent->state = -tangent->state;
        tangent->param = -tangent->param;
    }
    current.tangent_param_component = tangent->param;
    branch.points.push_back(current);

    double step = settings.initial_step;
    int quick_successes = 0;

    while (static_cast<int>(branch.points.size()) < settings.max_points) {
        CorrectedPoint corrected;
        Eigen::VectorXd pred_u;
        double pred_p = 0.0;
        double pred_size = 0.0;

        if (natural) {
            const double dp =
                step * (tangent->param >= 0.0 ? 1.0 : -1.0);
            pred_p = current.param_value + dp;
            bool predicted = true;
            try {
                pred_u = euler_predict(problem, current, dp);
            } catch (const std::runtime_error&) {
                predicted = false;
            }
            if (predicted) {
                pred_size = scaled_norm(pred_u - current.state, dp, n);
                corrected = correct_natural(problem, pred_u, pred_p,
                                            settings.newton);
            }
        } else {
            pred_u = current.state + step * tangent->state;
            pred_p = current.param_value + step * tangent->param;
            pred_size = step;
            corrected = correct_arclength(problem, pred_u, pred_p, *tangent,
                                          settings.newton);
        }

        bool accepted = corrected.converged;
        if (accepted) {
            // Branch-identity guard: a correction that lands far from the
            // prediction has likely jumped to a different branch.
            const double dist = scaled_norm(corrected.state - pred_u,
                                            corrected.param - pred_p, n);
            if (dist > settings.jump_threshold *
                           std::max(pred_size, settings.min_step))
                accepted = false;
        }

        std::optional<Tangent> new_tangent;
        if (accepted) {
            new_tangent = branch_tangent(problem, corrected.state,
                                         corrected.param, *tangent);
            if (!new_tangent) accepted = false;
        }

        if (!accepted) {
            if (step / 2.0 >= settings.min_step) {
                step /= 2.0;
                quick_successes = 0;
                continue;
            }
            if (natural) {
                // Corrector keeps failing at the minimum step: bisect the
                // parameter to localize a fold.
                double lo = current.param_value;
                double hi = pred_p;
                BranchPoint last_good = current;
                while (std::abs(hi - lo) > settings.fold_param_tol) {
                    const double mid = 0.5 * (lo + hi);
                    Eigen::VectorXd seed_u;
                    try {
                        seed_u = euler_predict(problem, last_good,
                                               mid - last_good.param_value);
                    } catch (const std::runtime_error&) {
                        seed_u = last_good.state;
                    }
                    const CorrectedPoint c = correct_natural(
                        problem, seed_u, mid, settings.newton);
                    if (c.converged) {
                        lo = mid;
                        last_good = tag_point(problem, c.state, mid,
                                              current.arclength, 0.0,
                                              settings.compute_stability);
                    } else {
                        hi = mid;
                    }
                }
                // A genuine fold has a flattening tangent at the endpoint.
                const auto t_end = branch_tangent(
                    problem, last_good.state, last_good.param_value, *tangent);
                if (t_end && std::abs(t_end->param) < 0.5) {
                    FoldRecord record;
                    record.param_value = last_good.param_value;
                    record.state = last_good.state;
                    record.detection_method =
                        FoldDetection::CorrectorFailureBisection;
                    branch.folds.push_back(record);
                    if (last_good.param_value != current.param_value)
                        branch.points.push_back(last_good);
                    branch.termination = BranchTermination::FirstFold;
                } else {
                    branch.termination = BranchTermination::Unresolved;
                }
                return branch;
            }
            branch.termination = BranchTermination::Unresolved;
            return branch;
        }

        const double advance = scaled_norm(corrected.state - current.state,
                                           corrected.param -
                                               current.param_value,
                                           n);
        BranchPoint next = tag_point(problem, corrected.state, corrected.param,
                                     current.arclength + advance,
                                     new_tangent->param,
                                     settings.compute_stability);

        // Fold passage shows as a sign change of the tangent's parameter
        // component between consecutive points.
        if (!natural && current.tangent_param_component *
                                next.tangent_param_component <
                            0.0) {
            branch.folds.push_back(
                refine_fold(problem, current, next, settings));
            if (settings.stop_at_first_fold) {
                branch.points.push_back(next);
                branch.termination = BranchTermination::FirstFold;
                return branch;
            }
        }

        branch.points.push_back(next);
        current = next;
        tangent = new_tangent;

        if (corrected.iterations <= 3) {
            if (++quick_successes >= 3) {
                step = std::min(step * 1.3, settings.max_step);
                quick_successes = 0;
            }
        } else {
            quick_successes = 0;
        }

        // Closed-loop detection: back near the seed after a full circuit.
        if (settings.detect_closed_loop && branch.points.size() > 10 &&
            current.arclength > 20.0 * settings.max_step) {
            const double dp = current.param_value - seed.param_value;
            const double dist = scaled_norm(current.state - seed.state, dp, n);
            if (std::abs(dp) <= std::max(step, settings.max_step) &&
                dist < 0.05) {
                const CorrectedPoint back = correct_natural(
                    problem, current.state, seed.param_value,
                    settings.newton);
                if (back.converged) {
                    branch.closure_gap =
                        (back.state - seed.state).lpNorm<Eigen::Infinity>();
                    if (branch.closure_gap < 1e-3) {
                        branch.termination = BranchTermination::ClosedLoop;
                        return branch;
                    }
                }
            }
        }

        // Parameter limits: land exactly on the boundary and stop.
        const bool above = current.param_value >= settings.param_max;
        const bool below = current.param_value <= settings.param_min;
        if (above || below) {
            const double boundary =
                above ? settings.param_max : settings.param_min;
            if (current.param_value != boundary) {
                const CorrectedPoint c = correct_natural(
                    problem, current.state, boundary, settings.newton);
                if (c.converged) {
                    branch.points.back() = tag_point(
                        problem, c.state, boundary, current.arclength,
                        current.tangent_param_component,
                        settings.compute_stability);
                }
            }
            branch.termination = BranchTermination::ParamLimit;
            return branch;
        }
    }
    branch.termination = BranchTermination::MaxPoints;
    return branch;
}

}  // namespace rdcont
