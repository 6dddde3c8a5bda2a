#include "rdcont/time_integration.hpp"

#include <random>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace rdcont {

namespace {

SparseMat implicit_diffusion_matrix(const Grid1D& grid, double diffusivity,
                                    double dt) {
    // I - dt * L with the ghost-reflection Neumann stencil.
    const int n = grid.n_points;
    const double c = dt * diffusivity / (grid.h * grid.h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * n);
    trip.emplace_back(0, 0, 1.0 + 2.0 * c);
    trip.emplace_back(0, 1, -2.0 * c);
    for (int i = 1; i + 1 < n; ++i) {
        trip.emplace_back(i, i - 1, -c);
        trip.emplace_back(i, i, 1.0 + 2.0 * c);
        trip.emplace_back(i, i + 1, -c);
    }
    trip.emplace_back(n - 1, n - 2, -2.0 * c);
    trip.emplace_back(n - 1, n - 1, 1.0 + 2.0 * c);
    SparseMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

}  // namespace

IntegrationOutcome evolve_to_steady(const ModelSpec& model,
                                    const StateVector& initial, double theta,
                                    const IntegrationSettings& settings) {
    const Grid1D& grid = initial.grid;
    const int n = grid.n_points;
    const double dt =
        settings.dt > 0.0 ? settings.dt : 1e-3 / model.gamma();

    // The diffusion factorizations are reused every step.
    Eigen::SparseLU<SparseMat> lu_u(implicit_diffusion_matrix(grid, 1.0, dt));
    Eigen::SparseLU<SparseMat> lu_v(
        implicit_diffusion_matrix(grid, model.d(), dt));
    if (lu_u.info() != Eigen::Success || lu_v.info() != Eigen::Success)
        throw std::runtime_error("diffusion factorization failed");

    IntegrationOutcome out;
    out.state = initial.values;
    const double gamma = model.gamma();
    Eigen::VectorXd rhs_u(n), rhs_v(n);
    for (double t = 0.0; t < settings.t_max; t += dt) {
        for (int i = 0; i < n; ++i) {
            const Vec2 f = model.kinetics(
                Vec2(out.state[i], out.state[n + i]), grid.x(i), theta);
            rhs_u[i] = out.state[i] + dt * gamma * f[0];
            rhs_v[i] = out.state[n + i] + dt * gamma * f[1];
        }
        Eigen::VectorXd next(2 * n);
        next.head(n) = lu_u.solve(rhs_u);
        next.tail(n) = lu_v.solve(rhs_v);
        if (!next.allFinite() ||
            next.lpNorm<Eigen::Infinity>() > 1e8)
            throw std::runtime_error("time integration diverged");
        out.derivative_norm =
            (next - out.state).lpNorm<Eigen::Infinity>() / dt;
        out.state = next;
        out.t_final = t + dt;
        if (out.derivative_norm < settings.steady_tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

StateVector perturb_state(const StateVector& state, double amplitude,
                          std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    Eigen::VectorXd v = state.values;
    for (int i = 0; i < v.size(); ++i) v[i] += dist(rng);
    return StateVector(state.grid, std::move(v));
}

}  // namespace rdcont
