#include <cmath>

#include <doctest.h>

#include "rdcont/newton.hpp"
#include "rdcont/time_integration.hpp"

using namespace rdcont;

TEST_CASE("perturbation is deterministic in the seed and bounded") {
    const Grid1D grid(51);
    const StateVector base = StateVector::constant(grid, Vec2(0.8, 1.0));
    const StateVector a = perturb_state(base, 0.01, 7);
    const StateVector b = perturb_state(base, 0.01, 7);
    const StateVector c = perturb_state(base, 0.01, 8);
    CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a.values - c.values).lpNorm<Eigen::Infinity>() > 0.0);
    CHECK((a.values - base.values).lpNorm<Eigen::Infinity>() <= 0.01);
    CHECK((a.values - base.values).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("a stable uniform state is a fixed point of the stepper") {
    const ModelSpec model = make_schnakenberg(0.3, 0.8);
    const Grid1D grid(51);
    const StateVector initial =
        StateVector::constant(grid, model.uniform_steady_state());
    IntegrationSettings settings;
    settings.t_max = 5.0;
    const IntegrationOutcome out =
        evolve_to_steady(model, initial, 0.0, settings);
    CHECK(out.converged);
    CHECK((out.state - initial.values).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("a perturbed unstable state relaxes back when below threshold") {
    // gamma below the instability window: perturbations decay to uniform.
    const ModelSpec model = make_schnakenberg(0.3, 0.8);
    const Grid1D grid(51);
    const StateVector uniform =
        StateVector::constant(grid, model.uniform_steady_state());
    const StateVector initial = perturb_state(uniform, 0.05, 3);
    IntegrationSettings settings;
    settings.t_max = 600.0;
    const IntegrationOutcome out =
        evolve_to_steady(model, initial, 0.0, settings);
    CHECK(out.converged);
    CHECK((out.state - uniform.values).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("pattern formation inside the instability window") {
    const ModelSpec model = make_schnakenberg(1.0, 0.8);
    const Grid1D grid(101);
    const StateVector uniform =
        StateVector::constant(grid, model.uniform_steady_state());
    const StateVector initial = perturb_state(uniform, 0.01, 1);
    IntegrationSettings settings;
    settings.t_max = 2000.0;
    settings.steady_tol = 1e-8;
    const IntegrationOutcome out =
        evolve_to_steady(model, initial, 0.0, settings);
    CHECK(out.converged);
    const double spread = out.state.head(grid.n_points).maxCoeff() -
                          out.state.head(grid.n_points).minCoeff();
    CHECK(spread > 0.1);

    // The attracting state polishes to a genuine steady state.
    const NewtonOutcome polished = newton_solve(
        model, StateVector(grid, out.state), 0.0, NewtonSettings{});
    CHECK(polished.converged);
    CHECK((polished.state - out.state).lpNorm<Eigen::Infinity>() < 1e-3);
}

TEST_CASE("time budget exhaustion is reported without convergence") {
    const ModelSpec model = make_schnakenberg(1.0, 0.8);
    const Grid1D grid(51);
    const StateVector initial = perturb_state(
        StateVector::constant(grid, model.uniform_steady_state()), 0.01, 1);
    IntegrationSettings settings;
    settings.t_max = 0.05;
    const IntegrationOutcome out =
        evolve_to_steady(model, initial, 0.0, settings);
    CHECK_FALSE(out.converged);
    CHECK(out.t_final == doctest::Approx(0.05).epsilon(0.1));
}

TEST_CASE("blow-up is reported as an error") {
    // A grossly unstable explicit reaction step drives the state past the
    // overflow guard.
    const ModelSpec model = make_schnakenberg(10.0, 0.8);
    const Grid1D grid(21);
    const StateVector initial =
        StateVector::constant(grid, Vec2(100.0, 100.0));
    IntegrationSettings settings;
    settings.dt = 1e3;
    settings.t_max = 1e7;
    CHECK_THROWS_AS(evolve_to_steady(model, initial, 0.0, settings),
                    std::runtime_error);
}
