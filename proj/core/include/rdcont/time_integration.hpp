#pragma once

#include <cstdint>

#include "rdcont/discretization.hpp"

namespace rdcont {

struct IntegrationSettings {
    /// Step size; when <= 0 a default of 1e-3 / gamma is used.
    double dt = 0.0;
    double t_max = 500.0;
    /// Stop when the infinity-norm of du/dt drops below this.
    double steady_tol = 1e-9;
    double perturbation_amplitude = 1e-2;
    std::uint32_t seed = 1;
};

struct IntegrationOutcome {
    Eigen::VectorXd state;
    bool converged = false;
    double t_final = 0.0;
    double derivative_norm = 0.0;
};

/// Semi-implicit stepping of the time-dependent system: diffusion implicit
/// through the factored Neumann Laplacian, reaction explicit. Used to find
/// attracting patterned states for continuation seeding.
IntegrationOutcome evolve_to_steady(const ModelSpec& model,
                                    const StateVector& initial, double theta,
                                    const IntegrationSettings& settings);

/// Deterministic uniform noise in [-amplitude, amplitude] added to a state.
StateVector perturb_state(const StateVector& state, double amplitude,
                          std::uint32_t seed);

}  // namespace rdcont
