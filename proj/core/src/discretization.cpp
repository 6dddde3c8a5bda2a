#include "rdcont/discretization.hpp"

#include <cmath>

namespace rdcont {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Eigen::VectorXd apply_laplacian(const Grid1D& grid,
                                const Eigen::VectorXd& field,
                                double diffusivity) {
    const int n = grid.n_points;
    if (field.size() != n)
        throw std::invalid_argument("field length does not match grid");
    const double c = diffusivity / (grid.h * grid.h);
    Eigen::VectorXd out(n);
    out[0] = 2.0 * c * (field[1] - field[0]);
    for (int i = 1; i + 1 < n; ++i)
        out[i] = c * (field[i - 1] - 2.0 * field[i] + field[i + 1]);
    out[n - 1] = 2.0 * c * (field[n - 2] - field[n - 1]);
    return out;
}

double discrete_laplacian_eigenvalue(const Grid1D& grid, int m) {
    const double h = grid.h;
    return -(2.0 - 2.0 * std::cos(m * kPi * h)) / (h * h);
}

Eigen::VectorXd residual(const ModelSpec& model, const StateVector& state,
                         double theta) {
    const Grid1D& grid = state.grid;
    const int n = grid.n_points;
    Eigen::VectorXd out(2 * n);
    out.head(n) = apply_laplacian(grid, state.values.head(n), 1.0);
    out.tail(n) = apply_laplacian(grid, state.values.tail(n), model.d());
    const double gamma = model.gamma();
    for (int i = 0; i < n; ++i) {
        const Vec2 f = model.kinetics(state.at(i), grid.x(i), theta);
        out[i] += gamma * f[0];
        out[n + i] += gamma * f[1];
    }
    return out;
}

SparseMat assemble_jacobian(const ModelSpec& model, const StateVector& state,
                            double /*theta*/) {
    // j_G vanishes for production heterogeneity, so theta does not enter.
    const Grid1D& grid = state.grid;
    const int n = grid.n_points;
    const double gamma = model.gamma();
    const double c1 = 1.0 / (grid.h * grid.h);
    const double c2 = model.d() / (grid.h * grid.h);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(10 * n);
    auto add_laplacian = [&](int offset, double c) {
        trip.emplace_back(offset, offset, -2.0 * c);
        trip.emplace_back(offset, offset + 1, 2.0 * c);
        for (int i = 1; i + 1 < n; ++i) {
            trip.emplace_back(offset + i, offset + i - 1, c);
            trip.emplace_back(offset + i, offset + i, -2.0 * c);
            trip.emplace_back(offset + i, offset + i + 1, c);
        }
        trip.emplace_back(offset + n - 1, offset + n - 2, 2.0 * c);
        trip.emplace_back(offset + n - 1, offset + n - 1, -2.0 * c);
    };
    add_laplacian(0, c1);
    add_laplacian(n, c2);

    for (int i = 0; i < n; ++i) {
        const Mat2 j = model.kinetics_jacobian(state.at(i));
        trip.emplace_back(i, i, gamma * j(0, 0));
        trip.emplace_back(i, n + i, gamma * j(0, 1));
        trip.emplace_back(n + i, i, gamma * j(1, 0));
        trip.emplace_back(n + i, n + i, gamma * j(1, 1));
    }

    SparseMat jac(2 * n, 2 * n);
    jac.setFromTriplets(trip.begin(), trip.end());
    return jac;
}

Eigen::VectorXd residual_theta_derivative(const ModelSpec& model,
                                          const Grid1D& grid) {
    const int n = grid.n_points;
    Eigen::VectorXd out(2 * n);
    for (int i = 0; i < n; ++i) {
        const Vec2 g = model.gamma() * model.heterogeneity_term(grid.x(i));
        out[i] = g[0];
        out[n + i] = g[1];
    }
    return out;
}

Eigen::VectorXd residual_gamma_derivative(const ModelSpec& model,
                                          const StateVector& state,
                                          double theta) {
    const Grid1D& grid = state.grid;
    const int n = grid.n_points;
    Eigen::VectorXd out(2 * n);
    for (int i = 0; i < n; ++i) {
        const Vec2 f = model.kinetics(state.at(i), grid.x(i), theta);
        out[i] = f[0];
        out[n + i] = f[1];
    }
    return out;
}

}  // namespace rdcont
