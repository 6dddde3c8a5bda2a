#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rdcont/model.hpp"

namespace rdcont {

using SparseMat = Eigen::SparseMatrix<double>;

/// Uniform grid on [0,1] inclusive of both endpoints.
struct Grid1D {
    explicit Grid1D(int n_points_) : n_points(n_points_) {
        if (n_points < 3) throw std::invalid_argument("grid needs >= 3 points");
        h = 1.0 / (n_points - 1);
    }
    int n_points;
    double h;
    double x(int i) const { return i * h; }
};

/// Discrete two-species state, blocked by species: all u then all v.
struct StateVector {
    StateVector(const Grid1D& grid_, Eigen::VectorXd values_)
        : grid(grid_), values(std::move(values_)) {
        if (values.size() != 2 * grid.n_points)
            throw std::invalid_argument("state length inconsistent with grid");
    }
    static StateVector constant(const Grid1D& grid, const Vec2& u) {
        Eigen::VectorXd v(2 * grid.n_points);
        v.head(grid.n_points).setConstant(u[0]);
        v.tail(grid.n_points).setConstant(u[1]);
        return StateVector(grid, std::move(v));
    }

    Grid1D grid;
    Eigen::VectorXd values;

    double u(int i) const { return values[i]; }
    double v(int i) const { return values[grid.n_points + i]; }
    Vec2 at(int i) const { return Vec2(u(i), v(i)); }
};

/// Second-order Neumann Laplacian via ghost-point reflection.
/// Interior: d (f_{i-1} - 2 f_i + f_{i+1}) / h^2; boundary rows
/// 2d (f_1 - f_0)/h^2 and 2d (f_{N-2} - f_{N-1})/h^2.
Eigen::VectorXd apply_laplacian(const Grid1D& grid,
                                const Eigen::VectorXd& field,
                                double diffusivity);

/// Discrete eigenvalue of the Neumann Laplacian stencil for mode cos(m pi x).
double discrete_laplacian_eigenvalue(const Grid1D& grid, int m);

/// Steady-state residual: D lap u + gamma (F_hat(u) + theta G(x)) per node.
/// A zero return certifies a discrete steady state.
Eigen::VectorXd residual(const ModelSpec& model, const StateVector& state,
                         double theta);

/// Jacobian of the residual with respect to the state: Laplacian blocks on
/// each species diagonal plus gamma * j_Fhat(u_i) 2x2 coupling per node.
SparseMat assemble_jacobian(const ModelSpec& model, const StateVector& state,
                            double theta);

/// d residual / d theta = gamma * G(x) nodewise (state independent here).
Eigen::VectorXd residual_theta_derivative(const ModelSpec& model,
                                          const Grid1D& grid);

/// d residual / d gamma = F_hat(u) + theta G(x) nodewise.
Eigen::VectorXd residual_gamma_derivative(const ModelSpec& model,
                                          const StateVector& state,
                                          double theta);

}  // namespace rdcont
