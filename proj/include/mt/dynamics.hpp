#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include "mt/regression.hpp"

namespace mt {

/// Uniform-timestep state sequence, steps+1 states.
struct Trajectory {
    std::vector<Eigen::VectorXd> states;
    double dt = 0.0;
    double t0 = 0.0;

    Eigen::Index steps() const { return static_cast<Eigen::Index>(states.size()) - 1; }
    /// states stacked as rows.
    Eigen::MatrixXd as_matrix() const;
};

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 2.667;
};

struct KuramotoParams {
    Eigen::VectorXd omega;  // natural frequencies, length n
    double coupling = 2.0;
};

struct SystemSpec {
    std::variant<LorenzParams, KuramotoParams> kind;

    int dimension() const;
    Eigen::VectorXd rhs(const Eigen::VectorXd& x) const;
};

Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& x, double sigma, double rho, double beta);

Eigen::VectorXd kuramoto_rhs(const Eigen::VectorXd& theta, const Eigen::VectorXd& omega,
                             double coupling);

using RhsFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Explicit Euler: x_{k+1} = x_k + rhs(x_k) dt. Throws DivergenceError with
/// the offending step when a non-finite state appears.
Trajectory euler_integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, double dt, long steps,
                           double t0 = 0.0);

enum class DerivativeSource { Exact, FiniteDifference };

struct DerivativeData {
    Eigen::MatrixXd states;   // m x n
    Eigen::MatrixXd targets;  // m x n
};

/// Exact mode evaluates the true right-hand side at every state; the
/// finite-difference mode uses (x_{k+1} - x_k) / dt and drops the last state.
DerivativeData assemble_derivative_data(const Trajectory& traj, const SystemSpec& spec,
                                        DerivativeSource source);

/// Integrate the fitted model as a dynamical system.
Trajectory rollout(const RegressionModel& M, const Eigen::VectorXd& x0, double dt, long steps);

/// CSV with header t,x1,...,xn, full double precision.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace mt
