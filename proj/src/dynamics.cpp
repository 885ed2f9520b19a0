#include "mt/dynamics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "mt/errors.hpp"

namespace mt {

Eigen::MatrixXd Trajectory::as_matrix() const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), states[0].size());
    for (std::size_t k = 0; k < states.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = states[k].transpose();
    return out;
}

int SystemSpec::dimension() const {
    if (std::holds_alternative<LorenzParams>(kind)) return 3;
    return static_cast<int>(std::get<KuramotoParams>(kind).omega.size());
}

Eigen::VectorXd SystemSpec::rhs(const Eigen::VectorXd& x) const {
    if (const auto* l = std::get_if<LorenzParams>(&kind))
        return lorenz_rhs(x, l->sigma, l->rho, l->beta);
    const auto& k = std::get<KuramotoParams>(kind);
    return kuramoto_rhs(x, k.omega, k.coupling);
}

Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& x, double sigma, double rho, double beta) {
    return {sigma * (x[1] - x[0]), rho * x[0] - x[1] - x[0] * x[2], x[0] * x[1] - beta * x[2]};
}

Eigen::VectorXd kuramoto_rhs(const Eigen::VectorXd& theta, const Eigen::VectorXd& omega,
                             double coupling) {
    const Eigen::Index n = theta.size();
    if (omega.size() != n) throw DimensionError("kuramoto_rhs: omega length mismatch");
    // sum_j sin(t_j - t_i) = cos(t_i) * sum sin(t_j) - sin(t_i) * sum cos(t_j)
    const Eigen::ArrayXd s = theta.array().sin();
    const Eigen::ArrayXd c = theta.array().cos();
    const double ssum = s.sum();
    const double csum = c.sum();
    return omega.array() + (coupling / static_cast<double>(n)) * (c * ssum - s * csum);
}

Trajectory euler_integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, double dt, long steps,
                           double t0) {
    if (dt <= 0.0) throw std::invalid_argument("euler_integrate: dt must be positive");
    if (steps < 1) throw std::invalid_argument("euler_integrate: steps must be >= 1");
    Trajectory traj;
    traj.dt = dt;
    traj.t0 = t0;
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.push_back(x0);
    Eigen::VectorXd x = x0;
    for (long k = 0; k < steps; ++k) {
        x += rhs(x) * dt;
        if (!x.allFinite())
            throw DivergenceError("euler_integrate: non-finite state at step " + std::to_string(k + 1),
                                  k + 1);
        traj.states.push_back(x);
    }
    return traj;
}

DerivativeData assemble_derivative_data(const Trajectory& traj, const SystemSpec& spec,
                                        DerivativeSource source) {
    DerivativeData data;
    if (source == DerivativeSource::Exact) {
        const Eigen::Index m = static_cast<Eigen::Index>(traj.states.size());
        data.states.resize(m, traj.states[0].size());
        data.targets.resize(m, traj.states[0].size());
        for (Eigen::Index k = 0; k < m; ++k) {
            data.states.row(k) = traj.states[static_cast<std::size_t>(k)].transpose();
            data.targets.row(k) = spec.rhs(traj.states[static_cast<std::size_t>(k)]).transpose();
        }
    } else {
        if (traj.states.size() < 2)
            throw std::invalid_argument("assemble_derivative_data: need >= 2 states for differences");
        const Eigen::Index m = static_cast<Eigen::Index>(traj.states.size()) - 1;
        data.states.resize(m, traj.states[0].size());
        data.targets.resize(m, traj.states[0].size());
        for (Eigen::Index k = 0; k < m; ++k) {
            data.states.row(k) = traj.states[static_cast<std::size_t>(k)].transpose();
            data.targets.row(k) = ((traj.states[static_cast<std::size_t>(k) + 1] -
                                    traj.states[static_cast<std::size_t>(k)]) /
                                   traj.dt)
                                      .transpose();
        }
    }
    return data;
}

Trajectory rollout(const RegressionModel& M, const Eigen::VectorXd& x0, double dt, long steps) {
    return euler_integrate([&M](const Eigen::VectorXd& x) { return predict(M, x); }, x0, dt, steps);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const Eigen::Index n = traj.states[0].size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
    os << "\n";
    os.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        os << traj.t0 + static_cast<double>(k) * traj.dt;
        for (Eigen::Index i = 0; i < n; ++i) os << "," << traj.states[k][i];
        os << "\n";
    }
}

}  // namespace mt
