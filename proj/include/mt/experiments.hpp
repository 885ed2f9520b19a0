#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mt/dynamics.hpp"
#include "mt/regression.hpp"

namespace mt {

/// Parsed regularizer request: "ls", "tikhonov:<lambda>", "spectral:<rank>",
/// "ali:<epsilon>" (greedy) or "ali-opt:<epsilon>".
struct RegSpec {
    RegKind kind = RegKind::None;
    double lambda = 0.0;
    Eigen::Index rank = 0;
    double epsilon = 0.0;
    AliMode ali_mode = AliMode::Greedy;
};

RegSpec parse_reg_spec(const std::string& spec);
std::string reg_name(const RegSpec& spec);

/// Latin hypercube: per axis one sample in each of the m equal strata,
/// stratum assignment an independent uniform permutation per axis.
Eigen::MatrixXd lhs_sample(int n, int m, const std::vector<std::pair<double, double>>& bounds,
                           std::uint64_t seed);

/// Same bounds on every axis.
Eigen::MatrixXd lhs_sample(int n, int m, double lo, double hi, std::uint64_t seed);

double rosenbrock(const Eigen::VectorXd& x);

/// ||truth - approx|| / ||truth||.
double relative_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx);
double relative_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& approx);

// ---------------------------------------------------------------------------
// Rosenbrock scaling benchmark
// ---------------------------------------------------------------------------

struct RosenbrockConfig {
    int n = 20;
    int alpha = 20;             // m = alpha * n
    int degree = 4;
    RegSpec reg;
    int repeats = 1;
    std::uint64_t seed = 42;
    double scale = 0.0;         // <= 0: use the experiment default (see run_rosenbrock)
};

struct RosenbrockResult {
    double train_rel_l2 = 0.0;
    double test_rel_l2 = 0.0;
    double train_mean_rel = 0.0;   // mean over points of |y - yhat| / |y|
    double test_mean_rel = 0.0;
    double construct_seconds = 0.0;
    double infer_seconds_per_sample = 0.0;
    Eigen::Index m = 0;
    Eigen::Index m_tilde = 0;
    nlohmann::json report;
};

RosenbrockResult run_rosenbrock(const RosenbrockConfig& cfg);

// ---------------------------------------------------------------------------
// Lorenz identification
// ---------------------------------------------------------------------------

struct LorenzConfig {
    long train_steps = 500;
    double dt = 0.001;
    long rollout_steps = 25000;
    int spectral_rank = 8;
    int ali_target_rows = 8;
    int random_initial_conditions = 50;
    double scale = 0.02;
    std::uint64_t seed = 42;
    LorenzParams params;
    Eigen::Vector3d x0{0.0, 1.0, 1.05};
};

struct LorenzModelOutcome {
    std::string name;
    double train_rel_err = 0.0;
    Eigen::Index retained = 0;
    bool finite = true;
    long diverged_step = -1;
    double max_abs_state = 0.0;
    double rollout_rel_err = 0.0;   // whole-trajectory relative error vs truth
    Trajectory trajectory{{}, 0.0, 0.0};
};

struct LorenzResult {
    Trajectory truth{{}, 0.0, 0.0};
    std::vector<LorenzModelOutcome> models;   // least_squares, spectral, ali
    double ali_epsilon = 0.0;
    double random_ic_mean_rel_err = 0.0;      // ALI model over random initial conditions
    nlohmann::json report;
};

LorenzResult run_lorenz(const LorenzConfig& cfg);

// ---------------------------------------------------------------------------
// Kuramoto identification
// ---------------------------------------------------------------------------

struct KuramotoConfig {
    int n = 10;
    long train_steps = 1000;
    double dt = 0.001;
    long rollout_steps = 50000;
    double coupling = 2.0;
    double omega_min = -5.0;
    double omega_max = 5.0;
    int repeats = 5;
    std::uint64_t seed = 42;
    double scale = 0.0;         // <= 0: experiment default for this n
    double ali_epsilon = 0.0;   // <= 0: experiment default for this n
};

struct KuramotoRepeatResult {
    double ls_train_rel_err = 0.0;
    double ls_rollout_rel_err = 0.0;
    bool ls_finite = true;
    double ali_rollout_rel_err = 0.0;
    bool ali_finite = true;
    Eigen::Index ali_retained = 0;
    Eigen::VectorXd ls_error_series;   // per-step relative error
    Eigen::VectorXd ali_error_series;
};

struct KuramotoResult {
    std::vector<KuramotoRepeatResult> repeats;
    nlohmann::json report;
};

KuramotoResult run_kuramoto(const KuramotoConfig& cfg);

/// Defaults used when KuramotoConfig/RosenbrockConfig leave scale at 0.
double kuramoto_default_scale(int n);
double kuramoto_default_epsilon(int n);
double rosenbrock_default_scale(int n);

/// Greedy-ALI epsilon bisection targeting a retained-row count.
double ali_epsilon_for_rows(const MTensor& phi, Eigen::Index target_rows);

}  // namespace mt
