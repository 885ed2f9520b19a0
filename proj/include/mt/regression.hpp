#pragma once

#include <Eigen/Dense>

#include "mt/ali.hpp"
#include "mt/dense_tensor.hpp"
#include "mt/feature_maps.hpp"
#include "mt/mtensor.hpp"

namespace mt {

enum class RegKind { None, Tikhonov, Spectral, Ali };
enum class AliMode { Greedy, Optimal };

struct Regularizer {
    RegKind kind = RegKind::None;
    double lambda = 0.0;         // Tikhonov
    Eigen::Index rank = 0;       // spectral (resolved rank)
    double tau = 0.0;            // spectral threshold, 0 when rank-specified
    double epsilon = 0.0;        // ALI
    AliMode ali_mode = AliMode::Greedy;
};

struct FitDiagnostics {
    Eigen::Index retained_rows = 0;
    double condition = 0.0;      // eigenvalue ratio when available, else Cholesky diagonal proxy
    double fit_residual = 0.0;   // relative training residual
};

/// Fitted dual-form model: retained operator, solved weights, feature maps.
struct RegressionModel {
    MTensor op;                  // full phi or the ALI row subset
    Eigen::MatrixXd dual;        // retained rows x output dim
    FeatureMapSet maps;
    Regularizer regularizer;
    FitDiagnostics diagnostics;
    Eigen::MatrixXd samples;     // retained raw samples (may be empty when fit from bare cores)
};

/// Plain least squares: dual Z solves (phi x phi^T) Z = Y through Cholesky.
/// jitter opts into the one-shot diagonal-jitter retry for near-singular P.
RegressionModel fit_least_squares(const MTensor& phi, const Eigen::MatrixXd& Y,
                                  FeatureMapSet maps, Eigen::MatrixXd samples = {},
                                  bool jitter = false);

/// Ridge: dual Z solves (phi x phi^T + lambda^2 I) Z = Y.
RegressionModel fit_tikhonov(const MTensor& phi, const Eigen::MatrixXd& Y, double lambda,
                             FeatureMapSet maps, Eigen::MatrixXd samples = {},
                             bool jitter = false);

/// Projection of the least-squares dual onto the top-r eigenspace of P.
RegressionModel fit_spectral_rank(const MTensor& phi, const Eigen::MatrixXd& Y, Eigen::Index rank,
                                  FeatureMapSet maps, Eigen::MatrixXd samples = {},
                                  bool jitter = false);

/// Threshold form: rank = number of eigenvalues of P with sqrt(lambda) >= tau.
RegressionModel fit_spectral_tau(const MTensor& phi, const Eigen::MatrixXd& Y, double tau,
                                 FeatureMapSet maps, Eigen::MatrixXd samples = {},
                                 bool jitter = false);

/// Row-subset model from the ALI decomposition; solves the reduced system.
RegressionModel fit_ali(const MTensor& phi, const Eigen::MatrixXd& Y, double epsilon, AliMode mode,
                        FeatureMapSet maps, Eigen::MatrixXd samples = {});

/// f_hat(x) = Z^T (phi(x) x op^T); output dim = dual columns.
Eigen::VectorXd predict(const RegressionModel& M, const Eigen::VectorXd& x);

/// k(x, x') = <phi(x), phi(x')>, computed factor by factor.
double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& x2, const FeatureMapSet& maps);

/// Dense coefficient tensor (single-output models, capped size).
DenseTensor coefficients_dense(const RegressionModel& M, Eigen::Index cap = kDefaultDenseCap);

}  // namespace mt
