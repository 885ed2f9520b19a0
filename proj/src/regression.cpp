#include "mt/regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mt/linalg.hpp"

namespace mt {

namespace {

double diag_condition_proxy(const CholeskyFactor& F) {
    const auto d = F.lower().diagonal();
    const double lo = d.minCoeff();
    return lo > 0.0 ? std::pow(d.maxCoeff() / lo, 2) : std::numeric_limits<double>::infinity();
}

double relative_residual(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Z,
                         const Eigen::MatrixXd& Y) {
    const double ynorm = Y.norm();
    return ynorm > 0.0 ? (K * Z - Y).norm() / ynorm : 0.0;
}

MTensor select_rows(const MTensor& phi, const std::vector<Eigen::Index>& indices) {
    std::vector<Eigen::MatrixXd> cores;
    cores.reserve(static_cast<std::size_t>(phi.order()));
    for (Eigen::Index j = 0; j < phi.order(); ++j) {
        Eigen::MatrixXd c(static_cast<Eigen::Index>(indices.size()), phi.cdims()[static_cast<std::size_t>(j)]);
        for (std::size_t l = 0; l < indices.size(); ++l)
            c.row(static_cast<Eigen::Index>(l)) = phi.core(j).row(indices[l]);
        cores.push_back(std::move(c));
    }
    return MTensor(std::move(cores));
}

void check_targets(const MTensor& phi, const Eigen::MatrixXd& Y) {
    if (Y.rows() != phi.rdim())
        throw DimensionError("fit: target rows (" + std::to_string(Y.rows()) +
                             ") must match operator rdim (" + std::to_string(phi.rdim()) + ")");
}

}  // namespace

RegressionModel fit_least_squares(const MTensor& phi, const Eigen::MatrixXd& Y,
                                  FeatureMapSet maps, Eigen::MatrixXd samples, bool jitter) {
    check_targets(phi, Y);
    const Eigen::MatrixXd P = mprod(phi, phi);
    const CholeskyFactor F = cholesky(P, jitter);
    Eigen::MatrixXd Z = solve_spd(F, Y);
    FitDiagnostics diag{phi.rdim(), diag_condition_proxy(F), relative_residual(P, Z, Y)};
    return RegressionModel{phi, std::move(Z), std::move(maps), Regularizer{}, diag,
                           std::move(samples)};
}

RegressionModel fit_tikhonov(const MTensor& phi, const Eigen::MatrixXd& Y, double lambda,
                             FeatureMapSet maps, Eigen::MatrixXd samples, bool jitter) {
    check_targets(phi, Y);
    if (lambda < 0.0) throw std::invalid_argument("fit_tikhonov: lambda must be >= 0");
    Eigen::MatrixXd P = mprod(phi, phi);
    P.diagonal().array() += lambda * lambda;
    const CholeskyFactor F = cholesky(P, jitter);
    Eigen::MatrixXd Z = solve_spd(F, Y);
    FitDiagnostics diag{phi.rdim(), diag_condition_proxy(F), relative_residual(P, Z, Y)};
    Regularizer reg;
    reg.kind = RegKind::Tikhonov;
    reg.lambda = lambda;
    return RegressionModel{phi, std::move(Z), std::move(maps), reg, diag, std::move(samples)};
}

namespace {

RegressionModel fit_spectral_impl(const MTensor& phi, const Eigen::MatrixXd& Y,
                                  Eigen::Index rank, double tau, FeatureMapSet maps,
                                  Eigen::MatrixXd samples, bool jitter) {
    const Eigen::MatrixXd P = mprod(phi, phi);
    const SymEig eig = sym_eig(P);
    if (tau > 0.0) {
        rank = 0;
        for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
            if (eig.eigenvalues[i] > 0.0 && std::sqrt(eig.eigenvalues[i]) >= tau) ++rank;
    }
    if (rank < 1 || rank > phi.rdim())
        throw std::invalid_argument("fit_spectral: rank " + std::to_string(rank) +
                                    " out of range [1, " + std::to_string(phi.rdim()) + "]");
    const CholeskyFactor F = cholesky(P, jitter);
    const Eigen::MatrixXd Ur = eig.eigenvectors.leftCols(rank);
    Eigen::MatrixXd Z = Ur * (Ur.transpose() * solve_spd(F, Y));
    FitDiagnostics diag{phi.rdim(),
                        eig.eigenvalues[eig.eigenvalues.size() - 1] > 0.0
                            ? eig.eigenvalues[0] / eig.eigenvalues[eig.eigenvalues.size() - 1]
                            : std::numeric_limits<double>::infinity(),
                        relative_residual(P, Z, Y)};
    Regularizer reg;
    reg.kind = RegKind::Spectral;
    reg.rank = rank;
    reg.tau = tau;
    return RegressionModel{phi, std::move(Z), std::move(maps), reg, diag, std::move(samples)};
}

}  // namespace

RegressionModel fit_spectral_rank(const MTensor& phi, const Eigen::MatrixXd& Y, Eigen::Index rank,
                                  FeatureMapSet maps, Eigen::MatrixXd samples, bool jitter) {
    check_targets(phi, Y);
    return fit_spectral_impl(phi, Y, rank, 0.0, std::move(maps), std::move(samples), jitter);
}

RegressionModel fit_spectral_tau(const MTensor& phi, const Eigen::MatrixXd& Y, double tau,
                                 FeatureMapSet maps, Eigen::MatrixXd samples, bool jitter) {
    check_targets(phi, Y);
    if (tau < 0.0) throw std::invalid_argument("fit_spectral: tau must be >= 0");
    return fit_spectral_impl(phi, Y, 0, tau, std::move(maps), std::move(samples), jitter);
}

RegressionModel fit_ali(const MTensor& phi, const Eigen::MatrixXd& Y, double epsilon, AliMode mode,
                        FeatureMapSet maps, Eigen::MatrixXd samples) {
    check_targets(phi, Y);
    const ALIDecomposition D =
        mode == AliMode::Greedy ? greedy_ali(phi, epsilon) : optimal_ali(phi, epsilon);

    MTensor op = select_rows(phi, D.indices);
    Eigen::MatrixXd Yt(D.retained(), Y.cols());
    for (std::size_t l = 0; l < D.indices.size(); ++l)
        Yt.row(static_cast<Eigen::Index>(l)) = Y.row(D.indices[l]);
    Eigen::MatrixXd Z = solve_spd(D.factor, Yt);

    // training residual over the full sample set
    const Eigen::MatrixXd K = mprod(phi, op);
    FitDiagnostics diag{D.retained(), diag_condition_proxy(D.factor), relative_residual(K, Z, Y)};

    Eigen::MatrixXd kept_samples;
    if (samples.size() > 0) {
        kept_samples.resize(D.retained(), samples.cols());
        for (std::size_t l = 0; l < D.indices.size(); ++l)
            kept_samples.row(static_cast<Eigen::Index>(l)) = samples.row(D.indices[l]);
    }
    Regularizer reg;
    reg.kind = RegKind::Ali;
    reg.epsilon = epsilon;
    reg.ali_mode = mode;
    return RegressionModel{std::move(op), std::move(Z), std::move(maps), reg, diag,
                           std::move(kept_samples)};
}

Eigen::VectorXd predict(const RegressionModel& M, const Eigen::VectorXd& x) {
    const Eigen::VectorXd k = mprod_row(feature_row(x, M.maps), M.op);
    return M.dual.transpose() * k;
}

double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                   const FeatureMapSet& maps) {
    double prod = 1.0;
    for (const auto& e : maps.entries) {
        if (e.axis >= x.size() || e.axis >= x2.size())
            throw DimensionError("kernel_eval: sample too short for axis " + std::to_string(e.axis));
        prod *= eval_basis(e.basis, x[e.axis], maps.scale)
                    .dot(eval_basis(e.basis, x2[e.axis], maps.scale));
    }
    return prod;
}

DenseTensor coefficients_dense(const RegressionModel& M, Eigen::Index cap) {
    if (M.dual.cols() != 1)
        throw std::invalid_argument("coefficients_dense: single-output models only");
    // scale the first core's rows by the dual weights, then sum over rows
    std::vector<Eigen::MatrixXd> cores = M.op.cores();
    cores[0] = M.dual.col(0).asDiagonal() * cores[0];
    return contract_c(MTensor(std::move(cores)), cap);
}

}  // namespace mt
