#include "mt/linalg.hpp"

#include <cmath>
#include <string>

namespace mt {

namespace {

// In-place lower Cholesky. Returns the failed pivot index, or -1 on success.
int cholesky_in_place(Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = A(j, j) - A.row(j).head(j).squaredNorm();
        if (d <= 0.0) return static_cast<int>(j);
        d = std::sqrt(d);
        A(j, j) = d;
        if (j + 1 < n) {
            A.col(j).tail(n - j - 1) =
                (A.col(j).tail(n - j - 1) -
                 A.bottomLeftCorner(n - j - 1, j) * A.row(j).head(j).transpose()) /
                d;
        }
    }
    A.triangularView<Eigen::StrictlyUpper>().setZero();
    return -1;
}

}  // namespace

CholeskyFactor CholeskyFactor::from_lower(Eigen::MatrixXd L, bool jittered) {
    CholeskyFactor f;
    f.L_ = std::move(L);
    f.jittered_ = jittered;
    return f;
}

CholeskyFactor cholesky(const Eigen::MatrixXd& P, bool allow_jitter) {
    if (P.rows() != P.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const double scale = P.cwiseAbs().maxCoeff();
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1.0))
        throw std::invalid_argument("cholesky: matrix not symmetric");

    Eigen::MatrixXd L = P;
    int pivot = cholesky_in_place(L);
    if (pivot < 0) return CholeskyFactor::from_lower(std::move(L));

    if (allow_jitter) {
        const double jitter = 1e-12 * P.trace() / static_cast<double>(P.rows());
        L = P + jitter * Eigen::MatrixXd::Identity(P.rows(), P.cols());
        pivot = cholesky_in_place(L);
        if (pivot < 0) return CholeskyFactor::from_lower(std::move(L), /*jittered=*/true);
    }
    throw NotPositiveDefiniteError(
        "cholesky: matrix not positive definite (pivot " + std::to_string(pivot) + ")", pivot);
}

CholeskyFactor chol_append(const CholeskyFactor& F, const Eigen::VectorXd& b, double nrm2) {
    const Eigen::Index k = F.size();
    if (b.size() != k) throw DimensionError("chol_append: vector length mismatch");
    Eigen::VectorXd s = k > 0 ? forward_solve(F, b) : Eigen::VectorXd();
    const double schur = nrm2 - s.squaredNorm();
    if (schur <= 0.0)
        throw DegenerateAppendError("chol_append: nonpositive Schur complement " +
                                    std::to_string(schur));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k + 1, k + 1);
    L.topLeftCorner(k, k) = F.lower();
    L.row(k).head(k) = s.transpose();
    L(k, k) = std::sqrt(schur);
    return CholeskyFactor::from_lower(std::move(L), F.jittered());
}

Eigen::VectorXd forward_solve(const CholeskyFactor& F, const Eigen::VectorXd& y) {
    if (y.size() != F.size()) throw DimensionError("forward_solve: size mismatch");
    return F.lower().triangularView<Eigen::Lower>().solve(y);
}

Eigen::VectorXd backward_solve(const CholeskyFactor& F, const Eigen::VectorXd& s) {
    if (s.size() != F.size()) throw DimensionError("backward_solve: size mismatch");
    return F.lower().transpose().triangularView<Eigen::Upper>().solve(s);
}

Eigen::MatrixXd solve_spd(const CholeskyFactor& F, const Eigen::MatrixXd& Y) {
    if (Y.rows() != F.size()) throw DimensionError("solve_spd: size mismatch");
    Eigen::MatrixXd Z = F.lower().triangularView<Eigen::Lower>().solve(Y);
    return F.lower().transpose().triangularView<Eigen::Upper>().solve(Z);
}

SymEig sym_eig(const Eigen::MatrixXd& P, double symmetry_tol) {
    if (P.rows() != P.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    const double scale = std::max(P.cwiseAbs().maxCoeff(), 1.0);
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
        throw std::invalid_argument("sym_eig: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: solver failed");
    SymEig out;
    // Eigen sorts ascending; flip to descending
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    return out;
}

}  // namespace mt
