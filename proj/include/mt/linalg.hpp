#pragma once

#include <Eigen/Dense>

#include "mt/errors.hpp"

namespace mt {

/// Lower-triangular Cholesky factor of an SPD matrix, growable one row at a
/// time. Immutable: append returns a new factor.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    Eigen::Index size() const { return L_.rows(); }
    const Eigen::MatrixXd& lower() const { return L_; }
    /// True when the factorization only succeeded after a diagonal jitter.
    bool jittered() const { return jittered_; }

    static CholeskyFactor from_lower(Eigen::MatrixXd L, bool jittered = false);

private:
    Eigen::MatrixXd L_;
    bool jittered_ = false;
};

/// Factor a symmetric positive definite matrix. With allow_jitter, one retry
/// is made after adding delta * trace(P)/dim to the diagonal (delta = 1e-12)
/// and the returned factor carries the jittered flag.
CholeskyFactor cholesky(const Eigen::MatrixXd& P, bool allow_jitter = false);

/// Extend a factor by one row/column of the underlying Gram matrix:
/// b holds the cross inner products, nrm2 the new diagonal entry.
CholeskyFactor chol_append(const CholeskyFactor& F, const Eigen::VectorXd& b, double nrm2);

/// Solve L s = y.
Eigen::VectorXd forward_solve(const CholeskyFactor& F, const Eigen::VectorXd& y);

/// Solve L^T w = s.
Eigen::VectorXd backward_solve(const CholeskyFactor& F, const Eigen::VectorXd& s);

/// Solve L L^T z = Y (multi-column right-hand sides allowed).
Eigen::MatrixXd solve_spd(const CholeskyFactor& F, const Eigen::MatrixXd& Y);

struct SymEig {
    Eigen::VectorXd eigenvalues;   // sorted descending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
};

/// Symmetric eigendecomposition, eigenvalues descending.
SymEig sym_eig(const Eigen::MatrixXd& P, double symmetry_tol = 1e-9);

}  // namespace mt
