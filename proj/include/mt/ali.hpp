#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mt/linalg.hpp"
#include "mt/mtensor.hpp"

namespace mt {

/// Almost-Linearly-Independent row subset of an m-tensor.
struct ALIDecomposition {
    std::vector<Eigen::Index> indices;            // retained rows, in selection order
    CholeskyFactor factor;                        // Cholesky of the reduced Gram matrix
    Eigen::MatrixXd weights;                      // m x m_tilde, empty unless requested
    double epsilon = 0.0;
    std::vector<Eigen::Index> degenerate_rejections;  // rows rejected on a failed append

    Eigen::Index retained() const { return static_cast<Eigen::Index>(indices.size()); }
};

struct AldResult {
    double delta;       // squared distance to the retained span, clamped at 0
    Eigen::VectorXd s;  // forward-substitution intermediate, reused by appends
};

/// Distance of a candidate row to the span of the retained rows.
/// b = cross inner products with the retained rows, nrm2 = squared row norm.
/// Empty factor convention: delta = nrm2.
AldResult ald_distance(const CholeskyFactor& F, const Eigen::VectorXd& b, double nrm2);

/// Single-pass streaming selection: row 0 always retained, row k retained iff
/// its distance to the current span exceeds epsilon.
ALIDecomposition greedy_ali(const MTensor& phi, double epsilon, bool want_weights = false);

/// Iterative selection minimizing the column sums of exact distances to each
/// candidate-augmented subspace. use_shortcut_scores switches to the cheaper
/// diag(n)*ones - S^T S scoring matrix.
ALIDecomposition optimal_ali(const MTensor& phi, double epsilon,
                             bool use_shortcut_scores = false);

/// W = (phi x phi_tilde^T) P_tilde^{-1}; row k holds the projection weights
/// of row k of phi onto the retained rows.
Eigen::MatrixXd ali_weights(const ALIDecomposition& D, const MTensor& phi);

/// Mean squared projection residual of all rows onto the retained span.
double projection_mse(const ALIDecomposition& D, const MTensor& phi);

}  // namespace mt
