#pragma once

#include <Eigen/Dense>

#include "mt/dense_tensor.hpp"
#include "mt/mtensor.hpp"

// Brute-force dense counterparts of the factorized operations. These are the
// ground truth for property tests; they deliberately share no code with the
// fast path.
namespace mt::oracle {

/// Entry-for-entry dense materialization of an m-tensor, row axis first.
DenseTensor materialize(const MTensor& T, Eigen::Index cap = kDefaultDenseCap);

/// Face-splitting product: row k is the Kronecker product of the k-th rows.
Eigen::MatrixXd face_splitting(const std::vector<Eigen::MatrixXd>& cores,
                               Eigen::Index cap = kDefaultDenseCap);

/// Minimum-norm least squares through the explicit pseudoinverse branch:
/// independent rows when A is wide, independent columns when tall.
Eigen::VectorXd dense_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

}  // namespace mt::oracle
