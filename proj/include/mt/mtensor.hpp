#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mt/dense_tensor.hpp"
#include "mt/errors.hpp"

namespace mt {

/// One row of an m-tensor: the rank-1 tensor built from one row of each core.
struct Rank1Row {
    std::vector<Eigen::VectorXd> factors;

    Eigen::Index order() const { return static_cast<Eigen::Index>(factors.size()); }
};

/// Factorized operator stored as an ordered list of core matrices sharing a
/// row count. Row k represents the rank-1 tensor product of the k-th rows of
/// all cores; the dense tensor is never formed.
class MTensor {
public:
    explicit MTensor(std::vector<Eigen::MatrixXd> cores);

    Eigen::Index rdim() const { return cores_[0].rows(); }
    Eigen::Index order() const { return static_cast<Eigen::Index>(cores_.size()); }
    const std::vector<Eigen::Index>& cdims() const { return cdims_; }
    const Eigen::MatrixXd& core(Eigen::Index j) const { return cores_[static_cast<std::size_t>(j)]; }
    const std::vector<Eigen::MatrixXd>& cores() const { return cores_; }
    bool is_transposed() const { return transposed_; }

    /// Axis-reversal role marker. No data moves; multi-index arguments to
    /// element() are interpreted in reverse axis order when the flag is set.
    MTensor transpose() const;

    /// Total dense size, saturating instead of overflowing.
    Eigen::Index dense_size() const;

private:
    std::vector<Eigen::MatrixXd> cores_;
    std::vector<Eigen::Index> cdims_;
    bool transposed_ = false;
};

MTensor mtensor_from_cores(std::vector<Eigen::MatrixXd> cores);

double element(const MTensor& T, Eigen::Index k, const std::vector<Eigen::Index>& idx);

Rank1Row row(const MTensor& T, Eigen::Index k);

/// Sum over all column axes; entry k is the product of the row sums of the
/// cores at row k. O(m n p), never materializes.
Eigen::VectorXd contract_r(const MTensor& T);

/// Sum over the row axis, producing the dense p_1 x ... x p_n tensor.
/// O(m p^n) by construction; guarded by the materialization cap.
DenseTensor contract_c(const MTensor& T, Eigen::Index cap = kDefaultDenseCap);

/// General dense contraction: sums out the selected axes.
DenseTensor contract_general(const DenseTensor& T, const std::vector<Eigen::Index>& axes);

MTensor hadamard(const MTensor& A, const MTensor& B);

double inner(const MTensor& A, const MTensor& B);

double norm(const MTensor& T);

/// m-product A x B^T: Hadamard product of per-core Gram matrices.
/// Entry (k,l) equals the dense inner product of row k of A and row l of B.
Eigen::MatrixXd mprod(const MTensor& A, const MTensor& B);

/// One row of an m-product: entry l = prod_j <factor_j, row l of B's core j>.
Eigen::VectorXd mprod_row(const Rank1Row& r, const MTensor& B);

/// Mode-1 unfolding (face-splitting product of the cores), i_1 slowest.
Eigen::MatrixXd unfold_mode1(const MTensor& T, Eigen::Index cap = kDefaultDenseCap);

}  // namespace mt
