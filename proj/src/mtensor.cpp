#include "mt/mtensor.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mt {

namespace {

void check_same_shape(const MTensor& A, const MTensor& B) {
    if (A.order() != B.order())
        throw DimensionError("m-tensor order mismatch: " + std::to_string(A.order()) +
                             " vs " + std::to_string(B.order()));
    if (A.rdim() != B.rdim())
        throw DimensionError("m-tensor rdim mismatch: " + std::to_string(A.rdim()) +
                             " vs " + std::to_string(B.rdim()));
    if (A.cdims() != B.cdims()) throw DimensionError("m-tensor cdims mismatch");
}

}  // namespace

MTensor::MTensor(std::vector<Eigen::MatrixXd> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw std::invalid_argument("m-tensor needs at least one core");
    const Eigen::Index m = cores_[0].rows();
    cdims_.reserve(cores_.size());
    for (const auto& c : cores_) {
        if (c.rows() == 0 || c.cols() == 0)
            throw std::invalid_argument("m-tensor cores must be non-empty");
        if (c.rows() != m)
            throw DimensionError("m-tensor cores must share a row count: " +
                                 std::to_string(c.rows()) + " vs " + std::to_string(m));
        cdims_.push_back(c.cols());
    }
}

MTensor MTensor::transpose() const {
    MTensor t(*this);
    t.transposed_ = !t.transposed_;
    return t;
}

Eigen::Index MTensor::dense_size() const {
    Eigen::Index total = rdim();
    for (Eigen::Index p : cdims_) {
        if (total > std::numeric_limits<Eigen::Index>::max() / p)
            return std::numeric_limits<Eigen::Index>::max();
        total *= p;
    }
    return total;
}

MTensor mtensor_from_cores(std::vector<Eigen::MatrixXd> cores) {
    return MTensor(std::move(cores));
}

double element(const MTensor& T, Eigen::Index k, const std::vector<Eigen::Index>& idx) {
    if (k < 0 || k >= T.rdim()) throw IndexError("row index out of range");
    if (static_cast<Eigen::Index>(idx.size()) != T.order())
        throw IndexError("multi-index order mismatch");
    double prod = 1.0;
    const Eigen::Index n = T.order();
    for (Eigen::Index j = 0; j < n; ++j) {
        // a transposed m-tensor reads the multi-index in reverse axis order
        const Eigen::Index ij = T.is_transposed() ? idx[static_cast<std::size_t>(n - 1 - j)]
                                                  : idx[static_cast<std::size_t>(j)];
        if (ij < 0 || ij >= T.cdims()[static_cast<std::size_t>(j)])
            throw IndexError("column index out of range on axis " + std::to_string(j));
        prod *= T.core(j)(k, ij);
    }
    return prod;
}

Rank1Row row(const MTensor& T, Eigen::Index k) {
    if (k < 0 || k >= T.rdim()) throw IndexError("row index out of range");
    Rank1Row r;
    r.factors.reserve(static_cast<std::size_t>(T.order()));
    for (Eigen::Index j = 0; j < T.order(); ++j)
        r.factors.push_back(T.core(j).row(k).transpose());
    return r;
}

Eigen::VectorXd contract_r(const MTensor& T) {
    Eigen::VectorXd out = Eigen::VectorXd::Ones(T.rdim());
    for (Eigen::Index j = 0; j < T.order(); ++j)
        out.array() *= T.core(j).rowwise().sum().array();
    return out;
}

DenseTensor contract_c(const MTensor& T, Eigen::Index cap) {
    Eigen::Index total = 1;
    for (Eigen::Index p : T.cdims()) total *= p;
    if (total > cap)
        throw CapacityError("c-dim contraction of " + std::to_string(total) +
                            " entries exceeds cap " + std::to_string(cap));
    DenseTensor out;
    out.shape = T.cdims();
    out.data = Eigen::VectorXd::Zero(total);
    for (Eigen::Index k = 0; k < T.rdim(); ++k) {
        // accumulate the Kronecker product of the k-th rows, i_1 slowest
        Eigen::VectorXd acc = Eigen::VectorXd::Ones(1);
        for (Eigen::Index j = 0; j < T.order(); ++j) {
            const auto r = T.core(j).row(k);
            Eigen::VectorXd next(acc.size() * r.size());
            for (Eigen::Index a = 0; a < acc.size(); ++a)
                next.segment(a * r.size(), r.size()) = acc[a] * r.transpose();
            acc.swap(next);
        }
        out.data += acc;
    }
    return out;
}

DenseTensor contract_general(const DenseTensor& T, const std::vector<Eigen::Index>& axes) {
    const Eigen::Index n = T.order();
    std::vector<bool> summed(static_cast<std::size_t>(n), false);
    for (Eigen::Index a : axes) {
        if (a < 0 || a >= n) throw IndexError("contraction axis out of range");
        summed[static_cast<std::size_t>(a)] = true;
    }
    DenseTensor out;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!summed[static_cast<std::size_t>(j)]) out.shape.push_back(T.shape[static_cast<std::size_t>(j)]);
    Eigen::Index out_size = 1;
    for (Eigen::Index p : out.shape) out_size *= p;
    out.data = Eigen::VectorXd::Zero(out_size);

    const auto str = T.strides();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n), 0);
    for (Eigen::Index flat = 0; flat < T.size(); ++flat) {
        Eigen::Index rem = flat;
        for (Eigen::Index j = 0; j < n; ++j) {
            idx[static_cast<std::size_t>(j)] = rem / str[static_cast<std::size_t>(j)];
            rem %= str[static_cast<std::size_t>(j)];
        }
        Eigen::Index oflat = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (summed[static_cast<std::size_t>(j)]) continue;
            oflat = oflat * T.shape[static_cast<std::size_t>(j)] + idx[static_cast<std::size_t>(j)];
        }
        out.data[oflat] += T.data[flat];
    }
    return out;
}

MTensor hadamard(const MTensor& A, const MTensor& B) {
    check_same_shape(A, B);
    std::vector<Eigen::MatrixXd> cores;
    cores.reserve(static_cast<std::size_t>(A.order()));
    for (Eigen::Index j = 0; j < A.order(); ++j)
        cores.push_back(A.core(j).cwiseProduct(B.core(j)));
    return MTensor(std::move(cores));
}

double inner(const MTensor& A, const MTensor& B) {
    check_same_shape(A, B);
    double total = 0.0;
    for (Eigen::Index k = 0; k < A.rdim(); ++k) {
        double prod = 1.0;
        for (Eigen::Index j = 0; j < A.order(); ++j)
            prod *= A.core(j).row(k).dot(B.core(j).row(k));
        total += prod;
    }
    return total;
}

double norm(const MTensor& T) { return std::sqrt(inner(T, T)); }

Eigen::MatrixXd mprod(const MTensor& A, const MTensor& B) {
    if (A.order() != B.order() || A.cdims() != B.cdims())
        throw DimensionError("m-product requires equal cdims and order");
    Eigen::MatrixXd out = Eigen::MatrixXd::Ones(A.rdim(), B.rdim());
    for (Eigen::Index j = 0; j < A.order(); ++j)
        out.array() *= (A.core(j) * B.core(j).transpose()).array();
    return out;
}

Eigen::VectorXd mprod_row(const Rank1Row& r, const MTensor& B) {
    if (r.order() != B.order()) throw DimensionError("m-product row: order mismatch");
    for (Eigen::Index j = 0; j < B.order(); ++j)
        if (r.factors[static_cast<std::size_t>(j)].size() != B.cdims()[static_cast<std::size_t>(j)])
            throw DimensionError("m-product row: factor length mismatch on axis " + std::to_string(j));
    Eigen::VectorXd out = Eigen::VectorXd::Ones(B.rdim());
    for (Eigen::Index j = 0; j < B.order(); ++j)
        out.array() *= (B.core(j) * r.factors[static_cast<std::size_t>(j)]).array();
    return out;
}

Eigen::MatrixXd unfold_mode1(const MTensor& T, Eigen::Index cap) {
    Eigen::Index cols = 1;
    for (Eigen::Index p : T.cdims()) cols *= p;
    if (T.rdim() * cols > cap)
        throw CapacityError("mode-1 unfolding of " + std::to_string(T.rdim() * cols) +
                            " entries exceeds cap " + std::to_string(cap));
    Eigen::MatrixXd out(T.rdim(), cols);
    for (Eigen::Index k = 0; k < T.rdim(); ++k) {
        Eigen::VectorXd acc = Eigen::VectorXd::Ones(1);
        for (Eigen::Index j = 0; j < T.order(); ++j) {
            const auto r = T.core(j).row(k);
            Eigen::VectorXd next(acc.size() * r.size());
            for (Eigen::Index a = 0; a < acc.size(); ++a)
                next.segment(a * r.size(), r.size()) = acc[a] * r.transpose();
            acc.swap(next);
        }
        out.row(k) = acc.transpose();
    }
    return out;
}

}  // namespace mt
