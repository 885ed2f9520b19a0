#include "mt/dense_oracle.hpp"

#include <string>

#include "mt/errors.hpp"

namespace mt::oracle {

DenseTensor materialize(const MTensor& T, Eigen::Index cap) {
    const Eigen::Index total = T.dense_size();
    if (total > cap)
        throw CapacityError("materialization of " + std::to_string(total) +
                            " entries exceeds cap " + std::to_string(cap));
    DenseTensor out;
    out.shape.push_back(T.rdim());
    for (Eigen::Index p : T.cdims()) out.shape.push_back(p);
    out.data.resize(total);

    const Eigen::Index n = T.order();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n), 0);
    Eigen::Index flat = 0;
    for (Eigen::Index k = 0; k < T.rdim(); ++k) {
        std::fill(idx.begin(), idx.end(), 0);
        bool done = false;
        while (!done) {
            double prod = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                prod *= T.core(j)(k, idx[static_cast<std::size_t>(j)]);
            out.data[flat++] = prod;
            // odometer over the multi-index, last axis fastest
            done = true;
            for (Eigen::Index j = n - 1; j >= 0; --j) {
                if (++idx[static_cast<std::size_t>(j)] < T.cdims()[static_cast<std::size_t>(j)]) {
                    done = false;
                    break;
                }
                idx[static_cast<std::size_t>(j)] = 0;
            }
        }
    }
    return out;
}

Eigen::MatrixXd face_splitting(const std::vector<Eigen::MatrixXd>& cores, Eigen::Index cap) {
    if (cores.empty()) throw std::invalid_argument("face_splitting: no cores");
    const Eigen::Index m = cores[0].rows();
    Eigen::Index cols = 1;
    for (const auto& c : cores) {
        if (c.rows() != m) throw DimensionError("face_splitting: row counts differ");
        cols *= c.cols();
    }
    if (m * cols > cap)
        throw CapacityError("face_splitting of " + std::to_string(m * cols) +
                            " entries exceeds cap " + std::to_string(cap));
    Eigen::MatrixXd out(m, cols);
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Ones(1);
        for (const auto& c : cores) {
            Eigen::RowVectorXd next(acc.size() * c.cols());
            for (Eigen::Index a = 0; a < acc.size(); ++a)
                for (Eigen::Index b = 0; b < c.cols(); ++b)
                    next[a * c.cols() + b] = acc[a] * c(k, b);
            acc.swap(next);
        }
        out.row(k) = acc;
    }
    return out;
}

Eigen::VectorXd dense_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    if (A.rows() != y.size()) throw DimensionError("dense_lstsq: size mismatch");
    if (A.rows() <= A.cols()) {
        // independent rows: c = A^T (A A^T)^{-1} y
        Eigen::MatrixXd G = A * A.transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
        if (!lu.isInvertible())
            throw NotPositiveDefiniteError("dense_lstsq: singular row Gram matrix");
        return A.transpose() * lu.solve(y);
    }
    // independent columns: c = (A^T A)^{-1} A^T y
    Eigen::MatrixXd G = A.transpose() * A;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible())
        throw NotPositiveDefiniteError("dense_lstsq: singular column Gram matrix");
    return lu.solve(A.transpose() * y);
}

}  // namespace mt::oracle
