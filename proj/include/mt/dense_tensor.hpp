#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mt {

/// Dense multiway array, flat storage with the first index varying slowest.
struct DenseTensor {
    std::vector<Eigen::Index> shape;
    Eigen::VectorXd data;

    Eigen::Index size() const { return data.size(); }
    Eigen::Index order() const { return static_cast<Eigen::Index>(shape.size()); }

    // strides[j] = product of extents after axis j
    std::vector<Eigen::Index> strides() const {
        std::vector<Eigen::Index> s(shape.size(), 1);
        for (int j = static_cast<int>(shape.size()) - 2; j >= 0; --j)
            s[j] = s[j + 1] * shape[j + 1];
        return s;
    }

    double operator()(const std::vector<Eigen::Index>& idx) const {
        const auto str = strides();
        Eigen::Index flat = 0;
        for (std::size_t j = 0; j < idx.size(); ++j) flat += idx[j] * str[j];
        return data[flat];
    }
};

/// Default cap on dense materializations (number of entries).
inline constexpr Eigen::Index kDefaultDenseCap = 1'000'000;

}  // namespace mt
