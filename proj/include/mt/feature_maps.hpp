#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mt/mtensor.hpp"

namespace mt {

/// Family of p one-dimensional basis functions.
class Basis1D {
public:
    enum class Kind { Monomial, TrigSin, TrigCos, Custom };

    /// [1, x, x^2, ..., x^d]
    static Basis1D monomial(int degree);
    /// [1, sin(x)]
    static Basis1D trig_sin();
    /// [1, cos(x)]
    static Basis1D trig_cos();
    static Basis1D custom(std::vector<std::function<double(double)>> funcs);

    Kind kind() const { return kind_; }
    int degree() const { return degree_; }
    Eigen::Index size() const { return size_; }

    Eigen::VectorXd eval(double x) const;

private:
    Kind kind_ = Kind::Monomial;
    int degree_ = 0;
    Eigen::Index size_ = 1;
    std::vector<std::function<double(double)>> funcs_;
};

/// psi(scale * x)
Eigen::VectorXd eval_basis(const Basis1D& b, double x, double scale);

struct MapEntry {
    int axis;       // index into the input vector; may repeat across entries
    Basis1D basis;
};

/// Per-core basis descriptors plus the input pre-multiplier. One entry per
/// core of the resulting m-tensor.
struct FeatureMapSet {
    std::vector<MapEntry> entries;
    double scale = 1.0;

    Eigen::Index order() const { return static_cast<Eigen::Index>(entries.size()); }
};

/// Input scale used by the experiments: 1 below dimension 10, 1e-7 from 10 up.
double default_scale(int n);

/// One core per map entry; core row k = basis evaluated at samples(k, axis).
MTensor build_cores(const Eigen::MatrixXd& samples, const FeatureMapSet& maps);

/// The rank-1 feature row of a single sample.
Rank1Row feature_row(const Eigen::VectorXd& x, const FeatureMapSet& maps);

/// Same basis on every axis: "monomial:<d>" or "trig" (sin and cos cores,
/// 2n entries). Throws std::invalid_argument on an unknown spec.
FeatureMapSet make_maps(int n, const std::string& basis_spec, double scale);

}  // namespace mt
