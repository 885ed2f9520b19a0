#include "mt/feature_maps.hpp"

#include <cmath>
#include <stdexcept>

namespace mt {

Basis1D Basis1D::monomial(int degree) {
    if (degree < 0) throw std::invalid_argument("monomial basis needs degree >= 0");
    Basis1D b;
    b.kind_ = Kind::Monomial;
    b.degree_ = degree;
    b.size_ = degree + 1;
    return b;
}

Basis1D Basis1D::trig_sin() {
    Basis1D b;
    b.kind_ = Kind::TrigSin;
    b.size_ = 2;
    return b;
}

Basis1D Basis1D::trig_cos() {
    Basis1D b;
    b.kind_ = Kind::TrigCos;
    b.size_ = 2;
    return b;
}

Basis1D Basis1D::custom(std::vector<std::function<double(double)>> funcs) {
    if (funcs.empty()) throw std::invalid_argument("custom basis needs at least one function");
    Basis1D b;
    b.kind_ = Kind::Custom;
    b.size_ = static_cast<Eigen::Index>(funcs.size());
    b.funcs_ = std::move(funcs);
    return b;
}

Eigen::VectorXd Basis1D::eval(double x) const {
    Eigen::VectorXd v(size_);
    switch (kind_) {
        case Kind::Monomial: {
            double p = 1.0;
            for (Eigen::Index i = 0; i < size_; ++i) {
                v[i] = p;
                p *= x;
            }
            break;
        }
        case Kind::TrigSin:
            v[0] = 1.0;
            v[1] = std::sin(x);
            break;
        case Kind::TrigCos:
            v[0] = 1.0;
            v[1] = std::cos(x);
            break;
        case Kind::Custom:
            for (Eigen::Index i = 0; i < size_; ++i) v[i] = funcs_[static_cast<std::size_t>(i)](x);
            break;
    }
    return v;
}

Eigen::VectorXd eval_basis(const Basis1D& b, double x, double scale) {
    return b.eval(scale * x);
}

double default_scale(int n) {
    if (n < 1) throw std::invalid_argument("default_scale: dimension must be >= 1");
    return n < 10 ? 1.0 : 1e-7;
}

MTensor build_cores(const Eigen::MatrixXd& samples, const FeatureMapSet& maps) {
    if (samples.rows() < 1) throw std::invalid_argument("build_cores: need at least one sample");
    if (maps.entries.empty()) throw std::invalid_argument("build_cores: empty map set");
    std::vector<Eigen::MatrixXd> cores;
    cores.reserve(maps.entries.size());
    for (const auto& e : maps.entries) {
        if (e.axis < 0 || e.axis >= samples.cols())
            throw IndexError("build_cores: axis " + std::to_string(e.axis) + " out of range");
        Eigen::MatrixXd core(samples.rows(), e.basis.size());
        for (Eigen::Index k = 0; k < samples.rows(); ++k)
            core.row(k) = eval_basis(e.basis, samples(k, e.axis), maps.scale).transpose();
        cores.push_back(std::move(core));
    }
    return MTensor(std::move(cores));
}

Rank1Row feature_row(const Eigen::VectorXd& x, const FeatureMapSet& maps) {
    Rank1Row r;
    r.factors.reserve(maps.entries.size());
    for (const auto& e : maps.entries) {
        if (e.axis < 0 || e.axis >= x.size())
            throw IndexError("feature_row: axis " + std::to_string(e.axis) + " out of range");
        r.factors.push_back(eval_basis(e.basis, x[e.axis], maps.scale));
    }
    return r;
}

FeatureMapSet make_maps(int n, const std::string& basis_spec, double scale) {
    if (n < 1) throw std::invalid_argument("make_maps: dimension must be >= 1");
    if (scale <= 0.0) throw std::invalid_argument("make_maps: scale must be positive");
    FeatureMapSet maps;
    maps.scale = scale;
    if (basis_spec.rfind("monomial:", 0) == 0) {
        const int degree = std::stoi(basis_spec.substr(9));
        for (int i = 0; i < n; ++i) maps.entries.push_back({i, Basis1D::monomial(degree)});
    } else if (basis_spec == "trig") {
        for (int i = 0; i < n; ++i) {
            maps.entries.push_back({i, Basis1D::trig_sin()});
            maps.entries.push_back({i, Basis1D::trig_cos()});
        }
    } else {
        throw std::invalid_argument("make_maps: unknown basis spec '" + basis_spec + "'");
    }
    return maps;
}

}  // namespace mt
