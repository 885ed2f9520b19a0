#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mt/errors.hpp"
#include "mt/feature_maps.hpp"
#include "mt/mtensor.hpp"

using namespace mt;

TEST_CASE("monomial basis evaluates [1, x, ..., x^d]") {
    const Basis1D b = Basis1D::monomial(2);
    CHECK(b.size() == 3);
    CHECK(eval_basis(b, -1.0, 1.0) == Eigen::Vector3d(1, -1, 1));
    CHECK(eval_basis(b, 0.0, 1.0) == Eigen::Vector3d(1, 0, 0));
    // scale applies to the input
    CHECK(eval_basis(Basis1D::monomial(1), 2.0, 0.5) == Eigen::Vector2d(1, 1));
}

TEST_CASE("monomial scale homogeneity is exact") {
    const Basis1D b = Basis1D::monomial(4);
    for (const double x : {-2.0, 0.3, 7.5}) {
        for (const double s : {1e-7, 0.02, 1.0, 3.0}) {
            CHECK(eval_basis(b, x, s) == eval_basis(b, s * x, 1.0));
        }
    }
}

TEST_CASE("affine trig bases") {
    CHECK(eval_basis(Basis1D::trig_sin(), 0.0, 1.0) == Eigen::Vector2d(1, 0));
    CHECK(eval_basis(Basis1D::trig_cos(), 0.0, 1.0) == Eigen::Vector2d(1, 1));
    const Eigen::VectorXd s = eval_basis(Basis1D::trig_sin(), M_PI / 2, 1.0);
    CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("custom basis wraps arbitrary functions") {
    const Basis1D b = Basis1D::custom({[](double x) { return std::exp(x); },
                                       [](double x) { return 2 * x; }});
    const Eigen::VectorXd v = eval_basis(b, 1.0, 1.0);
    CHECK(v[0] == doctest::Approx(std::exp(1.0)));
    CHECK(v[1] == doctest::Approx(2.0));
}

TEST_CASE("large inputs under a tiny scale stay finite") {
    const Eigen::VectorXd v = eval_basis(Basis1D::monomial(4), 1e9, 1e-7);
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::isfinite(v[i]));
}

TEST_CASE("build_cores reproduces the worked example cores") {
    Eigen::MatrixXd X(3, 2);
    X << -1, -1, 0, 1, 1, 0;
    const FeatureMapSet maps = make_maps(2, "monomial:2", 1.0);
    const MTensor phi = build_cores(X, maps);
    Eigen::MatrixXd p1(3, 3), p2(3, 3);
    p1 << 1, -1, 1, 1, 0, 0, 1, 1, 1;
    p2 << 1, -1, 1, 1, 1, 1, 1, 0, 0;
    CHECK(phi.core(0) == p1);
    CHECK(phi.core(1) == p2);
}

TEST_CASE("build_cores single sample equals feature_row") {
    Eigen::MatrixXd X(1, 3);
    X << 0.5, -2.0, 1.5;
    const FeatureMapSet maps = make_maps(3, "monomial:3", 0.7);
    const MTensor phi = build_cores(X, maps);
    const Rank1Row r = feature_row(X.row(0).transpose(), maps);
    CHECK(phi.rdim() == 1);
    for (Eigen::Index j = 0; j < phi.order(); ++j)
        CHECK(Eigen::VectorXd(phi.core(j).row(0).transpose()) ==
              r.factors[static_cast<std::size_t>(j)]);
}

TEST_CASE("build_cores rejects out-of-range axes") {
    FeatureMapSet maps;
    maps.entries.push_back({5, Basis1D::monomial(1)});
    CHECK_THROWS_AS(build_cores(Eigen::MatrixXd::Ones(2, 2), maps), IndexError);
}

TEST_CASE("trig map spec yields 2n width-2 cores") {
    const FeatureMapSet maps = make_maps(2, "trig", 1.0);
    CHECK(maps.order() == 4);
    const Rank1Row r = feature_row(Eigen::Vector2d(0, 0), maps);
    REQUIRE(r.order() == 4);
    CHECK(r.factors[0] == Eigen::Vector2d(1, 0));
    CHECK(r.factors[1] == Eigen::Vector2d(1, 1));
    CHECK(r.factors[2] == Eigen::Vector2d(1, 0));
    CHECK(r.factors[3] == Eigen::Vector2d(1, 1));

    const MTensor phi = build_cores(Eigen::MatrixXd::Zero(5, 2), maps);
    CHECK(phi.order() == 4);
    CHECK(phi.cdims() == std::vector<Eigen::Index>{2, 2, 2, 2});
}

TEST_CASE("feature_row reproduces the worked example row") {
    const FeatureMapSet maps = make_maps(2, "monomial:2", 1.0);
    const Rank1Row r = feature_row(Eigen::Vector2d(0, 1), maps);
    CHECK(r.factors[0] == Eigen::Vector3d(1, 0, 0));
    CHECK(r.factors[1] == Eigen::Vector3d(1, 1, 1));

    CHECK_THROWS_AS(feature_row(Eigen::VectorXd::Ones(1), maps), IndexError);
}

TEST_CASE("build_cores rows equal feature_row factor for factor") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(6, 3) * 4.0;
    const FeatureMapSet maps = make_maps(3, "monomial:2", 0.3);
    const MTensor phi = build_cores(X, maps);
    for (Eigen::Index k = 0; k < 6; ++k) {
        const Rank1Row r = feature_row(X.row(k).transpose(), maps);
        for (Eigen::Index j = 0; j < phi.order(); ++j)
            CHECK(Eigen::VectorXd(phi.core(j).row(k).transpose()) ==
                  r.factors[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("default_scale switches at dimension 10") {
    CHECK(default_scale(3) == 1.0);
    CHECK(default_scale(9) == 1.0);
    CHECK(default_scale(10) == 1e-7);
    CHECK(default_scale(100) == 1e-7);
}

TEST_CASE("make_maps rejects unknown specs") {
    CHECK_THROWS_AS(make_maps(2, "chebyshev:3", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_maps(2, "monomial", 1.0), std::invalid_argument);
}
