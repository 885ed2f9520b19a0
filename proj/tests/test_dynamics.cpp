#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "mt/dynamics.hpp"
#include "mt/errors.hpp"
#include "mt/feature_maps.hpp"
#include "mt/regression.hpp"

using namespace mt;

TEST_CASE("lorenz_rhs values") {
    CHECK(lorenz_rhs({0, 0, 0}, 10, 28, 2.667) == Eigen::Vector3d(0, 0, 0));

    const Eigen::Vector3d r = lorenz_rhs({0, 1, 1.05}, 10, 28, 2.667);
    CHECK(r[0] == doctest::Approx(10.0));
    CHECK(r[1] == doctest::Approx(-1.0));
    CHECK(r[2] == doctest::Approx(-2.80035));

    // analytic equilibrium
    const double beta = 2.667, rho = 28.0;
    const double c = std::sqrt(beta * (rho - 1));
    CHECK(lorenz_rhs({c, c, rho - 1}, 10, rho, beta).norm() <= 1e-9);
}

TEST_CASE("kuramoto_rhs values") {
    Eigen::VectorXd omega(3);
    omega << 1.0, -2.0, 0.5;
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(3, 0.7);
    CHECK((kuramoto_rhs(theta, omega, 2.0) - omega).norm() <= 1e-15);

    Eigen::VectorXd th2(2), om2 = Eigen::VectorXd::Zero(2);
    th2 << 0.0, M_PI / 2;
    const Eigen::VectorXd r = kuramoto_rhs(th2, om2, 2.0);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(-1.0));

    // antisymmetric coupling: sum of rhs equals sum of omega
    Eigen::VectorXd th3(3);
    th3 << 0.3, 2.4, -1.1;
    CHECK(kuramoto_rhs(th3, omega, 2.0).sum() == doctest::Approx(omega.sum()).epsilon(1e-12));

    CHECK_THROWS_AS(kuramoto_rhs(th2, omega, 2.0), DimensionError);
}

TEST_CASE("euler_integrate basics") {
    const RhsFn zero = [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); };
    const Trajectory c = euler_integrate(zero, Eigen::Vector2d(1, 2), 0.1, 5);
    CHECK(c.states.size() == 6);
    CHECK(c.states.back() == Eigen::VectorXd(Eigen::Vector2d(1, 2)));
    CHECK(c.dt == 0.1);

    // one Lorenz step
    const RhsFn lor = [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(lorenz_rhs(x, 10, 28, 2.667));
    };
    const Trajectory one = euler_integrate(lor, Eigen::Vector3d(0, 1, 1.05), 0.001, 1);
    CHECK(one.states[1][0] == doctest::Approx(0.01));
    CHECK(one.states[1][1] == doctest::Approx(0.999));
    CHECK(one.states[1][2] == doctest::Approx(1.0472).epsilon(1e-4));

    // linear decay closed form
    const RhsFn decay = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); };
    const Trajectory d = euler_integrate(decay, Eigen::VectorXd::Ones(1), 0.1, 10);
    CHECK(d.states.back()[0] == doctest::Approx(std::pow(0.9, 10)));

    CHECK_THROWS_AS(euler_integrate(zero, Eigen::Vector2d(1, 2), 0.0, 5), std::invalid_argument);
}

TEST_CASE("euler_integrate reports the diverging step") {
    const RhsFn blow = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x * 1e200); };
    try {
        euler_integrate(blow, Eigen::VectorXd::Ones(1), 1e200, 10);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.step_index >= 1);
    }
}

TEST_CASE("trajectory as_matrix stacks states as rows") {
    const RhsFn decay = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); };
    const Trajectory t = euler_integrate(decay, Eigen::Vector2d(1, 2), 0.5, 2);
    const Eigen::MatrixXd M = t.as_matrix();
    CHECK(M.rows() == 3);
    CHECK(M.cols() == 2);
    CHECK(M(0, 1) == 2.0);
    CHECK(M(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("assemble_derivative_data exact and finite-difference modes") {
    const SystemSpec sys{LorenzParams{}};
    const RhsFn rhs = [&sys](const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory t = euler_integrate(rhs, Eigen::Vector3d(0, 1, 1.05), 0.001, 30);

    const DerivativeData ex = assemble_derivative_data(t, sys, DerivativeSource::Exact);
    CHECK(ex.states.rows() == 31);
    const DerivativeData fd = assemble_derivative_data(t, sys, DerivativeSource::FiniteDifference);
    CHECK(fd.states.rows() == 30);

    // on Euler-generated data the divided difference equals the exact rhs
    CHECK((fd.targets - ex.targets.topRows(30)).cwiseAbs().maxCoeff() <= 1e-9);

    // single-state trajectory: exact mode yields one row
    Trajectory single;
    single.states = {Eigen::Vector3d(1, 2, 3)};
    single.dt = 0.001;
    CHECK(assemble_derivative_data(single, sys, DerivativeSource::Exact).states.rows() == 1);
}

TEST_CASE("rollout integrates the fitted model") {
    // fit the Lorenz rhs exactly on a short trajectory, then check rollout
    const SystemSpec sys{LorenzParams{}};
    const RhsFn rhs = [&sys](const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory t = euler_integrate(rhs, Eigen::Vector3d(0, 1, 1.05), 0.001, 60);
    const DerivativeData d = assemble_derivative_data(t, sys, DerivativeSource::FiniteDifference);
    const FeatureMapSet maps = make_maps(3, "monomial:1", 0.02);
    const RegressionModel M = fit_least_squares(build_cores(d.states, maps), d.targets, maps,
                                                d.states, /*jitter=*/true);

    // training-window rollout tracks the truth closely
    const Trajectory pred = rollout(M, Eigen::Vector3d(0, 1, 1.05), 0.001, 60);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < pred.states.size(); ++k) {
        num += (pred.states[k] - t.states[k]).squaredNorm();
        den += t.states[k].squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 1e-3);

    // zero model: constant trajectory
    RegressionModel Z = M;
    Z.dual.setZero();
    const Trajectory flat = rollout(Z, Eigen::Vector3d(1, 2, 3), 0.01, 5);
    CHECK(flat.states.back() == Eigen::VectorXd(Eigen::Vector3d(1, 2, 3)));
}

TEST_CASE("lorenz training residual is tiny: basis is exact") {
    const SystemSpec sys{LorenzParams{}};
    const RhsFn rhs = [&sys](const Eigen::VectorXd& x) { return sys.rhs(x); };
    const Trajectory t = euler_integrate(rhs, Eigen::Vector3d(0, 1, 1.05), 0.001, 40);
    const DerivativeData d = assemble_derivative_data(t, sys, DerivativeSource::Exact);
    const FeatureMapSet maps = make_maps(3, "monomial:1", 0.1);
    const RegressionModel M = fit_least_squares(build_cores(d.states, maps), d.targets, maps,
                                                d.states, /*jitter=*/true);
    CHECK(M.diagnostics.fit_residual < 1e-6);
}

TEST_CASE("kuramoto training residual is tiny in the sin/cos basis") {
    Eigen::VectorXd omega(3);
    omega << 4.1, -2.2, 0.9;
    const SystemSpec sys{KuramotoParams{omega, 2.0}};
    const RhsFn rhs = [&sys](const Eigen::VectorXd& x) { return sys.rhs(x); };
    Eigen::VectorXd th0(3);
    th0 << 0.3, 2.0, 4.4;
    const Trajectory t = euler_integrate(rhs, th0, 0.001, 80);
    const DerivativeData d = assemble_derivative_data(t, sys, DerivativeSource::Exact);
    const FeatureMapSet maps = make_maps(3, "trig", 1.0);
    const RegressionModel M = fit_least_squares(build_cores(d.states, maps), d.targets, maps,
                                                d.states, /*jitter=*/true);
    CHECK(M.diagnostics.fit_residual < 1e-4);
}

TEST_CASE("write_trajectory_csv format") {
    Trajectory t;
    t.states = {Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)};
    t.dt = 0.5;
    std::ostringstream os;
    write_trajectory_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x1,x2");
    std::getline(is, line);
    CHECK(line.rfind("0,1,2", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("0.5,3,4", 0) == 0);
}

TEST_CASE("system spec dimensions") {
    CHECK(SystemSpec{LorenzParams{}}.dimension() == 3);
    Eigen::VectorXd om(7);
    om.setZero();
    CHECK(SystemSpec{KuramotoParams{om, 1.0}}.dimension() == 7);
}
