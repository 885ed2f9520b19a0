#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "mt/errors.hpp"
#include "mt/linalg.hpp"

using namespace mt;

namespace {

Eigen::Matrix3d toy_P() {
    Eigen::Matrix3d P;
    P << 9, 1, 1, 1, 3, 1, 1, 1, 3;
    return P;
}

Eigen::MatrixXd random_spd(std::uint64_t seed, Eigen::Index n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> du(-1.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = du(rng);
    return A.transpose() * A + Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("cholesky factors the toy Gram matrix") {
    const CholeskyFactor F = cholesky(toy_P());
    CHECK(F.lower()(0, 0) == doctest::Approx(3.0));
    CHECK_FALSE(F.jittered());
    const Eigen::MatrixXd R = F.lower() * F.lower().transpose();
    CHECK((R - toy_P()).norm() <= 1e-12 * toy_P().norm());
    // strictly positive diagonal
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(F.lower()(i, i) > 0.0);
}

TEST_CASE("cholesky of the identity is the identity") {
    const CholeskyFactor F = cholesky(Eigen::MatrixXd::Identity(4, 4));
    CHECK(F.lower() == Eigen::MatrixXd::Identity(4, 4));
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
    Eigen::Matrix2d bad;
    bad << 1, 2, 2, 1;  // eigenvalues 3 and -1
    CHECK_THROWS_AS(cholesky(bad), NotPositiveDefiniteError);
    try {
        cholesky(bad);
    } catch (const NotPositiveDefiniteError& e) {
        CHECK(e.pivot_index >= 0);
    }

    Eigen::Matrix2d asym;
    asym << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(cholesky(asym), std::invalid_argument);
}

TEST_CASE("opt-in jitter rescues a semidefinite matrix and is flagged") {
    Eigen::Matrix2d sing;
    sing << 1, 1, 1, 1;
    CHECK_THROWS_AS(cholesky(sing), NotPositiveDefiniteError);
    const CholeskyFactor F = cholesky(sing, true);
    CHECK(F.jittered());
    CHECK(F.size() == 2);
}

TEST_CASE("cholesky reconstruction on random SPD matrices up to size 200") {
    for (const Eigen::Index n : {5, 40, 200}) {
        const Eigen::MatrixXd P = random_spd(static_cast<std::uint64_t>(n), n);
        const CholeskyFactor F = cholesky(P);
        CHECK((F.lower() * F.lower().transpose() - P).norm() <= 1e-10 * P.norm());
    }
}

TEST_CASE("chol_append grows a factor one row at a time") {
    // base case: append to the empty factor
    CholeskyFactor F;
    CHECK(F.size() == 0);
    F = chol_append(F, Eigen::VectorXd(), 9.0);
    CHECK(F.size() == 1);
    CHECK(F.lower()(0, 0) == doctest::Approx(3.0));

    // build the toy P by successive appends and compare to the batch factor
    const Eigen::Matrix3d P = toy_P();
    F = chol_append(F, P.block(0, 1, 1, 1).col(0), P(1, 1));
    F = chol_append(F, P.block(0, 2, 2, 1).col(0), P(2, 2));
    const CholeskyFactor batch = cholesky(P);
    CHECK((F.lower() - batch.lower()).norm() <= 1e-10);

    // exactly dependent row: zero Schur complement
    Eigen::VectorXd b = F.lower() * F.lower().row(0).transpose();  // duplicate of row 0
    CHECK_THROWS_AS(chol_append(F, b, P(0, 0)), DegenerateAppendError);
}

TEST_CASE("chol_append equals batch cholesky on random growth sequences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Eigen::MatrixXd P = random_spd(seed, 8);
        CholeskyFactor F;
        for (Eigen::Index k = 0; k < 8; ++k)
            F = chol_append(F, P.block(0, k, k, 1).col(0), P(k, k));
        CHECK((F.lower() - cholesky(P).lower()).norm() <= 1e-9 * P.norm());
    }
}

TEST_CASE("forward_solve") {
    const CholeskyFactor I4 = cholesky(Eigen::MatrixXd::Identity(4, 4));
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    CHECK(forward_solve(I4, y) == y);

    CholeskyFactor F2 = CholeskyFactor::from_lower(Eigen::MatrixXd::Constant(1, 1, 2.0));
    Eigen::VectorXd y1(1);
    y1 << 4;
    CHECK(forward_solve(F2, y1)[0] == doctest::Approx(2.0));

    const CholeskyFactor F = cholesky(toy_P());
    Eigen::VectorXd y3(3);
    y3 << -3, 5, 3;
    const Eigen::VectorXd s = forward_solve(F, y3);
    CHECK((F.lower() * s - y3).norm() <= 1e-10);

    CHECK_THROWS_AS(forward_solve(F, y), DimensionError);
}

TEST_CASE("backward_solve inverts the transposed factor") {
    const CholeskyFactor F = cholesky(toy_P());
    Eigen::VectorXd s(3);
    s << 1, -1, 2;
    const Eigen::VectorXd w = backward_solve(F, s);
    CHECK((F.lower().transpose() * w - s).norm() <= 1e-10);
}

TEST_CASE("solve_spd reproduces the printed dual weights") {
    const CholeskyFactor F = cholesky(toy_P());
    Eigen::VectorXd y(3);
    y << -3, 5, 3;
    const Eigen::VectorXd z = solve_spd(F, y);
    CHECK(std::abs(z[0] - (-0.588)) <= 1e-3);
    CHECK(std::abs(z[1] - 1.647) <= 1e-3);
    CHECK(std::abs(z[2] - 0.647) <= 1e-3);

    // identity: z = y
    CHECK(solve_spd(cholesky(Eigen::MatrixXd::Identity(3, 3)), y) == y);

    // random SPD residual, multi-column right-hand side
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const Eigen::MatrixXd P = random_spd(seed, 12);
        Eigen::MatrixXd Y = Eigen::MatrixXd::Random(12, 3);
        const Eigen::MatrixXd Z = solve_spd(cholesky(P), Y);
        CHECK((P * Z - Y).norm() <= 1e-9 * Y.norm());
    }
}

TEST_CASE("sym_eig contracts: descending, orthonormal, reconstructing") {
    const SymEig e = sym_eig(toy_P());
    CHECK(e.eigenvalues.size() == 3);
    CHECK(e.eigenvalues[0] >= e.eigenvalues[1]);
    CHECK(e.eigenvalues[1] >= e.eigenvalues[2]);
    // analytic eigenpair (2, (0,1,-1)/sqrt 2)
    CHECK(e.eigenvalues.minCoeff() == doctest::Approx(2.0));
    Eigen::Vector3d v(0, 1, -1);
    CHECK((toy_P() * v - 2.0 * v).norm() <= 1e-12);

    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Eigen::MatrixXd::Identity(3, 3))
              .norm() <= 1e-9);
    CHECK((e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose() - toy_P())
              .norm() <= 1e-9);
}

TEST_CASE("sym_eig simple cases and symmetry guard") {
    const SymEig id = sym_eig(Eigen::MatrixXd::Identity(5, 5));
    CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() <= 1e-12);

    Eigen::Matrix2d D = Eigen::Vector2d(4, 1).asDiagonal();
    const SymEig de = sym_eig(D);
    CHECK(de.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(de.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(std::abs(de.eigenvectors(0, 0)) == doctest::Approx(1.0));

    Eigen::Matrix2d asym;
    asym << 1, 0.5, 0.1, 1;
    CHECK_THROWS_AS(sym_eig(asym), std::invalid_argument);
}

TEST_CASE("gram-matrix eigenvalues are nonnegative up to tolerance") {
    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> du(-1.0, 1.0);
        Eigen::MatrixXd A(6, 4);
        for (Eigen::Index i = 0; i < 6; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) A(i, j) = du(rng);
        const SymEig e = sym_eig(Eigen::MatrixXd(A * A.transpose()));
        CHECK(e.eigenvalues.minCoeff() >= -1e-10 * e.eigenvalues.maxCoeff());
    }
}
