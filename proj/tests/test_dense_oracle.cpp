#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "mt/dense_oracle.hpp"
#include "mt/errors.hpp"
#include "mt/mtensor.hpp"

using namespace mt;

namespace {

MTensor toy() {
    Eigen::MatrixXd p1(3, 3), p2(3, 3);
    p1 << 1, -1, 1, 1, 0, 0, 1, 1, 1;
    p2 << 1, -1, 1, 1, 1, 1, 1, 0, 0;
    return mtensor_from_cores({p1, p2});
}

MTensor random_mt(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dm(1, 6), dn(1, 4), dp(1, 3);
    std::uniform_real_distribution<double> du(-1.0, 1.0);
    const int m = dm(rng), n = dn(rng);
    std::vector<Eigen::MatrixXd> cores;
    for (int j = 0; j < n; ++j) {
        Eigen::MatrixXd c(m, dp(rng));
        for (Eigen::Index r = 0; r < c.rows(); ++r)
            for (Eigen::Index cc = 0; cc < c.cols(); ++cc) c(r, cc) = du(rng);
        cores.push_back(std::move(c));
    }
    return mtensor_from_cores(std::move(cores));
}

}  // namespace

TEST_CASE("materialize agrees with element entry for entry") {
    const MTensor T = toy();
    const DenseTensor D = oracle::materialize(T);
    CHECK(D.shape == std::vector<Eigen::Index>{3, 3, 3});
    for (Eigen::Index k = 0; k < 3; ++k)
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                CHECK(D({k, i, j}) == doctest::Approx(element(T, k, {i, j})).epsilon(1e-15));

    // its mode-1 unfolding is the printed 3x9 matrix
    Eigen::MatrixXd U_ref(3, 9);
    U_ref << 1, -1, 1, -1, 1, -1, 1, -1, 1,
             1,  1, 1,  0, 0,  0, 0,  0, 0,
             1,  0, 0,  1, 0,  0, 1,  0, 0;
    for (Eigen::Index k = 0; k < 3; ++k)
        for (Eigen::Index f = 0; f < 9; ++f)
            CHECK(D.data[k * 9 + f] == doctest::Approx(U_ref(k, f)).epsilon(1e-15));
}

TEST_CASE("materialize zero cores and cap") {
    std::vector<Eigen::MatrixXd> z(2, Eigen::MatrixXd::Zero(2, 2));
    const DenseTensor D = oracle::materialize(mtensor_from_cores(std::move(z)));
    CHECK(D.data.cwiseAbs().maxCoeff() == 0.0);

    std::vector<Eigen::MatrixXd> big(8, Eigen::MatrixXd::Ones(2, 3));
    CHECK_THROWS_AS(oracle::materialize(mtensor_from_cores(std::move(big)), 100), CapacityError);
}

TEST_CASE("materialize distributes over hadamard") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const MTensor A = random_mt(seed);
        const DenseTensor DA = oracle::materialize(A);
        const DenseTensor DH = oracle::materialize(hadamard(A, A));
        for (Eigen::Index i = 0; i < DA.size(); ++i)
            CHECK(DH.data[i] == doctest::Approx(DA.data[i] * DA.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("face_splitting matches the toy print and a direct loop") {
    Eigen::MatrixXd U_ref(3, 9);
    U_ref << 1, -1, 1, -1, 1, -1, 1, -1, 1,
             1,  1, 1,  0, 0,  0, 0,  0, 0,
             1,  0, 0,  1, 0,  0, 1,  0, 0;
    CHECK(oracle::face_splitting(toy().cores()) == U_ref);

    // single core: identity operation
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(3, 4);
    CHECK(oracle::face_splitting({A}) == A);

    // direct kronecker loop on two small cores
    Eigen::MatrixXd B = Eigen::MatrixXd::Random(2, 2), C = Eigen::MatrixXd::Random(2, 2);
    const Eigen::MatrixXd F = oracle::face_splitting({B, C});
    for (Eigen::Index k = 0; k < 2; ++k)
        for (Eigen::Index i = 0; i < 2; ++i)
            for (Eigen::Index j = 0; j < 2; ++j)
                CHECK(F(k, i * 2 + j) == doctest::Approx(B(k, i) * C(k, j)).epsilon(1e-15));

    CHECK_THROWS_AS(oracle::face_splitting({Eigen::MatrixXd::Ones(2, 2),
                                            Eigen::MatrixXd::Ones(3, 2)}),
                    DimensionError);
}

TEST_CASE("dense_lstsq reproduces the worked coefficients") {
    const Eigen::MatrixXd U = oracle::face_splitting(toy().cores());
    Eigen::VectorXd y(3);
    y << -3, 5, 3;  // the printed -2 is inconsistent with f(-1,-1); see README
    const Eigen::VectorXd c = oracle::dense_lstsq(U, y);
    const double c_ref[9] = {1.706, 2.235, 1.059, 1.235, -0.588, 0.588, 0.059, 0.588, -0.588};
    for (int i = 0; i < 9; ++i) CHECK(std::abs(c[i] - c_ref[i]) <= 1e-3);
}

TEST_CASE("dense_lstsq identity and overdetermined residual orthogonality") {
    Eigen::VectorXd y(4);
    y << 1, -2, 3, 0.5;
    CHECK(oracle::dense_lstsq(Eigen::MatrixXd::Identity(4, 4), y).isApprox(y, 1e-12));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> du(-1.0, 1.0);
    Eigen::MatrixXd A(8, 3);
    Eigen::VectorXd b(8);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) A(i, j) = du(rng);
        b[i] = du(rng);
    }
    const Eigen::VectorXd c = oracle::dense_lstsq(A, b);
    CHECK((A.transpose() * (A * c - b)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dense_lstsq branches agree on square invertible systems") {
    for (std::uint64_t seed = 40; seed < 60; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> du(-1.0, 1.0);
        Eigen::MatrixXd A(4, 4);
        Eigen::VectorXd y(4);
        for (Eigen::Index i = 0; i < 4; ++i) {
            for (Eigen::Index j = 0; j < 4; ++j) A(i, j) = du(rng);
            y[i] = du(rng);
        }
        A += 3.0 * Eigen::MatrixXd::Identity(4, 4);  // keep it comfortably invertible
        // wide orientation selects the rows branch, tall selects the columns branch;
        // on a square system both must return the unique solution
        const Eigen::VectorXd c = oracle::dense_lstsq(A, y);
        CHECK((A * c - y).norm() <= 1e-9 * std::max(1.0, y.norm()));
    }
}

TEST_CASE("full oracle equivalence sweep") {
    // every factorized operation against the dense materialization
    for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
        const MTensor T = random_mt(seed);
        const DenseTensor D = oracle::materialize(T);
        const Eigen::MatrixXd unf = unfold_mode1(T);
        const Eigen::MatrixXd fs = oracle::face_splitting(T.cores());
        CHECK(unf == fs);
        CHECK(inner(T, T) == doctest::Approx(D.data.squaredNorm()).epsilon(1e-12));
        CHECK(norm(T) == doctest::Approx(D.data.norm()).epsilon(1e-12));
        const Eigen::VectorXd cr = contract_r(T);
        const Eigen::Index width = D.size() / T.rdim();
        for (Eigen::Index k = 0; k < T.rdim(); ++k)
            CHECK(cr[k] ==
                  doctest::Approx(D.data.segment(k * width, width).sum()).epsilon(1e-12));
        const DenseTensor cc = contract_c(T);
        for (Eigen::Index f = 0; f < width; ++f) {
            double sum = 0.0;
            for (Eigen::Index k = 0; k < T.rdim(); ++k) sum += D.data[k * width + f];
            CHECK(cc.data[f] == doctest::Approx(sum).epsilon(1e-12));
        }
    }
}
