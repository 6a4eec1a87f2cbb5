#include "fpt/linalg.hpp"

#include <cmath>
#include <vector>

#include "fpt/oracle.hpp"
#include "fpt/rng.hpp"
#include "gtest/gtest.h"

using fpt::DenseMatrix;
using fpt::column_norms;
using fpt::matvec;
using fpt::matvec_t;
using fpt::spectral_norm;

namespace {

DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    DenseMatrix A(m, n);
    fpt::rng::Xoshiro256pp gen(seed);
    for (double& v : A.data()) v = gen.normal();
    return A;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::vector<double> x(n);
    fpt::rng::Xoshiro256pp gen(seed);
    for (double& v : x) v = gen.normal();
    return x;
}

}  // namespace

TEST(DenseMatrixTest, Validation) {
    EXPECT_THROW(DenseMatrix(0, 3), std::invalid_argument);
    EXPECT_THROW(DenseMatrix::from_data(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
    EXPECT_THROW(DenseMatrix::from_data(1, 2, {1.0, std::nan("")}), std::invalid_argument);
}

TEST(Matvec, IdentityAndZero) {
    const DenseMatrix I = DenseMatrix::identity(2);
    const std::vector<double> x{3.0, 4.0};
    EXPECT_EQ(matvec(I, x), x);
    const DenseMatrix Z(3, 2);
    const std::vector<double> zero(3, 0.0);
    EXPECT_EQ(matvec(Z, x), zero);
    EXPECT_THROW(matvec(I, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Matvec, MatchesNaiveTripleLoop) {
    const DenseMatrix A = random_matrix(3, 3, 301);
    const std::vector<double> x = random_vector(3, 302);
    const std::vector<double> got = matvec(A, x);
    for (std::size_t i = 0; i < 3; ++i) {
        double want = 0.0;
        for (std::size_t j = 0; j < 3; ++j) want += A(i, j) * x[j];
        EXPECT_NEAR(got[i], want, 1e-13);
    }
}

TEST(MatvecT, IdentitySingleColumnAndOracle) {
    const DenseMatrix I = DenseMatrix::identity(2);
    const std::vector<double> y{3.0, 4.0};
    EXPECT_EQ(matvec_t(I, y), y);

    DenseMatrix col(4, 1);
    for (std::size_t i = 0; i < 4; ++i) col(i, 0) = static_cast<double>(i + 1);
    const std::vector<double> w{1.0, 0.5, -2.0, 1.5};
    const std::vector<double> got = matvec_t(col, w);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_NEAR(got[0], 1.0 * 1.0 + 0.5 * 2.0 - 2.0 * 3.0 + 1.5 * 4.0, 1e-13);

    const DenseMatrix A = random_matrix(5, 7, 303);
    const std::vector<double> v = random_vector(5, 304);
    const std::vector<double> gt = matvec_t(A, v);
    for (std::size_t j = 0; j < 7; ++j) {
        double want = 0.0;
        for (std::size_t i = 0; i < 5; ++i) want += A(i, j) * v[i];
        EXPECT_NEAR(gt[j], want, 1e-13);
    }
}

TEST(MatvecT, AdjointConsistency) {
    const DenseMatrix A = random_matrix(11, 17, 305);
    const std::vector<double> x = random_vector(17, 306);
    const std::vector<double> y = random_vector(11, 307);
    const double lhs = fpt::dot(matvec(A, x), y);
    const double rhs = fpt::dot(x, matvec_t(A, y));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(lhs)));
}

TEST(ColumnNorms, Examples) {
    const DenseMatrix I = DenseMatrix::identity(4);
    for (double v : column_norms(I)) EXPECT_DOUBLE_EQ(v, 1.0);

    DenseMatrix twos(4, 1);
    for (std::size_t i = 0; i < 4; ++i) twos(i, 0) = 2.0;
    EXPECT_DOUBLE_EQ(column_norms(twos)[0], 4.0);

    const DenseMatrix A = random_matrix(6, 5, 308);
    const std::vector<double> got = column_norms(A);
    for (std::size_t j = 0; j < 5; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 6; ++i) s += A(i, j) * A(i, j);
        EXPECT_NEAR(got[j], std::sqrt(s), 1e-13);
    }
}

TEST(SpectralNorm, KnownMatrices) {
    EXPECT_NEAR(spectral_norm(DenseMatrix::identity(5)), 1.0, 1e-10);
    DenseMatrix D(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 1.0;
    EXPECT_NEAR(spectral_norm(D), 3.0, 1e-10);
}

TEST(SpectralNorm, MatchesJacobiEigenOracle) {
    const DenseMatrix A = random_matrix(20, 50, 309);
    // independent route: largest eigenvalue of the 20x20 Gram matrix A A^T
    std::vector<double> G(20 * 20, 0.0);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = i; j < 20; ++j) {
            const double v = fpt::dot(A.row(i), A.row(j));
            G[i * 20 + j] = v;
            G[j * 20 + i] = v;
        }
    }
    const std::vector<double> ev = fpt::oracle::detail::sym_eigenvalues(G, 20);
    const double want = std::sqrt(ev.back());
    const double got = spectral_norm(A, 1e-10);
    EXPECT_NEAR(got, want, 1e-6 * want);
}

TEST(SpectralNorm, FailureModes) {
    const DenseMatrix Z(3, 2);  // zero matrix has no dominant direction
    EXPECT_THROW(spectral_norm(Z), std::runtime_error);
    const DenseMatrix A = random_matrix(8, 6, 312);
    EXPECT_THROW(spectral_norm(A, 1e-10, 1), std::runtime_error);
    EXPECT_THROW(spectral_norm(A, 0.0), std::invalid_argument);
}

TEST(SpectralNorm, DominatesRayleighProbe) {
    const DenseMatrix A = random_matrix(13, 9, 310);
    const double nrm = spectral_norm(A, 1e-10);
    fpt::rng::Xoshiro256pp gen(311);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x = random_vector(9, gen.next());
        const double q = fpt::norm2(matvec(A, x)) / fpt::norm2(x);
        EXPECT_LE(q, nrm * (1.0 + 1e-7));
    }
}
