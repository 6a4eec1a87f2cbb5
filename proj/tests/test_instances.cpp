#include "fpt/instances.hpp"

#include <cmath>
#include <sstream>

#include "gtest/gtest.h"

using fpt::DenseMatrix;
using fpt::SensingProblem;
using fpt::gen_gaussian_matrix;
using fpt::gen_sparse_signal;
using fpt::load_problem;
using fpt::make_problem;
using fpt::measure;
using fpt::save_problem;

TEST(GaussianMatrix, DeterministicPerSeed) {
    const DenseMatrix A = gen_gaussian_matrix(2, 3, 42);
    const DenseMatrix B = gen_gaussian_matrix(2, 3, 42);
    EXPECT_EQ(A.data(), B.data());
    const DenseMatrix C = gen_gaussian_matrix(2, 3, 43);
    EXPECT_NE(A.data(), C.data());
}

TEST(GaussianMatrix, DegenerateSize) {
    const DenseMatrix A = gen_gaussian_matrix(1, 1, 7);
    EXPECT_TRUE(std::isfinite(A(0, 0)));
}

TEST(GaussianMatrix, SampleMeanSanity) {
    const DenseMatrix A = gen_gaussian_matrix(128, 512, 11);
    double mean = 0.0;
    for (double v : A.data()) mean += v;
    mean /= static_cast<double>(A.data().size());
    EXPECT_LE(std::fabs(mean), 4.0 / std::sqrt(128.0 * 512.0));
}

TEST(SparseSignal, ExactSparsity) {
    const std::vector<double> x = gen_sparse_signal(512, 100, 5);
    std::size_t nnz = 0;
    for (double v : x) nnz += v != 0.0;
    EXPECT_EQ(nnz, 100u);
}

TEST(SparseSignal, DenseBoundaryAndDeterminism) {
    const std::vector<double> x = gen_sparse_signal(5, 5, 9);
    for (double v : x) EXPECT_NE(v, 0.0);
    EXPECT_EQ(gen_sparse_signal(64, 7, 123), gen_sparse_signal(64, 7, 123));
    EXPECT_THROW(gen_sparse_signal(4, 5, 1), std::invalid_argument);
    EXPECT_THROW(gen_sparse_signal(4, 0, 1), std::invalid_argument);
}

TEST(Measure, NoiselessIsExactProduct) {
    const DenseMatrix A = gen_gaussian_matrix(6, 10, 3);
    const std::vector<double> x = gen_sparse_signal(10, 2, 3);
    const std::vector<double> b = measure(A, x, 0.0, 3);
    EXPECT_EQ(b, fpt::matvec(A, x));
}

TEST(Measure, PureNoiseStd) {
    const DenseMatrix Z(500, 2);  // zero matrix
    const std::vector<double> x(2, 1.0);
    const std::vector<double> b = measure(Z, x, 1.0, 17);
    double mean = 0.0;
    for (double v : b) mean += v;
    mean /= 500.0;
    double var = 0.0;
    for (double v : b) var += (v - mean) * (v - mean);
    var /= 499.0;
    EXPECT_NEAR(std::sqrt(var), 1.0, 0.2);
    EXPECT_EQ(measure(Z, x, 1.0, 17), b);
}

TEST(Streams, SigmaDoesNotTouchMatrixOrSignal) {
    const SensingProblem p0 = make_problem(8, 16, 3, 0.0, 99);
    const SensingProblem p1 = make_problem(8, 16, 3, 0.5, 99);
    EXPECT_EQ(p0.A.data(), p1.A.data());
    EXPECT_EQ(p0.x_true, p1.x_true);
    EXPECT_NE(p0.b, p1.b);
}

TEST(Serialization, RoundTripIsBitExact) {
    const SensingProblem p = make_problem(5, 9, 3, 0.25, 1234);
    std::stringstream ss;
    save_problem(p, ss);
    const SensingProblem q = load_problem(ss);
    EXPECT_EQ(p.A.rows(), q.A.rows());
    EXPECT_EQ(p.A.cols(), q.A.cols());
    EXPECT_EQ(p.A.data(), q.A.data());
    EXPECT_EQ(p.b, q.b);
    EXPECT_EQ(p.x_true, q.x_true);
    EXPECT_EQ(p.sigma, q.sigma);
    EXPECT_EQ(p.seed, q.seed);
}

TEST(Serialization, TruthlessFileLoads) {
    const SensingProblem p = make_problem(4, 6, 2, 0.0, 55);
    SensingProblem no_truth{p.A, p.b, {}, p.sigma, p.seed};
    std::stringstream ss;
    save_problem(no_truth, ss);
    const SensingProblem q = load_problem(ss);
    EXPECT_FALSE(q.has_truth());
    EXPECT_EQ(q.b, p.b);
}

TEST(Serialization, MalformedInputRejected) {
    std::stringstream empty;
    EXPECT_THROW(load_problem(empty), std::runtime_error);
    std::stringstream truncated("2 2 1 0 7\n1 2\n");
    EXPECT_THROW(load_problem(truncated), std::runtime_error);
}
