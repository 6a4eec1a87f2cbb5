#include "fpt/penalty.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "fpt/rng.hpp"
#include "gtest/gtest.h"

using fpt::PenaltyParams;
using fpt::check_scaling_bounds;
using fpt::check_subadditivity_chain;
using fpt::fraction_penalty;
using fpt::fraction_penalty_sum;

TEST(Penalty, ScalarValues) {
    EXPECT_EQ(fraction_penalty(0.0, PenaltyParams(2.0)), 0.0);
    EXPECT_DOUBLE_EQ(fraction_penalty(1.0, PenaltyParams(2.0)), 2.0 / 3.0);
    const double near_one = fraction_penalty(1.0, PenaltyParams(1e6));
    EXPECT_GE(near_one, 0.999999);
    EXPECT_LT(near_one, 1.0);
    // a*|t| overflow saturates at the limit value instead of producing NaN
    EXPECT_EQ(fraction_penalty(1e200, PenaltyParams(1e200)), 1.0);
}

TEST(Penalty, VectorSum) {
    const PenaltyParams p(2.0);
    const std::vector<double> zeros(7, 0.0);
    EXPECT_EQ(fraction_penalty_sum(zeros, p), 0.0);
    const std::vector<double> ones{1.0, 1.0};
    EXPECT_DOUBLE_EQ(fraction_penalty_sum(ones, p), 4.0 / 3.0);
    const std::vector<double> single{0.37, 0.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(fraction_penalty_sum(single, p), fraction_penalty(0.37, p));
}

TEST(Penalty, RejectsBadParams) {
    EXPECT_THROW(PenaltyParams(0.0), std::invalid_argument);
    EXPECT_THROW(PenaltyParams(-1.0), std::invalid_argument);
    EXPECT_THROW(PenaltyParams(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    const PenaltyParams p(1.0);
    EXPECT_THROW(fraction_penalty(std::numeric_limits<double>::infinity(), p),
                 std::invalid_argument);
    EXPECT_THROW(fraction_penalty(std::numeric_limits<double>::quiet_NaN(), p),
                 std::invalid_argument);
}

TEST(Penalty, SubadditivityChainExamples) {
    EXPECT_TRUE(check_subadditivity_chain(1.0, -1.0, PenaltyParams(1.0)));
    EXPECT_EQ(fraction_penalty(1.0 + -1.0, PenaltyParams(1.0)), 0.0);
    EXPECT_TRUE(check_subadditivity_chain(1.0, 1.0, PenaltyParams(1.0)));
}

TEST(Penalty, SubadditivityChainSweep) {
    fpt::rng::Xoshiro256pp gen(101);
    for (int i = 0; i < 1000; ++i) {
        const double xi = 20.0 * (gen.uniform() - 0.5);
        const double xj = 20.0 * (gen.uniform() - 0.5);
        const double a = 0.1 + 9.9 * gen.uniform();
        EXPECT_TRUE(check_subadditivity_chain(xi, xj, PenaltyParams(a)))
            << "xi=" << xi << " xj=" << xj << " a=" << a;
    }
}

TEST(Penalty, ScalingBoundsExamples) {
    EXPECT_TRUE(check_scaling_bounds(2.0, 1.0, PenaltyParams(1.0)));
    EXPECT_TRUE(check_scaling_bounds(1.0, 5.0, PenaltyParams(3.0)));
}

TEST(Penalty, ScalingBoundsSweep) {
    fpt::rng::Xoshiro256pp gen(102);
    for (int i = 0; i < 1000; ++i) {
        const double c = 6.0 * (gen.uniform() - 0.5);
        const double t = 20.0 * (gen.uniform() - 0.5);
        const double a = 0.1 + 9.9 * gen.uniform();
        EXPECT_TRUE(check_scaling_bounds(c, t, PenaltyParams(a)))
            << "c=" << c << " t=" << t << " a=" << a;
    }
}

TEST(Penalty, Symmetry) {
    fpt::rng::Xoshiro256pp gen(103);
    const PenaltyParams p(2.5);
    for (int i = 0; i < 200; ++i) {
        const double t = 50.0 * (gen.uniform() - 0.5);
        EXPECT_EQ(fraction_penalty(t, p), fraction_penalty(-t, p));
    }
}

TEST(Penalty, RangeAndZeroIff) {
    fpt::rng::Xoshiro256pp gen(104);
    for (int i = 0; i < 500; ++i) {
        const double t = 100.0 * (gen.uniform() - 0.5);
        const double a = 0.05 + 20.0 * gen.uniform();
        const double v = fraction_penalty(t, PenaltyParams(a));
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
        EXPECT_EQ(v == 0.0, t == 0.0);
        EXPECT_LE(v, a * std::fabs(t));
    }
}

TEST(Penalty, MidpointConcavity) {
    fpt::rng::Xoshiro256pp gen(105);
    for (int i = 0; i < 500; ++i) {
        const double s = 30.0 * gen.uniform();
        const double t = 30.0 * gen.uniform();
        const double a = 0.1 + 9.9 * gen.uniform();
        const PenaltyParams p(a);
        EXPECT_GE(fraction_penalty((s + t) / 2.0, p) + 1e-12,
                  (fraction_penalty(s, p) + fraction_penalty(t, p)) / 2.0);
    }
}

TEST(Penalty, MonotoneInSharpness) {
    fpt::rng::Xoshiro256pp gen(106);
    for (int i = 0; i < 500; ++i) {
        const double t = 1e-3 + 30.0 * gen.uniform();
        const double a1 = 0.1 + 5.0 * gen.uniform();
        const double a2 = a1 + 0.1 + 5.0 * gen.uniform();
        EXPECT_LT(fraction_penalty(t, PenaltyParams(a1)), fraction_penalty(t, PenaltyParams(a2)));
    }
}

TEST(Penalty, SumBoundedByL0) {
    fpt::rng::Xoshiro256pp gen(107);
    const PenaltyParams p(3.0);
    std::vector<double> x(40);
    for (int rep = 0; rep < 100; ++rep) {
        std::size_t l0 = 0;
        for (auto& v : x) {
            v = gen.uniform() < 0.4 ? 0.0 : 10.0 * (gen.uniform() - 0.5);
            l0 += v != 0.0;
        }
        EXPECT_LE(fraction_penalty_sum(x, p), static_cast<double>(l0));
    }
}
