#include <gtest/gtest.h>

#include <cmath>

#include <rsi/svd.hpp>
#include <rsi/testmatrices.hpp>

using namespace rsi;

TEST(ControlledGapTest, ShapeDeterminismNonnegativity) {
    const DenseMatrix A = controlled_gap(2.0, 7);
    EXPECT_EQ(A.rows(), 3000);
    EXPECT_EQ(A.cols(), 300);
    const DenseMatrix B = controlled_gap(2.0, 7);
    EXPECT_TRUE(A == B);
    for (std::size_t i = 0; i < A.size(); ++i) EXPECT_GE(A.data()[i], 0.0);
    EXPECT_FALSE(A == controlled_gap(2.0, 8));
}

TEST(ControlledGapTest, GapParameterControlsTheJump) {
    const std::vector<double> s1 = singular_values(controlled_gap(1.0, 11));
    const std::vector<double> s10 = singular_values(controlled_gap(10.0, 11));
    const double r1 = s1[14] / s1[15];
    const double r10 = s10[14] / s10[15];
    EXPECT_GT(r10, 2.0 * r1);
    // decay roughly like 1/j away from the jump
    EXPECT_LT(s1[99], s1[9]);
}

TEST(LowRankPlusNoiseTest, SmallNoiseSpectrum) {
    const DenseMatrix A = low_rank_plus_noise(300, 15, 1e-2, 5);
    EXPECT_EQ(A.rows(), 300);
    const std::vector<double> sv = singular_values(A);
    for (int j = 0; j < 15; ++j) EXPECT_NEAR(sv[static_cast<std::size_t>(j)], 1.0, 0.1);
    EXPECT_LE(sv[15], 0.2 * sv[14]);
}

TEST(LowRankPlusNoiseTest, VanishingNoiseGivesBlockIdentity) {
    const DenseMatrix A = low_rank_plus_noise(60, 6, 1e-12, 6);
    const std::vector<double> sv = singular_values(A);
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(sv[static_cast<std::size_t>(j)], 1.0, 1e-3);
    EXPECT_LE(sv[6], 1e-3);
}

TEST(LowRankPlusNoiseTest, DeterministicAndSymmetricPerturbation) {
    const DenseMatrix A = low_rank_plus_noise(40, 5, 0.1, 9);
    EXPECT_TRUE(A == low_rank_plus_noise(40, 5, 0.1, 9));
    // A - diag block is symmetric
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < i; ++j) EXPECT_EQ(A(i, j), A(j, i));
}

TEST(LowRankPlusDecayTest, SpectrumMatchesPrescriptionExactly) {
    const int n = 120, r = 15;
    const double d = 1.0;
    const DenseMatrix A = low_rank_plus_decay(n, r, d, 12);
    const std::vector<double> sv = singular_values(A);
    for (int j = 0; j < r; ++j) EXPECT_NEAR(sv[static_cast<std::size_t>(j)], 1.0, 1e-10);
    for (int j = r; j < n; ++j)
        EXPECT_NEAR(sv[static_cast<std::size_t>(j)], std::pow(j - r + 2.0, -d), 1e-10);
}

TEST(LowRankPlusDecayTest, FastDecaySixteenthValue) {
    const DenseMatrix A = low_rank_plus_decay(300, 15, 2.0, 13);
    const std::vector<double> sv = singular_values(A);
    EXPECT_NEAR(sv[15], 0.25, 1e-10);
}

TEST(TestMatrixSpecTest, GenerateDispatchAndValidation) {
    TestMatrixSpec s;
    s.family = MatrixFamily::low_rank_plus_decay;
    s.param = 0.5;
    s.n = 50;
    s.r = 5;
    s.seed = 3;
    const DenseMatrix A = generate(s);
    EXPECT_EQ(A.rows(), 50);
    s.r = 0;
    EXPECT_THROW(generate(s), InvalidArgument);
    s.r = 60;
    EXPECT_THROW(generate(s), InvalidArgument);
    s.r = 5;
    s.param = -1.0;
    EXPECT_THROW(generate(s), InvalidArgument);
}

TEST(TestMatrixSpecTest, StandardFamilyHasNineNamedMatrices) {
    const std::vector<TestMatrixSpec> all = standard_test_matrices();
    ASSERT_EQ(all.size(), 9u);
    EXPECT_EQ(all[0].name, "GapSmall");
    EXPECT_EQ(all[2].name, "GapLarge");
    EXPECT_EQ(all[2].param, 10.0);
    EXPECT_EQ(all[4].name, "NoiseMedium");
    EXPECT_NEAR(all[4].param, 1e-1, 1e-15);
    EXPECT_EQ(all[8].name, "DecayFast");
    EXPECT_EQ(all[8].param, 2.0);
    for (const auto& s : all) EXPECT_EQ(s.r, 15);
}
