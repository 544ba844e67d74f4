#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <rsi/matrix.hpp>
#include <rsi/mmio.hpp>
#include <rsi/qr.hpp>
#include <rsi/svd.hpp>
#include <rsi/testmatrices.hpp>

#include "oracles.hpp"

using namespace rsi;

namespace {

double reconstruction_error(const DenseMatrix& A, const SvdFactors& f) {
    return frobenius(subtract(A, reconstruct(f))) / (frobenius(A) + 1e-300);
}

} // namespace

TEST(DenseMatrixTest, RejectsBadShapesAndNonFinite) {
    EXPECT_THROW(DenseMatrix(0, 3), InvalidArgument);
    EXPECT_THROW(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidArgument);
    EXPECT_THROW(DenseMatrix(1, 2, {1.0, std::nan("")}), InvalidArgument);
    EXPECT_THROW(DenseMatrix(1, 2, {1.0, INFINITY}), InvalidArgument);
}

TEST(DenseMatrixTest, MultiplyAgreesWithTransposedVariants) {
    const DenseMatrix A = oracles::random_matrix(7, 4, 11);
    const DenseMatrix B = oracles::random_matrix(7, 5, 12);
    EXPECT_LT(max_abs(subtract(multiply_At_B(A, B), multiply(transpose(A), B))), 1e-14);
    const DenseMatrix C = oracles::random_matrix(5, 4, 13);
    EXPECT_LT(max_abs(subtract(multiply_A_Bt(A, C), multiply(A, transpose(C)))), 1e-14);
}

TEST(MatrixMarketTest, ArrayAndCoordinateRoundTrip) {
    DenseMatrix A = oracles::random_matrix(5, 3, 21);
    A(2, 1) = 0.0;
    for (auto fmt : {MatrixMarketFormat::array, MatrixMarketFormat::coordinate}) {
        std::ostringstream os;
        write_matrix_market(os, A, fmt);
        std::istringstream is(os.str());
        const DenseMatrix B = read_matrix_market(is);
        ASSERT_EQ(B.rows(), A.rows());
        ASSERT_EQ(B.cols(), A.cols());
        EXPECT_EQ(max_abs(subtract(A, B)), 0.0);
    }
}

TEST(ThinQrTest, IdentityFactorsToIdentity) {
    const DenseMatrix I = DenseMatrix::identity(3);
    const QrFactors f = thin_qr(I);
    EXPECT_LT(max_abs(subtract(f.Q, I)), 1e-15);
    EXPECT_LT(max_abs(subtract(f.R, I)), 1e-15);
}

TEST(ThinQrTest, SingleColumn) {
    const DenseMatrix A(2, 1, {3.0, 4.0});
    const QrFactors f = thin_qr(A);
    EXPECT_NEAR(f.Q(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(f.Q(1, 0), 0.8, 1e-15);
    EXPECT_NEAR(f.R(0, 0), 5.0, 1e-14);
}

TEST(ThinQrTest, SeededRectangularReconstructs) {
    const DenseMatrix A = oracles::random_matrix(50, 10, 31);
    const QrFactors f = thin_qr(A);
    EXPECT_LE(orthonormality_defect(f.Q), 1e-12);
    EXPECT_LE(frobenius(subtract(multiply(f.Q, f.R), A)) / frobenius(A), 1e-12);
    for (int j = 0; j < f.R.cols(); ++j) {
        EXPECT_GE(f.R(j, j), 0.0);
        for (int i = j + 1; i < f.R.rows(); ++i) EXPECT_EQ(f.R(i, j), 0.0);
    }
}

TEST(ThinQrTest, RejectsWideInput) {
    EXPECT_THROW(thin_qr(DenseMatrix(2, 3)), InvalidArgument);
}

TEST(ThinQrTest, Deterministic) {
    const DenseMatrix A = oracles::random_matrix(20, 6, 77);
    const QrFactors f1 = thin_qr(A);
    const QrFactors f2 = thin_qr(A);
    EXPECT_TRUE(f1.Q == f2.Q);
    EXPECT_TRUE(f1.R == f2.R);
}

TEST(SvdTest, DiagonalMatrix) {
    const DenseMatrix A(2, 2, {2.0, 0.0, 0.0, 1.0});
    const SvdFactors f = svd(A);
    ASSERT_EQ(f.singular_values.size(), 2u);
    EXPECT_NEAR(f.singular_values[0], 2.0, 1e-14);
    EXPECT_NEAR(f.singular_values[1], 1.0, 1e-14);
    // identity factors up to column signs; the sign convention fixes them to +1
    EXPECT_LT(max_abs(subtract(f.U, DenseMatrix::identity(2))), 1e-14);
    EXPECT_LT(max_abs(subtract(f.V, DenseMatrix::identity(2))), 1e-14);
}

TEST(SvdTest, RankOneOuterProduct) {
    const int m = 9, n = 5;
    const DenseMatrix x = oracles::random_matrix(m, 1, 41);
    const DenseMatrix y = oracles::random_matrix(n, 1, 42);
    const DenseMatrix A = multiply_A_Bt(x, y);
    const SvdFactors f = svd(A);
    EXPECT_NEAR(f.singular_values[0], norm2(x.data(), m) * norm2(y.data(), n), 1e-12);
    for (std::size_t j = 1; j < f.singular_values.size(); ++j)
        EXPECT_LE(f.singular_values[j], 1e-12 * f.singular_values[0]);
    EXPECT_LE(orthonormality_defect(f.U), 1e-12);
    EXPECT_LE(orthonormality_defect(f.V), 1e-12);
    EXPECT_LE(reconstruction_error(A, f), 1e-12);
}

TEST(SvdTest, AgreesWithEigensolverOracle) {
    const DenseMatrix A = oracles::random_matrix(6, 4, 55);
    const SvdFactors f = svd(A);
    const std::vector<double> oracle = oracles::singular_values_via_gram(A);
    ASSERT_EQ(f.singular_values.size(), 4u);
    for (std::size_t j = 0; j < 4; ++j)
        EXPECT_NEAR(f.singular_values[j], oracle[j], 1e-8 * oracle[0]);
}

TEST(SvdTest, WideMatrixViaTranspose) {
    const DenseMatrix A = oracles::random_matrix(4, 9, 66);
    const SvdFactors f = svd(A);
    ASSERT_EQ(f.U.rows(), 4);
    ASSERT_EQ(f.U.cols(), 4);
    ASSERT_EQ(f.V.rows(), 9);
    ASSERT_EQ(f.V.cols(), 4);
    EXPECT_LE(orthonormality_defect(f.U), 1e-12);
    EXPECT_LE(orthonormality_defect(f.V), 1e-12);
    EXPECT_LE(reconstruction_error(A, f), 1e-10);
}

TEST(SvdTest, OrderingOrthonormalityReconstruction) {
    const DenseMatrix A = oracles::random_matrix(30, 12, 91);
    const SvdFactors f = svd(A, SvdMode::full);
    for (std::size_t j = 1; j < f.singular_values.size(); ++j)
        EXPECT_GE(f.singular_values[j - 1], f.singular_values[j]);
    EXPECT_LE(orthonormality_defect(f.U), 1e-12);
    EXPECT_LE(orthonormality_defect(f.V), 1e-12);
    EXPECT_LE(reconstruction_error(A, f), 1e-10);
}

TEST(SvdTest, Deterministic) {
    const DenseMatrix A = oracles::random_matrix(16, 7, 13);
    const SvdFactors f1 = svd(A);
    const SvdFactors f2 = svd(A);
    EXPECT_TRUE(f1.U == f2.U);
    EXPECT_TRUE(f1.V == f2.V);
    EXPECT_TRUE(f1.singular_values == f2.singular_values);
}

TEST(SvdTest, ExactRankDeficiencyCompletesBasis) {
    const DenseMatrix A(2, 2, {2.0, 0.0, 0.0, 0.0});
    const SvdFactors f = svd(A);
    EXPECT_NEAR(f.singular_values[0], 2.0, 1e-15);
    EXPECT_EQ(f.singular_values[1], 0.0);
    EXPECT_LE(orthonormality_defect(f.U), 1e-14);
    EXPECT_LE(orthonormality_defect(f.V), 1e-14);
}

// Interlacing: sigma_j(Q^T A) <= sigma_j(A) for any orthonormal-columns Q.
TEST(SvdProperty, InterlacingUnderOrthonormalCompression) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const DenseMatrix A = oracles::random_matrix(18, 10, 100 + seed);
        const DenseMatrix Q = thin_qr(oracles::random_matrix(18, 7, 200 + seed)).Q;
        const std::vector<double> sa = singular_values(A);
        const std::vector<double> sc = singular_values(multiply_At_B(Q, A));
        for (std::size_t j = 0; j < sc.size(); ++j)
            EXPECT_LE(sc[j], sa[j] + 1e-12 * sa[0]);
    }
}

// sigma_j(A B) <= sigma_j(A) sigma_1(B).
TEST(SvdProperty, MultiplicativeSingularValueInequality) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const DenseMatrix A = oracles::random_matrix(12, 9, 300 + seed);
        const DenseMatrix B = oracles::random_matrix(9, 8, 400 + seed);
        const std::vector<double> sa = singular_values(A);
        const std::vector<double> sb = singular_values(B);
        const std::vector<double> sab = singular_values(multiply(A, B));
        for (std::size_t j = 0; j < sab.size(); ++j)
            EXPECT_LE(sab[j], sa[j] * sb[0] + 1e-12 * sa[0] * sb[0]);
    }
}

TEST(PseudoinverseTest, DiagonalWithZero) {
    const DenseMatrix A(2, 2, {2.0, 0.0, 0.0, 0.0});
    const DenseMatrix P = pseudoinverse(A);
    EXPECT_NEAR(P(0, 0), 0.5, 1e-14);
    EXPECT_NEAR(P(1, 1), 0.0, 1e-14);
    EXPECT_NEAR(P(0, 1), 0.0, 1e-14);
}

TEST(PseudoinverseTest, IsometryInvertsToTranspose) {
    const DenseMatrix Q = thin_qr(oracles::random_matrix(10, 4, 17)).Q;
    const DenseMatrix P = pseudoinverse(Q);
    EXPECT_LT(max_abs(subtract(P, transpose(Q))), 1e-12);
}

TEST(PseudoinverseTest, PenroseIdentitiesFullRowRank) {
    const DenseMatrix A = oracles::random_matrix(4, 7, 23);
    const DenseMatrix P = pseudoinverse(A);
    EXPECT_LE(max_abs(subtract(multiply(multiply(A, P), A), A)), 1e-10);
    EXPECT_LE(max_abs(subtract(multiply(multiply(P, A), P), P)), 1e-10);
    const DenseMatrix AP = multiply(A, P);
    EXPECT_LE(max_abs(subtract(AP, transpose(AP))), 1e-10);
    const DenseMatrix PA = multiply(P, A);
    EXPECT_LE(max_abs(subtract(PA, transpose(PA))), 1e-10);
}

TEST(BestRankKTest, DiagonalTruncation) {
    const DenseMatrix A = DenseMatrix::from_diag(std::vector<double>{3.0, 2.0, 1.0});
    const SvdFactors f = svd(A);
    const SvdFactors top = best_rank_k(f, 2);
    const DenseMatrix B = reconstruct(top);
    EXPECT_NEAR(B(0, 0), 3.0, 1e-14);
    EXPECT_NEAR(B(1, 1), 2.0, 1e-14);
    EXPECT_NEAR(B(2, 2), 0.0, 1e-14);
    EXPECT_NEAR(frobenius(subtract(A, B)), 1.0, 1e-12);
}

TEST(BestRankKTest, FullRankIsExactAndRangeChecked) {
    const DenseMatrix A = oracles::random_matrix(8, 5, 71);
    const SvdFactors f = svd(A);
    const SvdFactors top = best_rank_k(f, 5);
    EXPECT_LE(frobenius(subtract(A, reconstruct(top))) / frobenius(A), 1e-12);
    EXPECT_THROW(best_rank_k(f, 0), InvalidArgument);
    EXPECT_THROW(best_rank_k(f, 6), InvalidArgument);
}

TEST(BestRankKTest, GapLargeFrobeniusErrorMatchesSpectrumTail) {
    const DenseMatrix A = controlled_gap(10.0, 2026);
    const SvdFactors f = svd(A);
    const SvdFactors top = best_rank_k(f, 15);
    double tail = 0.0;
    for (std::size_t j = 15; j < f.singular_values.size(); ++j)
        tail += f.singular_values[j] * f.singular_values[j];
    tail = std::sqrt(tail);
    const double err = frobenius(subtract(A, reconstruct(top)));
    EXPECT_NEAR(err, tail, 1e-9 * f.singular_values[0]);
}

// Eckart-Young: no random rank-k competitor beats the truncated SVD; checking
// the Ky-Fan partial sums of the error covers every unitarily invariant norm.
TEST(BestRankKTest, BeatsRandomCompetitors) {
    const DenseMatrix A = oracles::random_matrix(12, 8, 99);
    const SvdFactors f = svd(A);
    const int k = 3;
    const DenseMatrix best = reconstruct(best_rank_k(f, k));
    const std::vector<double> best_sv = singular_values(subtract(A, best));
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const DenseMatrix X = oracles::random_matrix(12, k, 500 + seed);
        const DenseMatrix Y = oracles::random_matrix(8, k, 600 + seed);
        const std::vector<double> sv = singular_values(subtract(A, multiply_A_Bt(X, Y)));
        double acc_best = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < sv.size(); ++j) {
            acc_best += best_sv[j];
            acc += sv[j];
            EXPECT_LE(acc_best, acc + 1e-10);
        }
    }
}
