#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slr/errors.hpp"
#include "slr/model.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace slr;
using namespace slr::testing;

TEST(Score, ToyBestItem) {
    const auto t = toy_targets();
    EXPECT_EQ(score(toy_query(), item(6), t), 4.7);
}

TEST(Score, ZeroQueryScoresZero) {
    const auto t = toy_targets();
    const QueryVector zero({0.0, 0.0, 0.0, 0.0});
    for (TargetId y = 0; y < t.num_targets(); ++y) EXPECT_EQ(score(zero, y, t), 0.0);
}

TEST(Score, MatchesReorderedSumOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = gaussian_matrix(5, 8, rng);
        const auto u = gaussian_vector(8, rng);
        const auto t = TargetFactors::dense(m);
        for (TargetId y = 0; y < 5; ++y) {
            EXPECT_NEAR(score(QueryVector(u), y, t), oracle_dot(u, m.row(y)), 1e-12);
        }
    }
}

TEST(Score, RejectsDimensionMismatchAndBadTarget) {
    const auto t = toy_targets();
    EXPECT_THROW(score(QueryVector({1.0, 2.0}), 0, t), ContractViolation);
    EXPECT_THROW(score(toy_query(), 10, t), ContractViolation);
}

TEST(Score, LinearInQuery) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> alpha_dist(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = gaussian_matrix(3, 6, rng);
        const auto u = gaussian_vector(6, rng);
        const double alpha = alpha_dist(rng);
        std::vector<double> scaled(u);
        for (auto& x : scaled) x *= alpha;
        const auto t = TargetFactors::dense(m);
        for (TargetId y = 0; y < 3; ++y) {
            const double base = score(QueryVector(u), y, t);
            const double s = score(QueryVector(scaled), y, t);
            // Relative to the magnitude of the terms, not of the (possibly cancelling) sum.
            double mag = 0.0;
            for (std::size_t r = 0; r < 6; ++r) mag += std::abs(alpha * u[r] * m(y, r));
            EXPECT_NEAR(s, alpha * base, 1e-12 * mag);
        }
    }
}

TEST(Score, SparseAgreesBitwiseWithDense) {
    std::mt19937_64 rng(3);
    const auto m = sparse_nonneg_matrix(40, 12, 0.3, rng);
    const auto sparse = TargetFactors::sparse_from_dense(m);
    const auto dense = TargetFactors::dense(m);
    for (int q = 0; q < 20; ++q) {
        const QueryVector u(gaussian_vector(12, rng));
        for (TargetId y = 0; y < 40; ++y) EXPECT_EQ(score(u, y, sparse), score(u, y, dense));
    }
}

TEST(TargetFactors, RejectsInvalidStorage) {
    EXPECT_THROW(TargetFactors::dense(2, 2, {1.0, 2.0, 3.0}), ContractViolation);
    EXPECT_THROW(TargetFactors::dense(1, 2, {1.0, NAN}), ContractViolation);
    EXPECT_THROW(TargetFactors::dense(1, 2, {1.0, INFINITY}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse(3, {{{1, 1.0}, {1, 2.0}}}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse(3, {{{2, 1.0}, {1, 2.0}}}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse(3, {{{3, 1.0}}}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse(3, {{{0, -1.0}}}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse(3, {{{0, 0.0}}}), ContractViolation);
    EXPECT_THROW(TargetFactors::sparse_from_dense(DenseMatrix(1, 2, {0.5, -0.5})), ContractViolation);
}

TEST(TargetFactors, SparseValueLookup) {
    const auto t = TargetFactors::sparse(4, {{{1, 2.0}, {3, 0.5}}, {}});
    EXPECT_EQ(t.value(0, 1), 2.0);
    EXPECT_EQ(t.value(0, 0), 0.0);
    EXPECT_EQ(t.value(0, 3), 0.5);
    EXPECT_EQ(t.value(1, 2), 0.0);
    EXPECT_EQ(t.nonzeros(), 2u);
    EXPECT_EQ(t.densified().to_dense_matrix(), DenseMatrix(2, 4, {0, 2.0, 0, 0.5, 0, 0, 0, 0}));
}

TEST(QueryVector, FromSparse) {
    const SparseEntry entries[] = {{2, -1.5}, {0, 3.0}};
    const auto u = QueryVector::from_sparse(4, entries);
    EXPECT_EQ(u, QueryVector({3.0, 0.0, -1.5, 0.0}));
    const SparseEntry bad[] = {{4, 1.0}};
    EXPECT_THROW(QueryVector::from_sparse(4, bad), ContractViolation);
    EXPECT_THROW(QueryVector({NAN}), ContractViolation);
}

TEST(Argmax, InvariantUnderPositiveScaling) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = gaussian_matrix(30, 5, rng);
        const auto u = gaussian_vector(5, rng);
        auto scaled = u;
        const double a = scale(rng);
        for (auto& x : scaled) x *= a;
        EXPECT_EQ(oracle_topk(u, m, 1)[0].target, oracle_topk(scaled, m, 1)[0].target);
    }
}

TEST(CosineAdapter, IdenticalAndOrthogonal) {
    {
        const std::vector<double> q{3.0, 4.0};
        const auto [u, t] = cosine_adapter(q, DenseMatrix(1, 2, {3.0, 4.0}));
        EXPECT_NEAR(score(u, 0, t), 1.0, 1e-15);
    }
    {
        const std::vector<double> q{1.0, 0.0};
        const auto [u, t] = cosine_adapter(q, DenseMatrix(1, 2, {0.0, 1.0}));
        EXPECT_EQ(score(u, 0, t), 0.0);
    }
}

TEST(CosineAdapter, MatchesOracleAndHasUnitRows) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    DenseMatrix raw(15, 20);
    for (auto& x : raw.data) x = d(rng);
    std::vector<double> q(20);
    for (auto& x : q) x = d(rng);
    const auto [u, t] = cosine_adapter(q, raw);
    EXPECT_NEAR(oracle_dot(u.values(), u.values()), 1.0, 1e-12);
    for (TargetId y = 0; y < 15; ++y) {
        EXPECT_NEAR(score(u, y, t), oracle_cosine(q, raw.row(y)), 1e-12);
        EXPECT_NEAR(std::sqrt(oracle_dot(t.dense_row(y), t.dense_row(y))), 1.0, 1e-12);
    }
}

TEST(CosineAdapter, SparseStaysSparse) {
    std::mt19937_64 rng(9);
    const auto raw = sparse_nonneg_matrix(25, 30, 0.2, rng);
    DenseMatrix filled = raw;
    for (std::size_t y = 0; y < filled.rows; ++y) filled(y, y % 30) += 1.0;  // no empty rows
    const auto sparse = TargetFactors::sparse_from_dense(filled);
    std::vector<double> q(30, 0.0);
    q[2] = 1.0;
    q[7] = 2.0;
    const auto [u, t] = cosine_adapter(q, sparse);
    EXPECT_TRUE(t.is_sparse());
    EXPECT_EQ(t.nonzeros(), sparse.nonzeros());
    for (TargetId y = 0; y < 25; ++y) EXPECT_NEAR(score(u, y, t), oracle_cosine(q, filled.row(y)), 1e-12);
}

TEST(CosineAdapter, ZeroVectorNamesRow) {
    const std::vector<double> q{1.0, 1.0};
    try {
        cosine_adapter(q, DenseMatrix(3, 2, {1.0, 0.0, 0.0, 0.0, 2.0, 2.0}));
        FAIL() << "expected NormalizationError";
    } catch (const NormalizationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    }
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(cosine_adapter(zero, DenseMatrix(1, 2, {1.0, 1.0})), NormalizationError);
}

TEST(BilinearAdapter, IdentityReducesToDotProduct) {
    const BilinearModel model{DenseMatrix(2, 2, {1.0, 0.0, 0.0, 1.0})};
    const std::vector<double> psi{1.0, 2.0};
    const auto [u, t] = bilinear_adapter(psi, model, DenseMatrix(1, 2, {3.0, 4.0}));
    EXPECT_EQ(score(u, 0, t), 11.0);
}

TEST(BilinearAdapter, ZeroWeightsGiveZeroScores) {
    const BilinearModel model{DenseMatrix(3, 2)};
    const std::vector<double> psi{1.0, -2.0, 5.0};
    const auto [u, t] = bilinear_adapter(psi, model, DenseMatrix(4, 2, {1, 2, 3, 4, 5, 6, 7, 8}));
    for (TargetId y = 0; y < 4; ++y) EXPECT_EQ(score(u, y, t), 0.0);
}

TEST(BilinearAdapter, MatchesTripleProductOracle) {
    std::mt19937_64 rng(17);
    const BilinearModel model{gaussian_matrix(3, 4, rng)};
    const auto psi = gaussian_vector(3, rng);
    const auto phi = gaussian_matrix(10, 4, rng);
    const auto [u, t] = bilinear_adapter(psi, model, phi);
    for (TargetId y = 0; y < 10; ++y) {
        EXPECT_NEAR(score(u, y, t), oracle_bilinear(psi, model.weights, phi.row(y)), 1e-12);
    }
}

TEST(BilinearAdapter, RejectsMismatchedShapes) {
    const BilinearModel model{DenseMatrix(3, 4)};
    const std::vector<double> short_psi{1.0, 2.0};
    const std::vector<double> psi{1.0, 2.0, 3.0};
    EXPECT_THROW(bilinear_adapter(short_psi, model, DenseMatrix(2, 4)), ContractViolation);
    EXPECT_THROW(bilinear_adapter(psi, model, DenseMatrix(2, 3)), ContractViolation);
}

TEST(FactorAdapter, RowOfUAgainstT) {
    const DenseMatrix u(2, 2, {1.0, 2.0, -1.0, 0.5});
    const DenseMatrix t(3, 2, {1.0, 1.0, 2.0, 0.0, 0.0, 4.0});
    const auto [q, targets] = factor_adapter(u, 1, t);
    EXPECT_EQ(score(q, 0, targets), -0.5);
    EXPECT_EQ(score(q, 2, targets), 2.0);
    EXPECT_THROW(factor_adapter(u, 2, t), ContractViolation);
    EXPECT_THROW(factor_adapter(u, 0, DenseMatrix(3, 3)), ContractViolation);
}
