#include <random>
#include <string>

#include <Eigen/Dense>

#include "slr/errors.hpp"
#include "slr/ingest.hpp"

namespace slr {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& z) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    return qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), z.cols());
}

DenseMatrix to_dense(const Eigen::MatrixXd& m) {
    DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    Eigen::Map<RowMajor>(out.data.data(), m.rows(), m.cols()) = m;
    return out;
}

}  // namespace

FactorPair factorize(const DenseMatrix& a, std::size_t rank, std::size_t iterations, std::uint64_t seed) {
    if (rank == 0 || rank > std::min(a.rows, a.cols)) {
        throw ContractViolation("factorize: rank " + std::to_string(rank) + " must be in [1, " +
                                std::to_string(std::min(a.rows, a.cols)) + "]");
    }
    if (iterations == 0) throw ContractViolation("factorize: need at least one iteration");

    const auto n = static_cast<Eigen::Index>(a.rows);
    const auto m = static_cast<Eigen::Index>(a.cols);
    const auto r = static_cast<Eigen::Index>(rank);
    const Eigen::MatrixXd c = Eigen::Map<const RowMajor>(a.data.data(), n, m);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd start(m, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) start(i, j) = normal(rng);
    }

    // Subspace iteration on C^T C: T <- orth(C^T (C T)).
    Eigen::MatrixXd t = orthonormal_basis(start);
    for (std::size_t it = 0; it < iterations; ++it) {
        const Eigen::MatrixXd y = c * t;
        t = orthonormal_basis(c.transpose() * y);
    }
    const Eigen::MatrixXd u = c * t;
    return {to_dense(u), to_dense(t)};
}

FactorPair factorize(const InteractionMatrix& m, std::size_t rank, std::size_t iterations, std::uint64_t seed) {
    return factorize(m.densified(), rank, iterations, seed);
}

}  // namespace slr
