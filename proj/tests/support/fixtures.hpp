#pragma once

// Shared test instances.
//
// The 10 x 4 toy database is labelled 1..10 in its usual printed form; here target ids are
// 0-based, so printed item n is target n - 1 (the best item, printed as 6, is target 5).

#include <cstddef>
#include <random>
#include <vector>

#include "slr/matrix.hpp"
#include "slr/model.hpp"

namespace slr::testing {

inline DenseMatrix toy_factors() {
    return DenseMatrix(10, 4,
                       {-0.5, -1.4, -0.8, -1.0,  //
                        0.9,  -1.9, -0.3, 0.5,   //
                        -0.8, -0.4, -0.1, 0.9,   //
                        -0.7, -1.7, 0.2,  -2.5,  //
                        0.8,  0.2,  0.0,  0.7,   //
                        1.0,  1.6,  0.9,  -0.6,  //
                        0.1,  0.4,  -0.6, -2.0,  //
                        -2.4, 0.6,  0.4,  -0.4,  //
                        -1.6, 0.2,  1.0,  0.3,   //
                        0.0,  1.0,  -0.6, 1.4});
}

inline TargetFactors toy_targets() { return TargetFactors::dense(toy_factors()); }

inline QueryVector toy_query() { return QueryVector({0.1, 2.5, 1.0, 0.5}); }

/// Printed label (1-based) to target id.
constexpr TargetId item(int label) { return static_cast<TargetId>(label - 1); }

/// Two-dimensional instance on which Fagin's algorithm needs M/2 depth steps while the
/// threshold algorithm stops after two, for u = (1, 1) and K = 1. M must be even and >= 4.
///
/// List 1 visits targets 0, 1, ..., M-1. List 2 starts at M-1 and walks down, with targets
/// M/2 - 1 and M/2 swapped so that the first target seen in both lists appears at depth M/2
/// exactly. Targets 0 and M-1 score 1.1; every other target scores about 1.0.
inline TargetFactors adversarial_targets(std::size_t m) {
    const std::size_t half = m / 2;
    const double eps = 0.01 / static_cast<double>(m);
    DenseMatrix t(m, 2);
    t(0, 0) = 1.0;
    t(m - 1, 0) = 0.1;
    for (std::size_t i = 1; i + 1 < m; ++i) t(i, 0) = 0.5 + eps * static_cast<double>(m - 1 - i);

    std::vector<std::size_t> order2;  // list 2 order of the middle targets
    for (std::size_t i = m - 2; i >= half + 1; --i) order2.push_back(i);
    order2.push_back(half - 1);
    order2.push_back(half);
    for (std::size_t i = half - 2; i >= 1; --i) order2.push_back(i);
    t(m - 1, 1) = 1.0;
    t(0, 1) = 0.1;
    for (std::size_t p = 0; p < order2.size(); ++p) {
        t(order2[p], 1) = 0.5 + eps * static_cast<double>(m - 2 - p);
    }
    return TargetFactors::dense(t);
}

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    DenseMatrix m(rows, cols);
    for (auto& x : m.data) x = d(rng);
    return m;
}

inline std::vector<double> gaussian_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

/// Non-negative sparse matrix: each entry is Exp(1) with probability `density`, else 0.
inline DenseMatrix sparse_nonneg_matrix(std::size_t rows, std::size_t cols, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution keep(density);
    std::exponential_distribution<double> value(1.0);
    DenseMatrix m(rows, cols);
    for (auto& x : m.data) {
        if (keep(rng)) x = value(rng);
    }
    return m;
}

}  // namespace slr::testing
