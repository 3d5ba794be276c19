#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "slr/matrix.hpp"

namespace slr {

using TargetId = std::uint32_t;

struct SparseEntry {
    std::uint32_t dim;
    double value;

    bool operator==(const SparseEntry&) const = default;
};

/// The query side u(x) of a separable linear relational model. Always stored densely;
/// a sparse form is accepted at construction.
class QueryVector {
public:
    QueryVector() = default;
    explicit QueryVector(std::vector<double> values);

    static QueryVector from_sparse(std::size_t dims, std::span<const SparseEntry> entries);

    std::size_t dims() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t r) const { return values_[r]; }

    bool operator==(const QueryVector&) const = default;

private:
    std::vector<double> values_;
};

/// The target side t(y) for all M targets: the database being queried.
///
/// Dense storage is an M x R row-major array of finite values. Sparse storage keeps, per
/// target, the strictly positive entries ordered by dimension; signed data must be dense.
/// Target ids are 0..M-1.
class TargetFactors {
public:
    TargetFactors() = default;

    static TargetFactors dense(std::size_t num_targets, std::size_t num_dims, std::vector<double> row_major);
    static TargetFactors dense(const DenseMatrix& m);
    static TargetFactors sparse(std::size_t num_dims, std::vector<std::vector<SparseEntry>> rows);
    /// Drops zeros from a dense matrix; throws if any value is negative.
    static TargetFactors sparse_from_dense(const DenseMatrix& m);

    std::size_t num_targets() const noexcept { return num_targets_; }
    std::size_t num_dims() const noexcept { return num_dims_; }
    bool is_sparse() const noexcept { return sparse_; }

    /// t_r(y); zero for entries absent from a sparse row.
    double value(TargetId y, std::size_t r) const;

    std::span<const double> dense_row(TargetId y) const {
        return {dense_.data() + static_cast<std::size_t>(y) * num_dims_, num_dims_};
    }
    std::span<const SparseEntry> sparse_row(TargetId y) const {
        return {entries_.data() + offsets_[y], offsets_[y + 1] - offsets_[y]};
    }

    std::size_t nonzeros() const noexcept { return sparse_ ? entries_.size() : dense_.size(); }

    DenseMatrix to_dense_matrix() const;
    TargetFactors densified() const;

    bool operator==(const TargetFactors&) const = default;

private:
    std::size_t num_targets_ = 0;
    std::size_t num_dims_ = 0;
    bool sparse_ = false;
    std::vector<double> dense_;
    std::vector<SparseEntry> entries_;
    std::vector<std::size_t> offsets_;
};

/// s(x, y) = sum_r u_r t_r(y), accumulated left to right over r in double precision.
/// Entries absent from a sparse row contribute nothing, which leaves the sum bit-identical.
double score(const QueryVector& u, TargetId y, const TargetFactors& t);

namespace detail {

inline double score_unchecked(std::span<const double> u, TargetId y, const TargetFactors& t) {
    double acc = 0.0;
    if (t.is_sparse()) {
        for (const auto& e : t.sparse_row(y)) acc += u[e.dim] * e.value;
    } else {
        const auto row = t.dense_row(y);
        for (std::size_t r = 0; r < row.size(); ++r) acc += u[r] * row[r];
    }
    return acc;
}

}  // namespace detail

/// Instance-to-target bilinear model s(x, y) = psi(x)^T W phi(y) with W of shape P x Q.
struct BilinearModel {
    DenseMatrix weights;

    std::size_t instance_dims() const noexcept { return weights.rows; }
    std::size_t target_dims() const noexcept { return weights.cols; }
};

/// Scales the query and every target row to unit L2 norm so score() is the cosine similarity.
/// Sparse targets stay sparse. Throws NormalizationError naming the first all-zero vector.
std::pair<QueryVector, TargetFactors> cosine_adapter(std::span<const double> raw_query,
                                                     const TargetFactors& raw_targets);
std::pair<QueryVector, TargetFactors> cosine_adapter(std::span<const double> raw_query,
                                                     const DenseMatrix& raw_targets);

/// Factor-model adapter: a row of U becomes the query and T is the target database.
std::pair<QueryVector, TargetFactors> factor_adapter(const DenseMatrix& query_factors, std::size_t row,
                                                     const DenseMatrix& target_factors);

/// Reduces psi^T W phi(y) to u = W^T psi and t(y) = phi(y).
std::pair<QueryVector, TargetFactors> bilinear_adapter(std::span<const double> psi, const BilinearModel& model,
                                                       const DenseMatrix& phi);

}  // namespace slr
