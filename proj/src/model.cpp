#include "slr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slr/errors.hpp"

namespace slr {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ContractViolation(std::string(what) + ": non-finite value at position " + std::to_string(i));
        }
    }
}

double l2_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != rows * cols) {
        throw ContractViolation("dense matrix: expected " + std::to_string(rows * cols) + " values, got " +
                                std::to_string(data.size()));
    }
}

QueryVector::QueryVector(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "query vector");
}

QueryVector QueryVector::from_sparse(std::size_t dims, std::span<const SparseEntry> entries) {
    std::vector<double> values(dims, 0.0);
    for (const auto& e : entries) {
        if (e.dim >= dims) {
            throw ContractViolation("sparse query: dimension " + std::to_string(e.dim) + " out of range " +
                                    std::to_string(dims));
        }
        values[e.dim] = e.value;
    }
    return QueryVector(std::move(values));
}

TargetFactors TargetFactors::dense(std::size_t num_targets, std::size_t num_dims, std::vector<double> row_major) {
    if (row_major.size() != num_targets * num_dims) {
        throw ContractViolation("target factors: expected " + std::to_string(num_targets * num_dims) +
                                " values, got " + std::to_string(row_major.size()));
    }
    if (num_targets > std::size_t{UINT32_MAX}) throw ContractViolation("target factors: too many targets");
    require_finite(row_major, "target factors");
    TargetFactors t;
    t.num_targets_ = num_targets;
    t.num_dims_ = num_dims;
    t.sparse_ = false;
    t.dense_ = std::move(row_major);
    return t;
}

TargetFactors TargetFactors::dense(const DenseMatrix& m) { return dense(m.rows, m.cols, m.data); }

TargetFactors TargetFactors::sparse(std::size_t num_dims, std::vector<std::vector<SparseEntry>> rows) {
    if (rows.size() > std::size_t{UINT32_MAX}) throw ContractViolation("target factors: too many targets");
    TargetFactors t;
    t.num_targets_ = rows.size();
    t.num_dims_ = num_dims;
    t.sparse_ = true;
    t.offsets_.reserve(rows.size() + 1);
    t.offsets_.push_back(0);
    for (std::size_t y = 0; y < rows.size(); ++y) {
        std::int64_t prev = -1;
        for (const auto& e : rows[y]) {
            if (e.dim >= num_dims || static_cast<std::int64_t>(e.dim) <= prev) {
                throw ContractViolation("sparse target " + std::to_string(y) +
                                        ": dimension indices must be strictly increasing and below " +
                                        std::to_string(num_dims));
            }
            if (!std::isfinite(e.value) || !(e.value > 0.0)) {
                throw ContractViolation("sparse target " + std::to_string(y) + ": value at dimension " +
                                        std::to_string(e.dim) + " must be finite and strictly positive");
            }
            prev = e.dim;
            t.entries_.push_back(e);
        }
        t.offsets_.push_back(t.entries_.size());
    }
    return t;
}

TargetFactors TargetFactors::sparse_from_dense(const DenseMatrix& m) {
    std::vector<std::vector<SparseEntry>> rows(m.rows);
    for (std::size_t y = 0; y < m.rows; ++y) {
        for (std::size_t r = 0; r < m.cols; ++r) {
            const double v = m(y, r);
            if (v < 0.0) {
                throw ContractViolation("sparse storage requires non-negative values; row " + std::to_string(y) +
                                        ", column " + std::to_string(r) + " is negative");
            }
            if (v != 0.0) rows[y].push_back({static_cast<std::uint32_t>(r), v});
        }
    }
    return sparse(m.cols, std::move(rows));
}

double TargetFactors::value(TargetId y, std::size_t r) const {
    if (!sparse_) return dense_[static_cast<std::size_t>(y) * num_dims_ + r];
    const auto row = sparse_row(y);
    const auto it = std::lower_bound(row.begin(), row.end(), r,
                                     [](const SparseEntry& e, std::size_t dim) { return e.dim < dim; });
    return (it != row.end() && it->dim == r) ? it->value : 0.0;
}

DenseMatrix TargetFactors::to_dense_matrix() const {
    if (!sparse_) return DenseMatrix(num_targets_, num_dims_, dense_);
    DenseMatrix m(num_targets_, num_dims_);
    for (std::size_t y = 0; y < num_targets_; ++y) {
        for (const auto& e : sparse_row(static_cast<TargetId>(y))) m(y, e.dim) = e.value;
    }
    return m;
}

TargetFactors TargetFactors::densified() const { return dense(to_dense_matrix()); }

double score(const QueryVector& u, TargetId y, const TargetFactors& t) {
    if (u.dims() != t.num_dims()) {
        throw ContractViolation("score: query has " + std::to_string(u.dims()) + " dimensions, targets have " +
                                std::to_string(t.num_dims()));
    }
    if (y >= t.num_targets()) {
        throw ContractViolation("score: target " + std::to_string(y) + " out of range " +
                                std::to_string(t.num_targets()));
    }
    return detail::score_unchecked(u.values(), y, t);
}

std::pair<QueryVector, TargetFactors> cosine_adapter(std::span<const double> raw_query,
                                                     const TargetFactors& raw_targets) {
    if (raw_query.size() != raw_targets.num_dims()) {
        throw ContractViolation("cosine adapter: query has " + std::to_string(raw_query.size()) +
                                " dimensions, targets have " + std::to_string(raw_targets.num_dims()));
    }
    const double qn = l2_norm(raw_query);
    if (qn == 0.0) throw NormalizationError("cosine adapter: query vector has zero norm");
    std::vector<double> q(raw_query.begin(), raw_query.end());
    for (auto& x : q) x /= qn;

    const std::size_t m = raw_targets.num_targets();
    if (raw_targets.is_sparse()) {
        std::vector<std::vector<SparseEntry>> rows(m);
        for (std::size_t y = 0; y < m; ++y) {
            const auto row = raw_targets.sparse_row(static_cast<TargetId>(y));
            double acc = 0.0;
            for (const auto& e : row) acc += e.value * e.value;
            const double n = std::sqrt(acc);
            if (n == 0.0) {
                throw NormalizationError("cosine adapter: target row " + std::to_string(y) + " has zero norm");
            }
            rows[y].reserve(row.size());
            for (const auto& e : row) rows[y].push_back({e.dim, e.value / n});
        }
        return {QueryVector(std::move(q)), TargetFactors::sparse(raw_targets.num_dims(), std::move(rows))};
    }

    DenseMatrix dense = raw_targets.to_dense_matrix();
    for (std::size_t y = 0; y < m; ++y) {
        auto row = dense.row(y);
        const double n = l2_norm(row);
        if (n == 0.0) throw NormalizationError("cosine adapter: target row " + std::to_string(y) + " has zero norm");
        for (auto& x : row) x /= n;
    }
    return {QueryVector(std::move(q)), TargetFactors::dense(dense)};
}

std::pair<QueryVector, TargetFactors> cosine_adapter(std::span<const double> raw_query,
                                                     const DenseMatrix& raw_targets) {
    return cosine_adapter(raw_query, TargetFactors::dense(raw_targets));
}

std::pair<QueryVector, TargetFactors> factor_adapter(const DenseMatrix& query_factors, std::size_t row,
                                                     const DenseMatrix& target_factors) {
    if (query_factors.cols != target_factors.cols) {
        throw ContractViolation("factor adapter: U has rank " + std::to_string(query_factors.cols) +
                                ", T has rank " + std::to_string(target_factors.cols));
    }
    if (row >= query_factors.rows) {
        throw ContractViolation("factor adapter: query row " + std::to_string(row) + " out of range");
    }
    const auto r = query_factors.row(row);
    return {QueryVector(std::vector<double>(r.begin(), r.end())), TargetFactors::dense(target_factors)};
}

std::pair<QueryVector, TargetFactors> bilinear_adapter(std::span<const double> psi, const BilinearModel& model,
                                                       const DenseMatrix& phi) {
    const auto& w = model.weights;
    if (psi.size() != w.rows) {
        throw ContractViolation("bilinear adapter: psi has length " + std::to_string(psi.size()) + ", W has " +
                                std::to_string(w.rows) + " rows");
    }
    if (phi.cols != w.cols) {
        throw ContractViolation("bilinear adapter: phi rows have length " + std::to_string(phi.cols) +
                                ", W has " + std::to_string(w.cols) + " columns");
    }
    require_finite(w.data, "bilinear weights");
    std::vector<double> u(w.cols, 0.0);
    for (std::size_t q = 0; q < w.cols; ++q) {
        double acc = 0.0;
        for (std::size_t p = 0; p < w.rows; ++p) acc += psi[p] * w(p, q);
        u[q] = acc;
    }
    return {QueryVector(std::move(u)), TargetFactors::dense(phi)};
}

}  // namespace slr
