#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "slr/matrix.hpp"

namespace slr {

enum class Feedback { Explicit, Implicit };

struct MatrixEntry {
    std::size_t row;
    std::size_t col;
    double value;

    bool operator==(const MatrixEntry&) const = default;
};

/// Sparse interaction matrix C. Implicit feedback stores only observed (strictly positive)
/// values; a missing entry means "not observed".
struct InteractionMatrix {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0;
    std::vector<MatrixEntry> entries;
    Feedback feedback = Feedback::Explicit;

    DenseMatrix densified() const;

    bool operator==(const InteractionMatrix&) const = default;
};

/// C ~ U T^T with U: N x R (singular values folded in) and T: M x R with orthonormal columns.
struct FactorPair {
    DenseMatrix query_factors;   // U
    DenseMatrix target_factors;  // T

    std::size_t rank() const noexcept { return target_factors.cols; }
};

// Coordinate text format: a "num_rows num_cols" line, then one "row col value" triple per line,
// whitespace separated, 0-based. Blank lines are ignored.
InteractionMatrix parse_coordinate(std::istream& in, Feedback feedback = Feedback::Explicit);
InteractionMatrix load_coordinate(const std::filesystem::path& path, Feedback feedback = Feedback::Explicit);
void write_coordinate(std::ostream& out, const InteractionMatrix& m);
void save_coordinate(const InteractionMatrix& m, const std::filesystem::path& path);

// Dense CSV: one row per line, comma separated, written with 17 significant digits.
DenseMatrix parse_dense(std::istream& in);
DenseMatrix load_dense(const std::filesystem::path& path);
void write_dense(std::ostream& out, const DenseMatrix& m);
void save_dense(const DenseMatrix& m, const std::filesystem::path& path);

enum class ValueTransform { None, Log, Log1p };

std::string_view to_string(ValueTransform t) noexcept;
/// Applies the transform to the positive stored values; other values are left unchanged.
InteractionMatrix transform_values(InteractionMatrix m, ValueTransform t);

/// Rank-R truncated decomposition of the densified matrix (missing entries as zeros) by block
/// power iteration with re-orthonormalization. Deterministic for a given seed.
FactorPair factorize(const InteractionMatrix& m, std::size_t rank, std::size_t iterations, std::uint64_t seed = 0);
FactorPair factorize(const DenseMatrix& a, std::size_t rank, std::size_t iterations, std::uint64_t seed = 0);

}  // namespace slr
