#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "slr/ingest.hpp"
#include "slr/retrieval.hpp"

namespace slr {

enum class DatasetKind {
    Gaussian,       // dense, standard normal factors and queries
    UniformNonneg,  // dense, U[0, 1) factors and queries
    Sparse,         // sparse non-negative: each entry nonzero with probability `density`, Exp(1) valued
    Factors,        // U and T loaded from dense CSV files; queries are rows of U
    Matrix,         // coordinate file factorized to rank `rank`; queries are rows of U
};

std::string_view to_string(DatasetKind d) noexcept;

struct BenchConfig {
    DatasetKind dataset = DatasetKind::Gaussian;
    std::vector<std::size_t> num_targets{1000};  // synthetic only
    std::vector<std::size_t> num_dims{5};        // synthetic only
    double density = 0.1;                        // sparse only
    std::vector<std::size_t> k_values{1};
    std::vector<Algorithm> algorithms{Algorithm::Threshold};
    std::size_t queries_per_cell = 10;
    std::uint64_t seed = 0;
    std::vector<double> fractions{1.0};
    std::size_t budget = 1;  // depth budget for the halted algorithm
    bool record_time = true;

    std::filesystem::path factors_u;  // DatasetKind::Factors
    std::filesystem::path factors_t;
    std::filesystem::path matrix;  // DatasetKind::Matrix
    std::size_t rank = 10;
    std::size_t iterations = 20;
    ValueTransform transform = ValueTransform::None;
    Feedback feedback = Feedback::Explicit;

    /// Throws ContractViolation when a count is zero, a fraction is outside (0, 1], or the
    /// combination is unsupported (Fagin on sparse data).
    void validate() const;
};

/// Flat "key = value" lines; lists are comma separated; '#' starts a comment.
BenchConfig parse_bench_config(std::istream& in);
BenchConfig load_bench_config(const std::filesystem::path& path);

struct BenchRecord {
    std::string dataset;
    std::size_t num_targets;  // after subsampling
    std::size_t num_dims;
    std::size_t k;
    double fraction;
    Algorithm algorithm;
    std::size_t query_index;
    QueryStats stats;
    double relative_scores;  // full_scores_computed / num_targets
    bool exact;

    bool operator==(const BenchRecord&) const = default;
};

/// Deterministic for a fixed seed, except for wall times when `record_time` is set.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

inline constexpr std::string_view kBenchCsvHeader =
    "dataset,M,R,K,fraction,algorithm,query_idx,full_scores,partial_terms,depth,relative_scores,wall_ns";

void write_csv(std::ostream& out, std::span<const BenchRecord> records);
void emit_csv(std::span<const BenchRecord> records, const std::filesystem::path& path);

}  // namespace slr
