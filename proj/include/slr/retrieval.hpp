#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slr/index.hpp"
#include "slr/model.hpp"

namespace slr {

struct ScoredTarget {
    TargetId target;
    double score;

    bool operator==(const ScoredTarget&) const = default;
};

/// Canonical order: higher score first, then lower target id.
constexpr bool ranks_before(const ScoredTarget& a, const ScoredTarget& b) noexcept {
    return a.score != b.score ? a.score > b.score : a.target < b.target;
}

struct QueryStats {
    std::uint64_t full_scores_computed = 0;
    std::uint64_t scores_attempted = 0;  // targets whose scoring was started
    std::uint64_t partial_terms_computed = 0;
    std::uint64_t sorted_accesses = 0;
    std::uint64_t depth_reached = 0;
    std::uint64_t heap_updates = 0;
    std::uint64_t wall_time_ns = 0;

    bool operator==(const QueryStats&) const = default;
};

/// Bounds after a completed depth step of the threshold family.
struct BoundSnapshot {
    std::uint64_t depth;
    double lower;
    double upper;
};

struct TopKResult {
    std::vector<ScoredTarget> entries;  // canonical order, length min(K, M) when exact
    bool exact = true;
    double lower_bound = -std::numeric_limits<double>::infinity();
    double upper_bound = std::numeric_limits<double>::infinity();
    QueryStats stats;
    std::vector<BoundSnapshot> bound_trace;
    std::vector<TargetId> attempted;  // targets whose scoring was started, in order
};

/// Bounded min-heap holding the K best targets seen so far; the root is the canonical worst.
class TopKHeap {
public:
    explicit TopKHeap(std::size_t capacity);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return heap_.size(); }
    bool full() const noexcept { return heap_.size() == capacity_; }

    /// Canonical worst entry; requires size() > 0.
    const ScoredTarget& worst() const { return heap_.front(); }

    /// -inf until the heap holds K entries, then the K-th best score.
    double lower_bound() const noexcept {
        return full() ? heap_.front().score : -std::numeric_limits<double>::infinity();
    }

    /// Whether `c` would enter the heap.
    bool admits(const ScoredTarget& c) const noexcept { return !full() || ranks_before(c, heap_.front()); }

    /// Inserts `c` if it ranks among the K best, evicting the worst. Returns true on change.
    bool offer(const ScoredTarget& c);

    std::vector<ScoredTarget> sorted() const;

private:
    std::size_t capacity_;
    std::vector<ScoredTarget> heap_;
};

enum class Algorithm { Naive, Fagin, Threshold, Partial, Halted };

std::string_view to_string(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

/// Scores every target.
TopKResult naive_topk(const QueryVector& u, const TargetFactors& t, std::size_t k);

/// Sorted access until K targets were seen in every traversed list, then scores every target
/// seen. Throws UnsupportedError on a sparse index.
TopKResult fagin_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k);

/// Threshold algorithm: at each depth pops one entry per traversed list, scores targets not
/// scored before, and stops once the K-th best score reaches the sum of frontier contributions.
TopKResult threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k);

/// Threshold traversal where each score starts from the depth's upper bound, swaps frontier
/// terms for true terms one dimension at a time and gives up once it cannot enter the top K.
TopKResult partial_threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                                  std::size_t k);

/// Threshold algorithm stopped after at most `max_depth` depth steps. `exact` is false when the
/// stopping criterion was not reached; the result then reports the remaining bound gap.
TopKResult halted_threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                                 std::size_t k, std::size_t max_depth);

/// Dispatches on `algo`. `max_depth` is only used by Algorithm::Halted.
TopKResult run_topk(Algorithm algo, const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                    std::size_t k, std::size_t max_depth = 0);

}  // namespace slr
