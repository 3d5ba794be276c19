#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slr/model.hpp"

namespace slr {

struct ListEntry {
    double value;
    TargetId target;

    bool operator==(const ListEntry&) const = default;
};

/// R lists L_1..L_R, one per dimension, each ordered by value descending and then by target id
/// ascending. Dense lists hold every target; sparse lists hold only targets with t_r(y) > 0.
class SortedIndex {
public:
    SortedIndex() = default;
    SortedIndex(std::size_t num_targets, bool sparse, std::vector<std::vector<ListEntry>> lists);

    std::size_t num_targets() const noexcept { return num_targets_; }
    std::size_t num_dims() const noexcept { return lists_.size(); }
    bool is_sparse() const noexcept { return sparse_; }
    std::span<const ListEntry> list(std::size_t r) const { return lists_[r]; }

    bool operator==(const SortedIndex&) const = default;

private:
    std::size_t num_targets_ = 0;
    bool sparse_ = false;
    std::vector<std::vector<ListEntry>> lists_;
};

/// O(R M log M). Deterministic for identical input.
SortedIndex build_index(const TargetFactors& t);

// Binary layout (little-endian):
//   "SLRX" | u16 version = 1 | u8 flags (bit 0 = sparse) | u32 R | u64 M
//   R x { u64 length | length x (f64 value, u32 target) }
//   u64 CRC-64/XZ of every preceding byte
inline constexpr std::uint16_t kIndexFormatVersion = 1;

std::vector<std::uint8_t> serialize_index(const SortedIndex& idx);
/// Throws FormatError (magic/version), TruncatedError, or ChecksumError.
SortedIndex deserialize_index(std::span<const std::uint8_t> bytes);

void save_index(const SortedIndex& idx, const std::filesystem::path& path);
SortedIndex load_index(const std::filesystem::path& path);

/// Throws ContractViolation unless `idx` was built from `t` (same shape, storage and values).
void check_index_matches(const SortedIndex& idx, const TargetFactors& t);

enum class Direction : std::uint8_t { Descending, Ascending, Skipped };

struct FrontierItem {
    TargetId target;
    double contribution;  // u_r * t_r(target)
};

/// Per-query traversal state over a SortedIndex.
///
/// A list is walked from the top when u_r > 0 and from the bottom when u_r < 0 (the reverted
/// list). Either way contributions come out non-increasing and equal contributions in ascending
/// target order. A list is skipped when u_r = 0, and also for u_r < 0 on a sparse index: absent entries are
/// zero and dominate every negative contribution, so the unseen maximum there is exactly 0.
class ListCursor {
public:
    ListCursor(const SortedIndex& idx, const QueryVector& u);

    Direction direction(std::size_t r) const { return direction_[r]; }
    std::size_t depth(std::size_t r) const { return depth_[r]; }
    bool skipped(std::size_t r) const { return direction_[r] == Direction::Skipped; }
    bool exhausted(std::size_t r) const { return !skipped(r) && depth_[r] == length_[r]; }

    /// Upper bound on u_r * t_r(y) for any target y not popped from list r before the current
    /// depth: the last popped contribution, frozen once a dense list runs out. Zero for skipped
    /// lists and for a sparse list once a pop finds it exhausted. +inf before the first pop.
    double bound_term(std::size_t r) const { return bound_[r]; }

    /// Position in list r of the entry the next pop returns; requires !exhausted(r).
    std::size_t next_position(std::size_t r) const { return next_[r]; }
    /// Position in list r of the last popped entry; requires depth(r) > 0.
    std::size_t last_position(std::size_t r) const { return last_[r]; }

    /// Lists that are traversed (not skipped), in dimension order.
    std::span<const std::size_t> active_lists() const { return active_; }
    bool all_exhausted() const;

private:
    friend std::optional<FrontierItem> frontier(const SortedIndex&, ListCursor&, const QueryVector&, std::size_t);

    void enter_run(std::span<const ListEntry> list, std::size_t r);

    bool sparse_ = false;
    std::vector<Direction> direction_;
    std::vector<std::size_t> depth_;
    std::vector<std::size_t> length_;
    std::vector<double> bound_;
    std::vector<std::size_t> next_;
    std::vector<std::size_t> last_;
    std::vector<std::size_t> run_begin_;  // ascending walks: bounds of the run of equal values
    std::vector<std::size_t> run_end_;    // being visited
    std::vector<std::size_t> active_;
};

/// Pops the next entry of list r in the direction given by sign(u_r) and advances the cursor.
/// Returns nullopt when the list is skipped or exhausted.
std::optional<FrontierItem> frontier(const SortedIndex& idx, ListCursor& cursor, const QueryVector& u,
                                     std::size_t r);

}  // namespace slr
