#include "slr/index.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

#include <boost/crc.hpp>

#include "slr/errors.hpp"

namespace slr {

namespace {

using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true>;

constexpr std::uint8_t kMagic[4] = {'S', 'L', 'R', 'X'};
constexpr std::uint8_t kFlagSparse = 0x01;
constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 4 + 8;
constexpr std::size_t kEntrySize = 8 + 4;

std::uint64_t crc64(std::span<const std::uint8_t> bytes) {
    Crc64 crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t pos) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[pos + i]) << (8 * i);
    return v;
}

bool entry_before(const ListEntry& a, const ListEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.target < b.target;
}

}  // namespace

SortedIndex::SortedIndex(std::size_t num_targets, bool sparse, std::vector<std::vector<ListEntry>> lists)
    : num_targets_(num_targets), sparse_(sparse), lists_(std::move(lists)) {}

SortedIndex build_index(const TargetFactors& t) {
    const std::size_t m = t.num_targets();
    const std::size_t dims = t.num_dims();
    std::vector<std::vector<ListEntry>> lists(dims);
    if (t.is_sparse()) {
        for (TargetId y = 0; y < m; ++y) {
            for (const auto& e : t.sparse_row(y)) lists[e.dim].push_back({e.value, y});
        }
    } else {
        for (auto& l : lists) l.reserve(m);
        for (TargetId y = 0; y < m; ++y) {
            const auto row = t.dense_row(y);
            for (std::size_t r = 0; r < dims; ++r) lists[r].push_back({row[r], y});
        }
    }
    for (auto& l : lists) std::sort(l.begin(), l.end(), entry_before);
    return SortedIndex(m, t.is_sparse(), std::move(lists));
}

std::vector<std::uint8_t> serialize_index(const SortedIndex& idx) {
    std::vector<std::uint8_t> out;
    std::size_t total = kHeaderSize + 8;
    for (std::size_t r = 0; r < idx.num_dims(); ++r) total += 8 + idx.list(r).size() * kEntrySize;
    out.reserve(total);

    for (auto b : kMagic) out.push_back(b);
    put_le<std::uint16_t>(out, kIndexFormatVersion);
    put_le<std::uint8_t>(out, idx.is_sparse() ? kFlagSparse : 0);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(idx.num_dims()));
    put_le<std::uint64_t>(out, idx.num_targets());
    for (std::size_t r = 0; r < idx.num_dims(); ++r) {
        const auto list = idx.list(r);
        put_le<std::uint64_t>(out, list.size());
        for (const auto& e : list) {
            put_f64(out, e.value);
            put_le<std::uint32_t>(out, e.target);
        }
    }
    put_le<std::uint64_t>(out, crc64(out));
    return out;
}

SortedIndex deserialize_index(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw FormatError("index: bad magic (expected \"SLRX\")");
    }
    if (bytes.size() < kHeaderSize + 8) throw TruncatedError("index: file shorter than header");

    const bool sparse_flag = (bytes[6] & kFlagSparse) != 0;
    const auto dims = get_le<std::uint32_t>(bytes, 7);
    const auto m = get_le<std::uint64_t>(bytes, 11);

    // Walk the list lengths first. A length that cannot be valid for this header means the
    // bytes were altered, which the checksum reports; running out of bytes on otherwise
    // plausible lengths means the file was cut short.
    bool plausible = true;
    std::size_t pos = kHeaderSize;
    std::vector<std::pair<std::size_t, std::uint64_t>> spans;
    for (std::uint32_t r = 0; r < dims && plausible; ++r) {
        if (pos + 8 > bytes.size()) throw TruncatedError("index: missing length of list " + std::to_string(r));
        const auto len = get_le<std::uint64_t>(bytes, pos);
        if (sparse_flag ? len > m : len != m) {
            plausible = false;
            break;
        }
        pos += 8;
        if (len > (bytes.size() - pos) / kEntrySize) {
            throw TruncatedError("index: list " + std::to_string(r) + " extends past end of file");
        }
        spans.emplace_back(pos, len);
        pos += static_cast<std::size_t>(len) * kEntrySize;
    }
    if (plausible && pos + 8 > bytes.size()) throw TruncatedError("index: missing checksum");

    const std::size_t body = bytes.size() - 8;
    const auto stored = get_le<std::uint64_t>(bytes, body);
    if (crc64(bytes.first(body)) != stored) throw ChecksumError("index: checksum mismatch");

    const auto version = get_le<std::uint16_t>(bytes, 4);
    if (version != kIndexFormatVersion) {
        throw FormatError("index: unsupported version " + std::to_string(version));
    }
    if ((bytes[6] & ~kFlagSparse) != 0) throw FormatError("index: unknown flags");
    if (!plausible) throw FormatError("index: list length inconsistent with header");
    if (pos != body) throw FormatError("index: trailing bytes before checksum");
    if (m > std::numeric_limits<TargetId>::max()) throw FormatError("index: too many targets");

    std::vector<std::vector<ListEntry>> lists(dims);
    for (std::uint32_t r = 0; r < dims; ++r) {
        auto [start, len] = spans[r];
        auto& list = lists[r];
        list.reserve(static_cast<std::size_t>(len));
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (std::uint64_t i = 0; i < len; ++i) {
            const std::size_t at = start + static_cast<std::size_t>(i) * kEntrySize;
            ListEntry e{std::bit_cast<double>(get_le<std::uint64_t>(bytes, at)), get_le<std::uint32_t>(bytes, at + 8)};
            if (e.target >= m || seen[e.target]) {
                throw FormatError("index: list " + std::to_string(r) + " has an invalid or repeated target id");
            }
            seen[e.target] = true;
            if (!list.empty() && !entry_before(list.back(), e)) {
                throw FormatError("index: list " + std::to_string(r) + " is not sorted");
            }
            list.push_back(e);
        }
    }
    return SortedIndex(static_cast<std::size_t>(m), sparse_flag, std::move(lists));
}

void save_index(const SortedIndex& idx, const std::filesystem::path& path) {
    const auto bytes = serialize_index(idx);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

SortedIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path.string());
    return deserialize_index(bytes);
}

void check_index_matches(const SortedIndex& idx, const TargetFactors& t) {
    if (idx.num_targets() != t.num_targets() || idx.num_dims() != t.num_dims()) {
        throw ContractViolation("index is " + std::to_string(idx.num_targets()) + "x" +
                                std::to_string(idx.num_dims()) + " but factors are " +
                                std::to_string(t.num_targets()) + "x" + std::to_string(t.num_dims()));
    }
    if (idx.is_sparse() != t.is_sparse()) {
        throw ContractViolation("index and factors disagree on sparse storage");
    }
    std::size_t entries = 0;
    for (std::size_t r = 0; r < idx.num_dims(); ++r) {
        for (const auto& e : idx.list(r)) {
            if (std::bit_cast<std::uint64_t>(e.value) != std::bit_cast<std::uint64_t>(t.value(e.target, r))) {
                throw ContractViolation("index entry for target " + std::to_string(e.target) + " in list " +
                                        std::to_string(r) + " does not match the factors");
            }
        }
        entries += idx.list(r).size();
    }
    if (entries != t.nonzeros()) throw ContractViolation("index and factors hold different entry counts");
}

ListCursor::ListCursor(const SortedIndex& idx, const QueryVector& u)
    : sparse_(idx.is_sparse()),
      direction_(idx.num_dims(), Direction::Skipped),
      depth_(idx.num_dims(), 0),
      length_(idx.num_dims(), 0),
      bound_(idx.num_dims(), 0.0),
      next_(idx.num_dims(), 0),
      last_(idx.num_dims(), 0),
      run_begin_(idx.num_dims(), 0),
      run_end_(idx.num_dims(), 0) {
    if (u.dims() != idx.num_dims()) {
        throw ContractViolation("query has " + std::to_string(u.dims()) + " dimensions, index has " +
                                std::to_string(idx.num_dims()));
    }
    for (std::size_t r = 0; r < idx.num_dims(); ++r) {
        length_[r] = idx.list(r).size();
        if (u[r] > 0.0) {
            direction_[r] = Direction::Descending;
        } else if (u[r] < 0.0 && !sparse_) {
            direction_[r] = Direction::Ascending;
        }
        if (direction_[r] != Direction::Skipped) {
            active_.push_back(r);
            bound_[r] = length_[r] == 0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        if (direction_[r] == Direction::Ascending) {
            run_end_[r] = length_[r];
            enter_run(idx.list(r), r);
        }
    }
}

// Ascending walks visit runs of equal values from the bottom of the list up, and each run
// front to back, so equal contributions still come out in ascending target order.
void ListCursor::enter_run(std::span<const ListEntry> list, std::size_t r) {
    const std::size_t end = run_end_[r];
    if (end == 0) return;
    const double v = list[end - 1].value;
    const auto first = std::partition_point(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(end),
                                            [v](const ListEntry& e) { return e.value > v; });
    run_begin_[r] = static_cast<std::size_t>(first - list.begin());
    next_[r] = run_begin_[r];
}

bool ListCursor::all_exhausted() const {
    return std::all_of(active_.begin(), active_.end(), [this](std::size_t r) { return depth_[r] == length_[r]; });
}

std::optional<FrontierItem> frontier(const SortedIndex& idx, ListCursor& cursor, const QueryVector& u,
                                     std::size_t r) {
    if (cursor.skipped(r)) return std::nullopt;
    if (cursor.exhausted(r)) {
        // Every target with t_r > 0 has been popped; the rest contribute exactly 0.
        if (cursor.sparse_) cursor.bound_[r] = 0.0;
        return std::nullopt;
    }
    const auto list = idx.list(r);
    const std::size_t at = cursor.next_[r];
    cursor.last_[r] = at;
    ++cursor.depth_[r];
    if (cursor.direction_[r] == Direction::Descending) {
        cursor.next_[r] = at + 1;
    } else if (at + 1 < cursor.run_end_[r]) {
        cursor.next_[r] = at + 1;
    } else {
        cursor.run_end_[r] = cursor.run_begin_[r];
        cursor.enter_run(list, r);
    }
    const ListEntry& e = list[at];
    const double c = u[r] * e.value;
    cursor.bound_[r] = c;
    return FrontierItem{e.target, c};
}

}  // namespace slr
