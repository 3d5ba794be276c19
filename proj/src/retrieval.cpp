#include "slr/retrieval.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "slr/errors.hpp"

namespace slr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count());
}

void check_query(const QueryVector& u, const TargetFactors& t, std::size_t k) {
    if (k == 0) throw ContractViolation("top-K query with K = 0");
    if (u.dims() != t.num_dims()) {
        throw ContractViolation("query has " + std::to_string(u.dims()) + " dimensions, targets have " +
                                std::to_string(t.num_dims()));
    }
}

void check_query(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k) {
    check_query(u, t, k);
    if (idx.num_targets() != t.num_targets() || idx.num_dims() != t.num_dims() || idx.is_sparse() != t.is_sparse()) {
        throw ContractViolation("index does not match target factors");
    }
}

void finish(TopKResult& res, const TopKHeap& heap, Clock::time_point start) {
    res.entries = heap.sorted();
    res.lower_bound = heap.lower_bound();
    res.stats.wall_time_ns = elapsed_ns(start);
}

/// Exhaustive-style results: every non-returned target scores at most the K-th best.
void certify_exhaustive(TopKResult& res, const TopKHeap& heap) {
    res.exact = true;
    res.upper_bound = heap.full() ? heap.lower_bound() : -kInf;
}

void offer(TopKHeap& heap, TopKResult& res, TargetId y, double s) {
    if (heap.offer({y, s})) ++res.stats.heap_updates;
}

struct ThresholdOptions {
    bool partial = false;
    std::size_t max_depth = 0;  // 0: unlimited
};

class ThresholdRun {
public:
    ThresholdRun(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k,
                 ThresholdOptions opts)
        : u_(u), idx_(idx), t_(t), opts_(opts), heap_(k), cursor_(idx, u),
          attempted_(t.num_targets(), false) {
        for (std::size_t r = 0; r < u.dims(); ++r) {
            if (u[r] != 0.0) scoring_dims_.push_back(r);
        }
        suffix_.assign(scoring_dims_.size() + 1, 0.0);
    }

    TopKResult run() {
        const auto start = Clock::now();
        double upper = kInf;
        std::vector<TargetId> fresh;
        fresh.reserve(cursor_.active_lists().size());

        for (;;) {
            if (cursor_.all_exhausted()) {
                // Targets never popped have t_r = 0 on every traversed list, so their score is
                // at most 0. Score them unless the current top K already beats that.
                if (num_attempted_ < t_.num_targets() && !(heap_.full() && heap_.lower_bound() > 0.0)) {
                    score_remaining();
                    upper = heap_.full() ? heap_.lower_bound() : -kInf;
                }
                break;
            }
            if (bounds_close(upper)) break;
            if (opts_.max_depth != 0 && res_.stats.depth_reached == opts_.max_depth) {
                res_.exact = false;
                break;
            }

            ++res_.stats.depth_reached;
            fresh.clear();
            for (std::size_t r : cursor_.active_lists()) {
                const auto item = frontier(idx_, cursor_, u_, r);
                if (!item) continue;
                ++res_.stats.sorted_accesses;
                if (!attempted_[item->target]) {
                    attempted_[item->target] = true;
                    fresh.push_back(item->target);
                }
            }
            upper = 0.0;
            for (std::size_t r : cursor_.active_lists()) upper += cursor_.bound_term(r);
            if (opts_.partial) update_suffix();

            for (TargetId y : fresh) {
                ++num_attempted_;
                ++res_.stats.scores_attempted;
                res_.attempted.push_back(y);
                if (opts_.partial) {
                    score_partially(y);
                } else {
                    ++res_.stats.full_scores_computed;
                    offer(heap_, res_, y, detail::score_unchecked(u_.values(), y, t_));
                }
            }
            res_.bound_trace.push_back({res_.stats.depth_reached, heap_.lower_bound(), upper});
        }

        res_.upper_bound = upper;
        finish(res_, heap_, start);
        return std::move(res_);
    }

private:
    // Unseen targets score at most `upper`, and one that ties the K-th best still outranks it
    // when its id is lower. A tie needs an unseen target matching the frontier contribution in
    // every list still being walked. Walks emit equal contributions in ascending id order, so such
    // a target would sit after each frontier entry and have a larger id than all of them.
    bool bounds_close(double upper) {
        const double lower = heap_.lower_bound();
        if (lower != upper) return lower > upper;
        if (!heap_.full()) return false;
        TargetId max_frontier = 0;
        for (std::size_t r : cursor_.active_lists()) {
            if (cursor_.exhausted(r)) continue;
            const auto list = idx_.list(r);
            const auto& last = list[cursor_.last_position(r)];
            if (list[cursor_.next_position(r)].value != last.value) return true;
            max_frontier = std::max(max_frontier, last.target);
        }
        return max_frontier >= heap_.worst().target;
    }

    // suffix_[i] = sum of frontier terms over scoring_dims_[i..]; lists that are skipped or
    // not traversed contribute 0.
    void update_suffix() {
        double acc = 0.0;
        for (std::size_t i = scoring_dims_.size(); i-- > 0;) {
            acc += cursor_.bound_term(scoring_dims_[i]);
            suffix_[i] = acc;
        }
    }

    void score_partially(TargetId y) {
        double prefix = 0.0;
        const bool sparse = t_.is_sparse();
        const auto srow = sparse ? t_.sparse_row(y) : std::span<const SparseEntry>{};
        const auto drow = sparse ? std::span<const double>{} : t_.dense_row(y);
        std::size_t p = 0;
        for (std::size_t i = 0; i < scoring_dims_.size(); ++i) {
            const std::size_t r = scoring_dims_[i];
            double value;
            if (sparse) {
                while (p < srow.size() && srow[p].dim < r) ++p;
                value = (p < srow.size() && srow[p].dim == r) ? srow[p].value : 0.0;
            } else {
                value = drow[r];
            }
            prefix += u_[r] * value;
            ++res_.stats.partial_terms_computed;
            if (i + 1 < scoring_dims_.size() && !heap_.admits({y, prefix + suffix_[i + 1]})) return;
        }
        ++res_.stats.full_scores_computed;
        offer(heap_, res_, y, prefix);
    }

    void score_remaining() {
        for (TargetId y = 0; y < t_.num_targets(); ++y) {
            if (attempted_[y]) continue;
            attempted_[y] = true;
            ++num_attempted_;
            ++res_.stats.scores_attempted;
            ++res_.stats.full_scores_computed;
            res_.attempted.push_back(y);
            offer(heap_, res_, y, detail::score_unchecked(u_.values(), y, t_));
        }
    }

    const QueryVector& u_;
    const SortedIndex& idx_;
    const TargetFactors& t_;
    ThresholdOptions opts_;
    TopKHeap heap_;
    ListCursor cursor_;
    std::vector<bool> attempted_;
    std::size_t num_attempted_ = 0;
    std::vector<std::size_t> scoring_dims_;
    std::vector<double> suffix_;
    TopKResult res_;
};

TopKResult threshold_family(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k,
                            ThresholdOptions opts) {
    check_query(u, idx, t, k);
    return ThresholdRun(u, idx, t, k, opts).run();
}

}  // namespace

TopKHeap::TopKHeap(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractViolation("top-K heap with capacity 0");
    heap_.reserve(std::min<std::size_t>(capacity, 1024));
}

bool TopKHeap::offer(const ScoredTarget& c) {
    if (!admits(c)) return false;
    if (full()) {
        std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
        heap_.back() = c;
    } else {
        heap_.push_back(c);
    }
    std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    return true;
}

std::vector<ScoredTarget> TopKHeap::sorted() const {
    std::vector<ScoredTarget> out = heap_;
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::Naive: return "naive";
        case Algorithm::Fagin: return "fagin";
        case Algorithm::Threshold: return "threshold";
        case Algorithm::Partial: return "partial";
        case Algorithm::Halted: return "halted";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
    for (auto a : {Algorithm::Naive, Algorithm::Fagin, Algorithm::Threshold, Algorithm::Partial, Algorithm::Halted}) {
        if (name == to_string(a)) return a;
    }
    return std::nullopt;
}

TopKResult naive_topk(const QueryVector& u, const TargetFactors& t, std::size_t k) {
    check_query(u, t, k);
    const auto start = Clock::now();
    TopKResult res;
    TopKHeap heap(k);
    for (TargetId y = 0; y < t.num_targets(); ++y) {
        offer(heap, res, y, detail::score_unchecked(u.values(), y, t));
    }
    res.stats.full_scores_computed = t.num_targets();
    res.stats.scores_attempted = t.num_targets();
    certify_exhaustive(res, heap);
    finish(res, heap, start);
    return res;
}

TopKResult fagin_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k) {
    check_query(u, idx, t, k);
    if (idx.is_sparse()) throw UnsupportedError("Fagin's algorithm requires a dense index");
    const auto start = Clock::now();
    TopKResult res;
    TopKHeap heap(k);
    ListCursor cursor(idx, u);
    const auto lists = cursor.active_lists();

    std::vector<TargetId> to_score;
    if (lists.empty()) {
        // No list carries information: every target scores 0 and all are candidates.
        to_score.resize(t.num_targets());
        for (TargetId y = 0; y < t.num_targets(); ++y) to_score[y] = y;
    } else {
        std::vector<std::uint32_t> seen_in(t.num_targets(), 0);
        std::size_t in_all_lists = 0;
        while (in_all_lists < k && !cursor.all_exhausted()) {
            ++res.stats.depth_reached;
            for (std::size_t r : lists) {
                const auto item = frontier(idx, cursor, u, r);
                if (!item) continue;
                ++res.stats.sorted_accesses;
                if (seen_in[item->target]++ == 0) to_score.push_back(item->target);
                if (seen_in[item->target] == lists.size()) ++in_all_lists;
            }
        }
    }

    for (TargetId y : to_score) {
        res.attempted.push_back(y);
        offer(heap, res, y, detail::score_unchecked(u.values(), y, t));
    }
    res.stats.full_scores_computed = to_score.size();
    res.stats.scores_attempted = to_score.size();
    certify_exhaustive(res, heap);
    finish(res, heap, start);
    return res;
}

TopKResult threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t, std::size_t k) {
    return threshold_family(u, idx, t, k, {});
}

TopKResult partial_threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                                  std::size_t k) {
    return threshold_family(u, idx, t, k, {.partial = true});
}

TopKResult halted_threshold_topk(const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                                 std::size_t k, std::size_t max_depth) {
    if (max_depth == 0) throw ContractViolation("halted threshold needs a depth budget of at least 1");
    return threshold_family(u, idx, t, k, {.max_depth = max_depth});
}

TopKResult run_topk(Algorithm algo, const QueryVector& u, const SortedIndex& idx, const TargetFactors& t,
                    std::size_t k, std::size_t max_depth) {
    switch (algo) {
        case Algorithm::Naive: return naive_topk(u, t, k);
        case Algorithm::Fagin: return fagin_topk(u, idx, t, k);
        case Algorithm::Threshold: return threshold_topk(u, idx, t, k);
        case Algorithm::Partial: return partial_threshold_topk(u, idx, t, k);
        case Algorithm::Halted: return halted_threshold_topk(u, idx, t, k, max_depth);
    }
    throw ContractViolation("unknown algorithm");
}

}  // namespace slr
