#pragma once

#include <compare>
#include <utility>
#include <vector>

namespace conslaw {

/// Unordered derivative multi-index: how many times each variable index
/// appears. Mixed partials are identified, so {x,t} and {t,x} are the same
/// index. Stored sparse as (variable, count) pairs sorted by variable.
class MultiIndex {
public:
    MultiIndex() = default;

    static MultiIndex unit(int var) {
        MultiIndex m;
        m.counts_.emplace_back(var, 1);
        return m;
    }

    int order() const {
        int s = 0;
        for (auto& [v, c] : counts_) s += c;
        return s;
    }

    int count(int var) const {
        for (auto& [v, c] : counts_)
            if (v == var) return c;
        return 0;
    }

    bool empty() const { return counts_.empty(); }

    MultiIndex plus(int var, int times = 1) const;

    /// Componentwise subtraction; caller must ensure *this >= other.
    MultiIndex minus(const MultiIndex& other) const;

    /// Componentwise comparison: true iff other <= *this everywhere.
    bool contains(const MultiIndex& other) const;

    const std::vector<std::pair<int, int>>& counts() const { return counts_; }

    /// Total order: by |J|, then by the sparse count vector.
    std::strong_ordering operator<=>(const MultiIndex& other) const;
    bool operator==(const MultiIndex& other) const { return counts_ == other.counts_; }

private:
    std::vector<std::pair<int, int>> counts_;
};

/// All multi-indices K with K <= bound componentwise (the full box, including
/// the empty index), in a deterministic order.
std::vector<MultiIndex> multi_index_box(const MultiIndex& bound);

}  // namespace conslaw
