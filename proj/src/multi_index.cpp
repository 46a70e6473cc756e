#include "conslaw/multi_index.hpp"

#include "conslaw/errors.hpp"

namespace conslaw {

MultiIndex MultiIndex::plus(int var, int times) const {
    MultiIndex out;
    bool placed = false;
    for (auto& [v, c] : counts_) {
        if (v == var) {
            out.counts_.emplace_back(v, c + times);
            placed = true;
        } else {
            if (!placed && v > var) {
                out.counts_.emplace_back(var, times);
                placed = true;
            }
            out.counts_.emplace_back(v, c);
        }
    }
    if (!placed) out.counts_.emplace_back(var, times);
    return out;
}

MultiIndex MultiIndex::minus(const MultiIndex& other) const {
    MultiIndex out;
    for (auto& [v, c] : counts_) {
        int r = c - other.count(v);
        if (r < 0) throw InternalError("multi-index subtraction went negative");
        if (r > 0) out.counts_.emplace_back(v, r);
    }
    for (auto& [v, c] : other.counts_)
        if (count(v) == 0 && c > 0) throw InternalError("multi-index subtraction went negative");
    return out;
}

bool MultiIndex::contains(const MultiIndex& other) const {
    for (auto& [v, c] : other.counts_)
        if (count(v) < c) return false;
    return true;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
    if (auto c = order() <=> other.order(); c != 0) return c;
    return counts_ <=> other.counts_;
}

std::vector<MultiIndex> multi_index_box(const MultiIndex& bound) {
    std::vector<MultiIndex> out{MultiIndex{}};
    for (auto& [v, c] : bound.counts()) {
        std::vector<MultiIndex> next;
        for (auto& base : out)
            for (int k = 0; k <= c; ++k) next.push_back(k == 0 ? base : base.plus(v, k));
        out = std::move(next);
    }
    return out;
}

}  // namespace conslaw
