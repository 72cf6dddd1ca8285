#ifndef ALGLOC_MULTIINDEX_HPP
#define ALGLOC_MULTIINDEX_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

#include "algloc/common.hpp"

namespace algloc {

// A strictly increasing tuple of basis indices in [0, n).
using IdxTuple = std::vector<int>;

// All strictly increasing k-tuples out of n indices, in lexicographic order,
// with O(log) position lookup. Tables are cached process-wide.
class IndexTable {
public:
    static const IndexTable& get(int n, int k);

    int n() const { return n_; }
    int k() const { return k_; }
    int size() const { return static_cast<int>(tuples_.size()); }
    const std::vector<IdxTuple>& tuples() const { return tuples_; }
    const IdxTuple& tuple(int pos) const { return tuples_[pos]; }

    int position(const IdxTuple& t) const {
        auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
        if (it == tuples_.end() || *it != t) throw Error("index tuple not in table");
        return static_cast<int>(it - tuples_.begin());
    }

private:
    IndexTable(int n, int k);
    int n_, k_;
    std::vector<IdxTuple> tuples_;
};

// Sorts the tuple in place; returns the permutation sign, or 0 on repeats.
inline int sort_with_sign(IdxTuple& t) {
    int sign = 1;
    for (std::size_t i = 1; i < t.size(); ++i) {
        for (std::size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
            if (t[j - 1] == t[j]) return 0;
            std::swap(t[j - 1], t[j]);
            sign = -sign;
        }
    }
    return sign;
}

// Sign of the permutation taking the concatenation (a, b) to sorted order.
// Both inputs must be strictly increasing and disjoint.
inline int merge_sign(const IdxTuple& a, const IdxTuple& b) {
    int sign = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        // Count elements of b smaller than a[i]: each costs one transposition
        // past the whole of a's tail... equivalently count inversions directly.
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] < a[i]) sign = -sign;
    }
    return sign;
}

// Merge two disjoint increasing tuples into one increasing tuple.
inline IdxTuple merge_tuples(const IdxTuple& a, const IdxTuple& b) {
    IdxTuple out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool tuples_disjoint(const IdxTuple& a, const IdxTuple& b) {
    for (int x : a)
        if (std::binary_search(b.begin(), b.end(), x)) return false;
    return true;
}

// Complement of an increasing tuple inside {0, ..., n-1}.
inline IdxTuple complement_tuple(const IdxTuple& t, int n) {
    IdxTuple out;
    out.reserve(n - t.size());
    std::size_t p = 0;
    for (int i = 0; i < n; ++i) {
        if (p < t.size() && t[p] == i) {
            ++p;
        } else {
            out.push_back(i);
        }
    }
    return out;
}

// Sign of the permutation (t, complement(t)) of (0, ..., n-1).
inline int split_sign(const IdxTuple& t, int n) {
    return merge_sign(t, complement_tuple(t, n));
}

inline IndexTable::IndexTable(int n, int k) : n_(n), k_(k) {
    if (k < 0 || k > n) return;  // empty table
    IdxTuple t(k);
    for (int i = 0; i < k; ++i) t[i] = i;
    while (true) {
        tuples_.push_back(t);
        int i = k - 1;
        while (i >= 0 && t[i] == n - k + i) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
    }
    if (k == 0) tuples_ = {IdxTuple{}};
}

inline const IndexTable& IndexTable::get(int n, int k) {
    static std::map<std::pair<int, int>, IndexTable> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({n, k});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(n, k), IndexTable(n, k)).first;
    return it->second;
}

}  // namespace algloc

#endif
