// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace peg::derivs {

/// A backtracking generation. Generation 0 is the straightforward parse;
/// higher generations label backtracking decisions that were deferred at
/// some earlier point of the parse and are not yet resolved.
using Gen = std::uint32_t;

/// Ordered set of backtracking generations.
class GenSet {
public:
    GenSet() = default;
    GenSet(std::initializer_list<Gen> gens) : v_(gens) {
        std::sort(v_.begin(), v_.end());
        v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
    }

    bool empty() const { return v_.empty(); }
    std::size_t size() const { return v_.size(); }

    bool contains(Gen g) const {
        return std::binary_search(v_.begin(), v_.end(), g);
    }

    /// Largest generation in the set. The set must be non-empty.
    Gen max() const {
        if (v_.empty()) throw std::logic_error("GenSet::max on empty set");
        return v_.back();
    }

    Gen min() const {
        if (v_.empty()) throw std::logic_error("GenSet::min on empty set");
        return v_.front();
    }

    void insert(Gen g) {
        auto it = std::lower_bound(v_.begin(), v_.end(), g);
        if (it == v_.end() || *it != g) v_.insert(it, g);
    }

    GenSet& operator|=(const GenSet& o) {
        if (o.v_.empty()) return *this;
        std::vector<Gen> merged;
        merged.reserve(v_.size() + o.v_.size());
        std::set_union(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(),
                       std::back_inserter(merged));
        v_ = std::move(merged);
        return *this;
    }

    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    bool operator==(const GenSet& o) const { return v_ == o.v_; }

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        for (Gen g : v_) h = (h ^ g) * 0x100000001b3ull;
        return h;
    }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < v_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(v_[i]);
        }
        return s + "}";
    }

private:
    std::vector<Gen> v_;  // sorted, unique
};

/// Partial injective map from child generation indices to parent generation
/// values, stored sparsified: only indices that can still be composed with
/// are kept.
class GenMap {
public:
    GenMap() = default;
    GenMap(std::initializer_list<std::pair<Gen, Gen>> entries)
        : e_(entries.begin(), entries.end()) {
        std::sort(e_.begin(), e_.end());
    }

    /// Identity map over the given index set.
    static GenMap identity_over(const GenSet& indices) {
        GenMap m;
        for (Gen g : indices) m.e_.emplace_back(g, g);
        return m;
    }

    bool empty() const { return e_.empty(); }
    std::size_t size() const { return e_.size(); }

    bool has(Gen index) const { return find(index) != nullptr; }

    /// Value at an index. A missing index is an internal invariant
    /// violation, not a recoverable condition.
    Gen at(Gen index) const {
        const Gen* v = find(index);
        if (!v) {
            throw std::logic_error("GenMap: no entry for generation index " +
                                   std::to_string(index));
        }
        return *v;
    }

    void set(Gen index, Gen value) {
        auto it = std::lower_bound(e_.begin(), e_.end(),
                                   std::make_pair(index, Gen{0}),
                                   [](const auto& a, const auto& b) {
                                       return a.first < b.first;
                                   });
        if (it != e_.end() && it->first == index) {
            it->second = value;
        } else {
            e_.insert(it, {index, value});
        }
    }

    /// Drops entries whose index is not in `keep`.
    void prune(const GenSet& keep) {
        e_.erase(std::remove_if(e_.begin(), e_.end(),
                                [&](const auto& p) {
                                    return !keep.contains(p.first);
                                }),
                 e_.end());
    }

    Gen max_value() const {
        Gen m = 0;
        for (const auto& [i, v] : e_) m = std::max(m, v);
        return m;
    }

    /// True when the stored map is exactly {(i,i) : i = 0..m}.
    bool is_dense_identity(Gen m) const {
        if (e_.size() != static_cast<std::size_t>(m) + 1) return false;
        for (std::size_t i = 0; i < e_.size(); ++i) {
            if (e_[i].first != i || e_[i].second != i) return false;
        }
        return true;
    }

    auto begin() const { return e_.begin(); }
    auto end() const { return e_.end(); }

    bool operator==(const GenMap& o) const { return e_ == o.e_; }

    std::size_t hash() const {
        std::size_t h = 0x2545f4914f6cdd1dull;
        for (const auto& [i, v] : e_) {
            h = (h ^ i) * 0x100000001b3ull;
            h = (h ^ v) * 0x100000001b3ull;
        }
        return h;
    }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < e_.size(); ++i) {
            if (i) s += ",";
            s += "(" + std::to_string(e_[i].first) + "," +
                 std::to_string(e_[i].second) + ")";
        }
        return s + "}";
    }

private:
    const Gen* find(Gen index) const {
        auto it = std::lower_bound(e_.begin(), e_.end(),
                                   std::make_pair(index, Gen{0}),
                                   [](const auto& a, const auto& b) {
                                       return a.first < b.first;
                                   });
        if (it != e_.end() && it->first == index) return &it->second;
        return nullptr;
    }

    std::vector<std::pair<Gen, Gen>> e_;  // sorted by index
};

/// Composition of a map with a set: the image of every generation in `gens`
/// used as an index into `map`.
inline GenSet compose(const GenMap& map, const GenSet& gens) {
    GenSet out;
    for (Gen g : gens) out.insert(map.at(g));
    return out;
}

/// Extends `p` with a mapping for a newly appeared backtracking generation.
/// The new entry maps the child's new maximum generation to m+1; when the
/// child's maximum did not grow, `p` is returned unchanged.
inline GenMap up(const GenMap& p, Gen back_old_max, Gen back_new_max, Gen m) {
    if (back_new_max <= back_old_max) return p;
    GenMap r = p;
    r.set(back_new_max, m + 1);
    return r;
}

/// Map placing a fresh expression into a parent generation space: generation
/// 0 maps to itself, and any pending lookahead generation maps to the fresh
/// generation basis+1.
inline GenMap ngs_map(const GenSet& back, std::int64_t basis,
                      bool* added = nullptr) {
    GenMap r;
    r.set(0, 0);
    bool did = false;
    for (Gen g : back) {
        if (g >= 1) {
            if (basis < 0) {
                throw std::logic_error(
                    "ngs_map: fresh generation needed below generation 0");
            }
            r.set(g, static_cast<Gen>(basis + 1));
            did = true;
        }
    }
    if (added && did) *added = true;
    return r;
}

}  // namespace peg::derivs
