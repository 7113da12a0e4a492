// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/packrat.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace peg::packrat {

namespace {

constexpr std::size_t kDenseSlotLimit = 10'000'000;

// one entry per (rule, start index): verdict and end index
class MemoTable {
public:
    enum State : std::uint8_t { kEmpty = 0, kBusy, kMatch, kFail };

    struct Slot {
        State state = kEmpty;
        std::size_t end = 0;
    };

    MemoTable(std::size_t rules, std::size_t positions)
        : rules_(rules), positions_(positions) {
        dense_ = rules_ * positions_ <= kDenseSlotLimit;
        if (dense_) table_.resize(rules_ * positions_);
    }

    Slot* find(std::size_t rule, std::size_t pos) {
        if (dense_) return &table_[rule * positions_ + pos];
        return &sparse_[rule * positions_ + pos];
    }

private:
    std::size_t rules_, positions_;
    bool dense_;
    std::vector<Slot> table_;
    std::unordered_map<std::size_t, Slot> sparse_;
};

struct Evaluator {
    const Grammar& g;
    std::span<const Byte> input;
    MemoTable memo;
    Stats stats;
    const TraceFn& trace;

    Evaluator(const Grammar& gr, std::span<const Byte> in, const TraceFn& tr)
        : g(gr), input(in), memo(gr.rule_count(), in.size() + 1), trace(tr) {}

    // (matched, end position); on failure the position is unchanged
    std::pair<bool, std::size_t> eval(ExprId id, std::size_t pos) {
        const Expr& e = g.store[id];
        switch (e.kind) {
            case ExprKind::CharLit:
                return (pos < input.size() && input[pos] == e.sym)
                           ? std::pair{true, pos + 1}
                           : std::pair{false, pos};
            case ExprKind::AnyChar:
                return pos < input.size() ? std::pair{true, pos + 1}
                                          : std::pair{false, pos};
            case ExprKind::Empty:
                return {true, pos};
            case ExprKind::Nonterminal:
                return eval_rule(g.rule_of_sym[e.name], pos);
            case ExprKind::Not: {
                auto [m, _] = eval(e.a, pos);
                return {!m, pos};
            }
            case ExprKind::Seq: {
                auto [m1, p1] = eval(e.a, pos);
                if (!m1) return {false, pos};
                auto [m2, p2] = eval(e.b, p1);
                return m2 ? std::pair{true, p2} : std::pair{false, pos};
            }
            case ExprKind::Alt: {
                auto [m1, p1] = eval(e.a, pos);
                if (m1) return {true, p1};
                return eval(e.b, pos);
            }
            default:
                throw std::logic_error("recognize_packrat requires a desugared grammar");
        }
    }

    std::pair<bool, std::size_t> eval_rule(std::size_t rule, std::size_t pos) {
        MemoTable::Slot* slot = memo.find(rule, pos);
        if (slot->state == MemoTable::kMatch || slot->state == MemoTable::kFail) {
            ++stats.hits;
            bool m = slot->state == MemoTable::kMatch;
            if (trace) trace(true, g.name_of(g.rule_syms[rule]), pos, m, slot->end);
            return {m, slot->end};
        }
        if (slot->state == MemoTable::kBusy) {
            throw std::logic_error(
                "rule '" + g.name_of(g.rule_syms[rule]) +
                "' re-entered at the same position; grammar is not well-formed");
        }
        ++stats.misses;
        slot->state = MemoTable::kBusy;
        auto [m, end] = eval(g.rule_bodies[rule], pos);
        // re-find: the sparse map may have rehashed during evaluation
        slot = memo.find(rule, pos);
        slot->state = m ? MemoTable::kMatch : MemoTable::kFail;
        slot->end = m ? end : pos;
        ++stats.memo_entries;
        if (trace) trace(false, g.name_of(g.rule_syms[rule]), pos, m, slot->end);
        return {m, slot->end};
    }
};

}  // namespace

Result recognize_packrat(const Grammar& g, std::span<const Byte> input,
                         const TraceFn& trace) {
    Evaluator ev(g, input, trace);
    auto [m, end] = ev.eval(g.start, 0);
    Result r;
    r.matched = m;
    r.consumed = m ? end : 0;
    r.stats = ev.stats;
    return r;
}

}  // namespace peg::packrat
