// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/well_formed.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "peg/desugar.hpp"

namespace peg {

namespace {

class Checker {
public:
    explicit Checker(const Grammar& g) : g_(g), nrules_(g.rule_count()) {}

    WellFormednessReport run() {
        compute_nullability();
        build_edges();
        find_cycles();
        WellFormednessReport rep;
        rep.offending_cycles = std::move(cycles_);
        rep.well_formed = rep.offending_cycles.empty();
        for (std::size_t r = 0; r < nrules_; ++r) {
            if (nullable_[r]) rep.nullable_nonterminals.push_back(name(r));
        }
        return rep;
    }

private:
    const Grammar& g_;
    std::size_t nrules_;
    std::vector<char> nullable_;
    mutable std::unordered_map<ExprId, char> null_memo_;
    std::vector<std::set<std::size_t>> edges_;
    std::vector<std::vector<std::string>> cycles_;

    std::string name(std::size_t rule) const {
        return g_.name_of(g_.rule_syms[rule]);
    }

    bool expr_nullable(ExprId id) const {
        auto it = null_memo_.find(id);
        if (it != null_memo_.end()) return it->second;
        const Expr& e = g_.store[id];
        bool r = false;
        switch (e.kind) {
            case ExprKind::CharLit:
            case ExprKind::AnyChar:
                r = false;
                break;
            case ExprKind::Empty:
            case ExprKind::Not:
                r = true;
                break;
            case ExprKind::Nonterminal:
                r = nullable_[g_.rule_of_sym[e.name]];
                break;
            case ExprKind::Seq:
                r = expr_nullable(e.a) && expr_nullable(e.b);
                break;
            case ExprKind::Alt:
                r = expr_nullable(e.a) || expr_nullable(e.b);
                break;
            default:
                throw std::logic_error("check_well_formed requires a desugared grammar");
        }
        null_memo_.emplace(id, r);
        return r;
    }

    void compute_nullability() {
        nullable_.assign(nrules_, 0);
        bool changed = true;
        while (changed) {
            changed = false;
            null_memo_.clear();
            for (std::size_t r = 0; r < nrules_; ++r) {
                if (!nullable_[r] && expr_nullable(g_.rule_bodies[r])) {
                    nullable_[r] = 1;
                    changed = true;
                }
            }
        }
        null_memo_.clear();
    }

    // nonterminals invocable at the expression's own start position
    void collect_starts(ExprId id, std::set<ExprId>& seen,
                        std::set<std::size_t>& out) const {
        if (!seen.insert(id).second) return;
        const Expr& e = g_.store[id];
        switch (e.kind) {
            case ExprKind::CharLit:
            case ExprKind::Empty:
            case ExprKind::AnyChar:
                return;
            case ExprKind::Nonterminal:
                out.insert(g_.rule_of_sym[e.name]);
                return;
            case ExprKind::Not:
                collect_starts(e.a, seen, out);
                return;
            case ExprKind::Seq:
                collect_starts(e.a, seen, out);
                if (expr_nullable(e.a)) collect_starts(e.b, seen, out);
                return;
            case ExprKind::Alt:
                collect_starts(e.a, seen, out);
                collect_starts(e.b, seen, out);
                return;
            default:
                throw std::logic_error("check_well_formed requires a desugared grammar");
        }
    }

    void build_edges() {
        edges_.resize(nrules_);
        for (std::size_t r = 0; r < nrules_; ++r) {
            std::set<ExprId> seen;
            collect_starts(g_.rule_bodies[r], seen, edges_[r]);
        }
    }

    // Tarjan SCC; an SCC is offending when it has more than one member or a
    // self-loop.
    void find_cycles() {
        std::vector<int> index(nrules_, -1), low(nrules_, 0);
        std::vector<char> on_stack(nrules_, 0);
        std::vector<std::size_t> stack;
        int next = 0;

        std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
            index[v] = low[v] = next++;
            stack.push_back(v);
            on_stack[v] = 1;
            for (std::size_t w : edges_[v]) {
                if (index[w] < 0) {
                    strongconnect(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> scc;
                for (;;) {
                    std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    scc.push_back(w);
                    if (w == v) break;
                }
                bool offending = scc.size() > 1 ||
                                 edges_[scc[0]].count(scc[0]) > 0;
                if (offending) {
                    std::sort(scc.begin(), scc.end());
                    std::vector<std::string> names;
                    for (std::size_t r : scc) names.push_back(name(r));
                    cycles_.push_back(std::move(names));
                }
            }
        };

        for (std::size_t r = 0; r < nrules_; ++r) {
            if (index[r] < 0) strongconnect(r);
        }
        std::sort(cycles_.begin(), cycles_.end());
    }
};

}  // namespace

WellFormednessReport check_well_formed(const Grammar& g) {
    return Checker(g).run();
}

}  // namespace peg
