// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/desugar.hpp"

#include <unordered_map>

namespace peg {

namespace {

class Desugarer {
public:
    explicit Desugarer(const Grammar& in) : in_(in) {}

    Grammar run() {
        for (const std::string& n : in_.names) out_.intern_name(n);
        // reserve rule slots for the original rules so %rep rules land after
        for (std::size_t i = 0; i < in_.rule_count(); ++i) {
            Symbol s = out_.intern_name(in_.name_of(in_.rule_syms[i]));
            out_.rule_of_sym[s] = static_cast<std::int32_t>(out_.rule_syms.size());
            out_.rule_syms.push_back(s);
            out_.rule_bodies.push_back(0);
        }
        for (std::size_t i = 0; i < in_.rule_count(); ++i) {
            out_.rule_bodies[i] = rewrite(in_.rule_bodies[i]);
        }
        out_.start = out_.rule_bodies[0];
        return std::move(out_);
    }

private:
    const Grammar& in_;
    Grammar out_;
    std::unordered_map<ExprId, ExprId> memo_;      // old id -> new id
    std::unordered_map<ExprId, Symbol> rep_rules_; // repetition body -> %rep sym
    std::size_t rep_counter_ = 0;

    ExprId intern(Expr e) { return out_.store.intern(e); }

    ExprId empty() {
        Expr e;
        e.kind = ExprKind::Empty;
        return intern(e);
    }

    ExprId nonterm(Symbol s) {
        Expr e;
        e.kind = ExprKind::Nonterminal;
        e.name = s;
        return intern(e);
    }

    ExprId binary(ExprKind k, ExprId a, ExprId b) {
        Expr e;
        e.kind = k;
        e.a = a;
        e.b = b;
        return intern(e);
    }

    ExprId unary(ExprKind k, ExprId a) {
        Expr e;
        e.kind = k;
        e.a = a;
        return intern(e);
    }

    /// One fresh nonterminal per structurally distinct repetition body.
    Symbol rep_rule_for(ExprId body) {
        auto it = rep_rules_.find(body);
        if (it != rep_rules_.end()) return it->second;
        Symbol s = out_.intern_name("%rep" + std::to_string(rep_counter_++));
        rep_rules_.emplace(body, s);
        out_.rule_of_sym[s] = static_cast<std::int32_t>(out_.rule_syms.size());
        out_.rule_syms.push_back(s);
        // %repN <- body %repN / ''
        out_.rule_bodies.push_back(
            binary(ExprKind::Alt, binary(ExprKind::Seq, body, nonterm(s)), empty()));
        return s;
    }

    ExprId rewrite(ExprId id) {
        auto it = memo_.find(id);
        if (it != memo_.end()) return it->second;
        const Expr& e = in_.store[id];
        ExprId r = 0;
        switch (e.kind) {
            case ExprKind::CharLit: {
                Expr n;
                n.kind = ExprKind::CharLit;
                n.sym = e.sym;
                r = intern(n);
                break;
            }
            case ExprKind::Empty:
                r = empty();
                break;
            case ExprKind::AnyChar: {
                Expr n;
                n.kind = ExprKind::AnyChar;
                r = intern(n);
                break;
            }
            case ExprKind::Nonterminal:
                r = nonterm(out_.intern_name(in_.name_of(e.name)));
                break;
            case ExprKind::Not:
                r = unary(ExprKind::Not, rewrite(e.a));
                break;
            case ExprKind::Seq:
                r = binary(ExprKind::Seq, rewrite(e.a), rewrite(e.b));
                break;
            case ExprKind::Alt:
                r = binary(ExprKind::Alt, rewrite(e.a), rewrite(e.b));
                break;
            case ExprKind::Star:
                r = nonterm(rep_rule_for(rewrite(e.a)));
                break;
            case ExprKind::Plus: {
                ExprId body = rewrite(e.a);
                r = binary(ExprKind::Seq, body, nonterm(rep_rule_for(body)));
                break;
            }
            case ExprKind::Opt:
                r = binary(ExprKind::Alt, rewrite(e.a), empty());
                break;
            case ExprKind::And:
                r = unary(ExprKind::Not, unary(ExprKind::Not, rewrite(e.a)));
                break;
            case ExprKind::CharClass: {
                // ordered alternation of the members, ascending
                const auto& set = e.set;
                Expr lit;
                lit.kind = ExprKind::CharLit;
                lit.sym = set.back();
                r = intern(lit);
                for (std::size_t i = set.size() - 1; i-- > 0;) {
                    lit.sym = set[i];
                    r = binary(ExprKind::Alt, intern(lit), r);
                }
                break;
            }
        }
        memo_.emplace(id, r);
        return r;
    }
};

}  // namespace

Grammar desugar(const Grammar& g) { return Desugarer(g).run(); }

bool is_desugared(const Grammar& g) {
    for (std::size_t i = 0; i < g.store.size(); ++i) {
        if (is_sugar(g.store[static_cast<ExprId>(i)].kind)) return false;
    }
    return true;
}

}  // namespace peg
