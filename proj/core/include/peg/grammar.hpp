// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peg {

using Byte = std::uint8_t;
using ExprId = std::uint32_t;
using Symbol = std::uint32_t;  // index into Grammar::names

enum class ExprKind : std::uint8_t {
    // core forms
    CharLit,
    Empty,
    AnyChar,
    Nonterminal,
    Not,
    Seq,
    Alt,
    // sugar, removed by desugar()
    Star,
    Plus,
    Opt,
    And,
    CharClass,
};

struct Expr {
    ExprKind kind = ExprKind::Empty;
    Byte sym = 0;            // CharLit
    Symbol name = 0;         // Nonterminal
    ExprId a = 0, b = 0;     // children
    std::vector<Byte> set;   // CharClass members, sorted unique

    bool operator==(const Expr& o) const {
        return kind == o.kind && sym == o.sym && name == o.name && a == o.a &&
               b == o.b && set == o.set;
    }
};

/// Append-only store of structurally interned expression nodes: no two
/// stored nodes are structurally identical.
class ExprStore {
public:
    ExprId intern(const Expr& e);
    const Expr& operator[](ExprId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

private:
    struct Hash {
        std::size_t operator()(const Expr& e) const;
    };
    std::vector<Expr> nodes_;
    std::unordered_map<Expr, ExprId, Hash> index_;
};

/// A parsing expression grammar: named rules plus a start expression, which
/// is the right-hand side of the first rule.
struct Grammar {
    ExprStore store;
    std::vector<std::string> names;                       // symbol table
    std::unordered_map<std::string, Symbol> name_index;   // name -> symbol
    std::vector<Symbol> rule_syms;                        // declaration order
    std::vector<ExprId> rule_bodies;                      // parallel to rule_syms
    std::vector<std::int32_t> rule_of_sym;                // symbol -> rule or -1
    ExprId start = 0;

    Symbol intern_name(std::string_view name);
    bool has_rule(Symbol s) const {
        return s < rule_of_sym.size() && rule_of_sym[s] >= 0;
    }
    ExprId body_of(Symbol s) const { return rule_bodies[rule_of_sym[s]]; }
    const std::string& name_of(Symbol s) const { return names[s]; }
    std::size_t rule_count() const { return rule_syms.size(); }
};

/// Renders a grammar back to source form, one rule per line. Output of a
/// sugar-level grammar reparses to a structurally identical grammar.
std::string write_grammar(const Grammar& g);

/// Renders one expression in source form.
std::string write_expr(const Grammar& g, ExprId e);

bool is_sugar(ExprKind k);

}  // namespace peg
