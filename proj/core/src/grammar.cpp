// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/grammar.hpp"

#include <cstdio>

namespace peg {

namespace {

inline void hash_mix(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

}  // namespace

std::size_t ExprStore::Hash::operator()(const Expr& e) const {
    std::size_t h = static_cast<std::size_t>(e.kind);
    hash_mix(h, e.sym);
    hash_mix(h, e.name);
    hash_mix(h, e.a);
    hash_mix(h, e.b);
    for (Byte b : e.set) hash_mix(h, b);
    return h;
}

ExprId ExprStore::intern(const Expr& e) {
    auto it = index_.find(e);
    if (it != index_.end()) return it->second;
    ExprId id = static_cast<ExprId>(nodes_.size());
    nodes_.push_back(e);
    index_.emplace(e, id);
    return id;
}

Symbol Grammar::intern_name(std::string_view name) {
    auto it = name_index.find(std::string(name));
    if (it != name_index.end()) return it->second;
    Symbol s = static_cast<Symbol>(names.size());
    names.emplace_back(name);
    name_index.emplace(names.back(), s);
    rule_of_sym.push_back(-1);
    return s;
}

bool is_sugar(ExprKind k) {
    switch (k) {
        case ExprKind::Star:
        case ExprKind::Plus:
        case ExprKind::Opt:
        case ExprKind::And:
        case ExprKind::CharClass:
            return true;
        default:
            return false;
    }
}

namespace {

// precedence levels for printing: alt < seq < prefix < suffix < primary
enum Level { kAlt = 0, kSeq, kPrefix, kSuffix, kPrimary };

std::string escape_byte(Byte b, char quote) {
    switch (b) {
        case '\n': return "\\n";
        case '\r': return "\\r";
        case '\t': return "\\t";
        case '\\': return "\\\\";
        default: break;
    }
    if (b == static_cast<Byte>(quote)) return std::string("\\") + quote;
    if (b >= 0x20 && b < 0x7f) return std::string(1, static_cast<char>(b));
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02x", b);
    return buf;
}

std::string escape_class_byte(Byte b) {
    if (b == ']' || b == '-' || b == '^') return std::string("\\") + static_cast<char>(b);
    return escape_byte(b, '\'');
}

int level_of(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Alt: return kAlt;
        case ExprKind::Seq: return kSeq;
        case ExprKind::Not:
        case ExprKind::And: return kPrefix;
        case ExprKind::Star:
        case ExprKind::Plus:
        case ExprKind::Opt: return kSuffix;
        default: return kPrimary;
    }
}

std::string render(const Grammar& g, ExprId id, int min_level) {
    const Expr& e = g.store[id];
    std::string out;
    switch (e.kind) {
        case ExprKind::CharLit:
            out = "'" + escape_byte(e.sym, '\'') + "'";
            break;
        case ExprKind::Empty:
            out = "''";
            break;
        case ExprKind::AnyChar:
            out = ".";
            break;
        case ExprKind::Nonterminal:
            out = g.name_of(e.name);
            break;
        case ExprKind::Not:
            out = "!" + render(g, e.a, kSuffix);
            break;
        case ExprKind::And:
            out = "&" + render(g, e.a, kSuffix);
            break;
        case ExprKind::Seq:
            out = render(g, e.a, kPrefix) + " " + render(g, e.b, kSeq);
            break;
        case ExprKind::Alt:
            out = render(g, e.a, kSeq) + " / " + render(g, e.b, kAlt);
            break;
        case ExprKind::Star:
            out = render(g, e.a, kPrimary) + "*";
            break;
        case ExprKind::Plus:
            out = render(g, e.a, kPrimary) + "+";
            break;
        case ExprKind::Opt:
            out = render(g, e.a, kPrimary) + "?";
            break;
        case ExprKind::CharClass: {
            out = "[";
            for (Byte b : e.set) out += escape_class_byte(b);
            out += "]";
            break;
        }
    }
    if (level_of(e) < min_level) out = "(" + out + ")";
    return out;
}

}  // namespace

std::string write_expr(const Grammar& g, ExprId e) { return render(g, e, kAlt); }

std::string write_grammar(const Grammar& g) {
    std::string out;
    for (std::size_t i = 0; i < g.rule_count(); ++i) {
        out += g.name_of(g.rule_syms[i]);
        out += " <- ";
        out += render(g, g.rule_bodies[i], kAlt);
        out += "\n";
    }
    return out;
}

}  // namespace peg
