// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/grammar_parser.hpp"

#include <cctype>
#include <vector>

namespace peg {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1, col = 1;

    bool eof() const { return pos >= text.size(); }
    char peek(std::size_t k = 0) const {
        return pos + k < text.size() ? text[pos + k] : '\0';
    }
    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw GrammarError(msg, line, col);
    }
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
    explicit Parser(std::string_view text) { cur_.text = text; }

    Grammar run() {
        skip_space();
        if (cur_.eof()) cur_.fail("empty grammar");
        while (!cur_.eof()) {
            parse_rule();
            skip_space();
        }
        check_references();
        g_.start = g_.rule_bodies[0];
        return std::move(g_);
    }

private:
    Cursor cur_;
    Grammar g_;
    // first-reference location per symbol, for undefined-nonterminal errors
    std::vector<std::pair<std::size_t, std::size_t>> first_ref_;

    void skip_space() {
        for (;;) {
            char c = cur_.peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                cur_.advance();
            } else if (c == '#') {
                while (!cur_.eof() && cur_.peek() != '\n') cur_.advance();
            } else {
                return;
            }
        }
    }

    std::string parse_name() {
        if (cur_.peek() == '%') cur_.fail("'%' is reserved for generated rule names");
        if (!is_name_start(cur_.peek())) cur_.fail("expected rule name");
        std::string n;
        while (is_name_char(cur_.peek())) n += cur_.advance();
        return n;
    }

    bool at_left_arrow() const {
        return cur_.peek() == '<' && cur_.peek(1) == '-';
    }

    // true when the cursor sits at `name <-`, i.e. the next rule definition
    bool at_rule_start() {
        if (!is_name_start(cur_.peek())) return false;
        std::size_t k = 0;
        while (is_name_char(cur_.peek(k))) ++k;
        while (cur_.peek(k) == ' ' || cur_.peek(k) == '\t' ||
               cur_.peek(k) == '\r' || cur_.peek(k) == '\n')
            ++k;
        return cur_.peek(k) == '<' && cur_.peek(k + 1) == '-';
    }

    void parse_rule() {
        std::size_t line = cur_.line, col = cur_.col;
        std::string name = parse_name();
        skip_space();
        if (!at_left_arrow()) cur_.fail("expected '<-' after rule name");
        cur_.advance();
        cur_.advance();
        skip_space();
        ExprId body = parse_alt();

        Symbol s = g_.intern_name(name);
        if (g_.has_rule(s)) {
            throw GrammarError("duplicate rule name '" + name + "'", line, col);
        }
        g_.rule_of_sym[s] = static_cast<std::int32_t>(g_.rule_syms.size());
        g_.rule_syms.push_back(s);
        g_.rule_bodies.push_back(body);
    }

    ExprId parse_alt() {
        std::vector<ExprId> parts{parse_seq()};
        skip_space();
        while (cur_.peek() == '/') {
            cur_.advance();
            skip_space();
            parts.push_back(parse_seq());
            skip_space();
        }
        ExprId r = parts.back();
        for (std::size_t i = parts.size() - 1; i-- > 0;) {
            Expr e;
            e.kind = ExprKind::Alt;
            e.a = parts[i];
            e.b = r;
            r = g_.store.intern(e);
        }
        return r;
    }

    bool at_primary_start() {
        char c = cur_.peek();
        if (c == '(' || c == '\'' || c == '[' || c == '.' || c == '!' || c == '&')
            return true;
        if (is_name_start(c)) return !at_rule_start();
        return false;
    }

    ExprId parse_seq() {
        std::vector<ExprId> parts;
        skip_space();
        while (at_primary_start()) {
            parts.push_back(parse_prefix());
            skip_space();
        }
        if (parts.empty()) {
            Expr e;
            e.kind = ExprKind::Empty;
            return g_.store.intern(e);
        }
        ExprId r = parts.back();
        for (std::size_t i = parts.size() - 1; i-- > 0;) {
            Expr e;
            e.kind = ExprKind::Seq;
            e.a = parts[i];
            e.b = r;
            r = g_.store.intern(e);
        }
        return r;
    }

    ExprId parse_prefix() {
        char c = cur_.peek();
        if (c == '!' || c == '&') {
            cur_.advance();
            skip_space();
            ExprId child = parse_prefix();
            Expr e;
            e.kind = c == '!' ? ExprKind::Not : ExprKind::And;
            e.a = child;
            return g_.store.intern(e);
        }
        return parse_suffix();
    }

    ExprId parse_suffix() {
        ExprId r = parse_primary();
        for (;;) {
            char c = cur_.peek();
            if (c != '*' && c != '+' && c != '?') return r;
            cur_.advance();
            Expr e;
            e.kind = c == '*'   ? ExprKind::Star
                     : c == '+' ? ExprKind::Plus
                                : ExprKind::Opt;
            e.a = r;
            r = g_.store.intern(e);
        }
    }

    ExprId parse_primary() {
        char c = cur_.peek();
        if (c == '(') {
            cur_.advance();
            skip_space();
            ExprId r = parse_alt();
            skip_space();
            if (cur_.peek() != ')') cur_.fail("expected ')'");
            cur_.advance();
            return r;
        }
        if (c == '\'') return parse_literal();
        if (c == '[') return parse_class();
        if (c == '.') {
            cur_.advance();
            Expr e;
            e.kind = ExprKind::AnyChar;
            return g_.store.intern(e);
        }
        if (is_name_start(c)) {
            std::size_t line = cur_.line, col = cur_.col;
            std::string name = parse_name();
            Symbol s = g_.intern_name(name);
            if (first_ref_.size() <= s) first_ref_.resize(s + 1, {0, 0});
            if (first_ref_[s].first == 0) first_ref_[s] = {line, col};
            Expr e;
            e.kind = ExprKind::Nonterminal;
            e.name = s;
            return g_.store.intern(e);
        }
        cur_.fail("expected expression");
    }

    Byte parse_escape() {
        cur_.advance();  // backslash
        if (cur_.eof()) cur_.fail("unterminated escape");
        char c = cur_.advance();
        switch (c) {
            case 'n': return '\n';
            case 'r': return '\r';
            case 't': return '\t';
            case '\\': return '\\';
            case '\'': return '\'';
            case '"': return '"';
            case '[': return '[';
            case ']': return ']';
            case '-': return '-';
            case '^': return '^';
            case 'x': {
                int hi = hex_digit();
                int lo = hex_digit();
                return static_cast<Byte>(hi * 16 + lo);
            }
            default:
                cur_.fail(std::string("unknown escape '\\") + c + "'");
        }
    }

    int hex_digit() {
        if (cur_.eof()) cur_.fail("unterminated hex escape");
        char c = cur_.advance();
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        cur_.fail("bad hex digit in escape");
    }

    ExprId parse_literal() {
        cur_.advance();  // opening quote
        std::vector<Byte> bytes;
        for (;;) {
            if (cur_.eof()) cur_.fail("unterminated literal");
            char c = cur_.peek();
            if (c == '\'') {
                cur_.advance();
                break;
            }
            if (c == '\n') cur_.fail("newline in literal");
            bytes.push_back(c == '\\' ? parse_escape()
                                      : static_cast<Byte>(cur_.advance()));
        }
        if (bytes.empty()) {
            Expr e;
            e.kind = ExprKind::Empty;
            return g_.store.intern(e);
        }
        // multi-byte literals are a sequence of single-byte literals
        ExprId r = char_lit(bytes.back());
        for (std::size_t i = bytes.size() - 1; i-- > 0;) {
            Expr e;
            e.kind = ExprKind::Seq;
            e.a = char_lit(bytes[i]);
            e.b = r;
            r = g_.store.intern(e);
        }
        return r;
    }

    ExprId char_lit(Byte b) {
        Expr e;
        e.kind = ExprKind::CharLit;
        e.sym = b;
        return g_.store.intern(e);
    }

    ExprId parse_class() {
        cur_.advance();  // '['
        std::vector<bool> members(256, false);
        bool any = false;
        for (;;) {
            if (cur_.eof()) cur_.fail("unterminated character class");
            if (cur_.peek() == ']') {
                cur_.advance();
                break;
            }
            Byte lo = cur_.peek() == '\\' ? parse_escape()
                                          : static_cast<Byte>(cur_.advance());
            Byte hi = lo;
            if (cur_.peek() == '-' && cur_.peek(1) != ']') {
                cur_.advance();
                if (cur_.eof()) cur_.fail("unterminated character class");
                hi = cur_.peek() == '\\' ? parse_escape()
                                         : static_cast<Byte>(cur_.advance());
                if (hi < lo) cur_.fail("reversed range in character class");
            }
            for (int b = lo; b <= hi; ++b) members[b] = true;
            any = true;
        }
        if (!any) cur_.fail("empty character class");
        Expr e;
        e.kind = ExprKind::CharClass;
        for (int b = 0; b < 256; ++b) {
            if (members[b]) e.set.push_back(static_cast<Byte>(b));
        }
        return g_.store.intern(e);
    }

    void check_references() {
        for (Symbol s = 0; s < g_.names.size(); ++s) {
            if (!g_.has_rule(s)) {
                auto [line, col] =
                    s < first_ref_.size() ? first_ref_[s] : std::pair<std::size_t, std::size_t>{1, 1};
                throw GrammarError("undefined nonterminal '" + g_.name_of(s) + "'",
                                   line, col);
            }
        }
    }
};

}  // namespace

Grammar parse_grammar(std::string_view text) { return Parser(text).run(); }

}  // namespace peg
