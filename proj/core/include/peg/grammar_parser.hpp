// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "peg/grammar.hpp"

namespace peg {

class GrammarError : public std::runtime_error {
public:
    GrammarError(std::string msg, std::size_t line, std::size_t col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                             ": " + msg),
          line(line),
          col(col) {}

    std::size_t line, col;
};

/// Parses a grammar from Ford-style source: `Name <- expr` rules, `/`
/// alternation, `!`/`&` prefixes, `*`/`+`/`?` suffixes, `'...'` literals,
/// `[a-c]` classes, `.`, `()` grouping and `#` line comments. The first rule
/// is the start rule. Multi-character literals become sequences of
/// single-byte literals; sugar forms are kept (see desugar()).
///
/// Throws GrammarError with line/column on syntax errors, duplicate rule
/// names and references to undefined nonterminals.
Grammar parse_grammar(std::string_view text);

}  // namespace peg
