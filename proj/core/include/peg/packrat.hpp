// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>

#include "peg/grammar.hpp"

namespace peg::packrat {

struct Stats {
    std::uint64_t memo_entries = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
};

struct Result {
    bool matched = false;
    std::size_t consumed = 0;
    Stats stats;
};

/// Memo lookup/store events, for tracing: (hit, rule name, position,
/// matched, end position).
using TraceFn =
    std::function<void(bool, std::string_view, std::size_t, bool, std::size_t)>;

/// Memoized recognition: every (nonterminal, position) pair is evaluated at
/// most once; inline expressions are re-evaluated. Linear time and space in
/// the input for a well-formed grammar. The grammar must be desugared and
/// well-formed (caller enforced); re-entry of a rule at the same position
/// raises std::logic_error.
Result recognize_packrat(const Grammar& g, std::span<const Byte> input,
                         const TraceFn& trace = {});

}  // namespace peg::packrat
