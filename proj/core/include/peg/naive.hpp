// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "peg/grammar.hpp"

namespace peg::naive {

enum class RunStatus : std::uint8_t { Match, Fail, Exhausted };

/// Result of one expression evaluation. On Fail, `next` equals the entry
/// position: a failing expression consumes no input.
struct Outcome {
    RunStatus status = RunStatus::Fail;
    std::size_t next = 0;
};

struct Limits {
    std::uint64_t max_invocations = 50'000'000;
    std::size_t max_depth = 100'000;
};

struct Stats {
    std::uint64_t nonterminal_invocations = 0;
    std::size_t max_recursion_depth = 0;
    bool step_limit_hit = false;
};

/// Direct recursive-descent evaluation of one expression at a position,
/// realized with an explicit control stack. The grammar must be desugared
/// and well-formed (caller enforced); pos <= input.size(). Exceeding a
/// budget yields a distinguished Exhausted result, never a wrong answer.
Outcome match_naive(const Grammar& g, ExprId e, std::span<const Byte> input,
                    std::size_t pos, const Limits& limits, Stats& stats);

struct Result {
    RunStatus status = RunStatus::Fail;
    std::size_t consumed = 0;
    Stats stats;
};

/// Runs the start expression at position 0; on Match, `consumed` is the
/// length of the matched prefix.
Result recognize_naive(const Grammar& g, std::span<const Byte> input,
                       const Limits& limits = {});

}  // namespace peg::naive
