// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "peg/grammar.hpp"

namespace peg {

/// Rewrites sugar forms into the core forms:
///   a*      -> fresh rule %repN <- a %repN / '', occurrence replaced by %repN
///   a+      -> a %repN            (sharing the %repN rule for a*)
///   a?      -> a / ''
///   &a      -> !!a
///   [a-c]   -> 'a' / 'b' / 'c'    (ascending byte order)
/// `.` stays a core form matching any byte. Structurally identical
/// repetition bodies share one fresh nonterminal; fresh rules are named
/// %rep0, %rep1, ... in first-appearance order and appended after the
/// original rules. Idempotent.
Grammar desugar(const Grammar& g);

/// True when no sugar form remains anywhere in the grammar.
bool is_desugared(const Grammar& g);

}  // namespace peg
