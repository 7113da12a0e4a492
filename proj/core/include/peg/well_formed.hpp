// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "peg/grammar.hpp"

namespace peg {

struct WellFormednessReport {
    bool well_formed = true;
    /// Each offending cycle lists the nonterminals of one strongly connected
    /// component of the "can invoke at the same input position" relation, in
    /// rule declaration order. A self-loop is a one-element cycle.
    std::vector<std::vector<std::string>> offending_cycles;
    /// Rules whose body can succeed consuming no input.
    std::vector<std::string> nullable_nonterminals;
};

/// Checks that the grammar has no direct or mutual left recursion. Requires
/// a desugared grammar. Nullability ("can succeed consuming nothing") is
/// computed to a fixed point, then cycles are detected in the relation
/// "rule A can invoke rule B at its own start position".
WellFormednessReport check_well_formed(const Grammar& g);

}  // namespace peg
