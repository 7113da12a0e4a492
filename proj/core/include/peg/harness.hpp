// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peg/derivative.hpp"
#include "peg/grammar.hpp"
#include "peg/naive.hpp"

namespace peg::harness {

struct GrammarGenConfig {
    std::uint64_t seed = 0;
    std::size_t max_rules = 8;
    std::size_t max_depth = 4;
    std::vector<Byte> alphabet = {'a', 'b', 'c'};
    bool sugar_enabled = true;
    std::size_t max_alt_fanout = 4;
    std::size_t retry_budget = 1000;
};

/// Deterministic random grammar source: same config, same text. The output
/// reparses with parse_grammar, desugars cleanly, and is well-formed
/// (generation retries until the check passes). Throws std::runtime_error
/// when the retry budget is exhausted.
std::string gen_grammar_source(const GrammarGenConfig& cfg);

/// Parsed form of gen_grammar_source (sugar intact).
Grammar gen_grammar(const GrammarGenConfig& cfg);

/// Exhaustive enumeration of all strings over the alphabet up to max_len,
/// shortest first, lexicographic within a length. The empty string appears
/// exactly once. Requires max_len <= 10.
std::vector<std::vector<Byte>> gen_inputs(std::span<const Byte> alphabet,
                                          std::size_t max_len);

/// Seeded random strings with lengths in [min_len, max_len], to extend an
/// exhaustive set with longer inputs.
std::vector<std::vector<Byte>> gen_random_inputs(std::span<const Byte> alphabet,
                                                 std::uint64_t seed,
                                                 std::size_t count,
                                                 std::size_t min_len,
                                                 std::size_t max_len);

struct Disagreement {
    std::vector<Byte> input;
    std::string naive_verdict;       // match | fail | exhausted
    std::string packrat_verdict;     // match | fail
    std::string derivative_verdict;  // match | fail
    std::size_t naive_consumed = 0;
    std::size_t packrat_consumed = 0;
};

/// Aggregated structural-claim checks over derivative runs.
struct StructuralCheck {
    std::uint64_t steps_checked = 0;
    std::uint64_t node_growth_violations = 0;  // per-step growth above the rule-size sum
    std::uint64_t gen_growth_violations = 0;   // max generation jumped by more than 1
    std::size_t max_live_generations = 0;
    std::uint64_t packrat_bound_violations = 0;  // memo entries above |N|*(n+1)
};

struct DiffReport {
    std::string grammar;  // source text
    std::size_t inputs_attempted = 0;
    std::size_t cells_compared = 0;
    std::vector<Disagreement> disagreements;
    std::vector<std::vector<Byte>> budget_exhaustions;
    StructuralCheck structural;

    bool passed() const { return disagreements.empty(); }
};

struct DiffOptions {
    naive::Limits naive_limits;
    bool structural_checks = true;  // collect derivative metrics and fold checks
};

/// Runs all three engines on every input. Verdicts are compared match/fail
/// only against the derivative engine; naive and packrat additionally
/// compare consumed lengths. A naive budget exhaustion excludes that input
/// from comparison and is logged. The grammar must be desugared and
/// well-formed.
DiffReport differential_run(const Grammar& g, const std::string& source_text,
                            std::span<const std::vector<Byte>> inputs,
                            const DiffOptions& opts = {});

/// Deterministic serialization of a report (line format, versioned header).
std::string write_diff_report(const DiffReport& r);

enum class Family { ExpGrammar, AnBnCn, Statements };

/// Built-in grammar source for a scaling family.
std::string family_grammar_source(Family f);

/// Input for a family at scale n. ExpGrammar: a^n c^n. AnBnCn: a^n b^n c^n.
/// Statements: one begin/end block of set-statements with total length
/// close to n.
std::vector<Byte> family_input(Family f, std::size_t n);

struct BenchRow {
    std::string family;
    std::string engine;
    std::size_t n = 0;
    std::size_t input_len = 0;
    std::string verdict;
    std::uint64_t wall_ns = 0;
    std::uint64_t naive_invocations = 0;
    std::uint64_t packrat_memo_entries = 0;
    std::uint64_t packrat_misses = 0;
    std::size_t steps = 0;
    std::size_t peak_nodes = 0;
    derivs::Gen max_generation = 0;
    std::size_t live_gen_max = 0;
};

struct EngineSelection {
    bool naive = true;
    bool packrat = true;
    bool derivative = true;
};

/// Per-(n, engine) measurements over a family. Budget exhaustion is
/// recorded in the row's verdict, not fatal.
std::vector<BenchRow> bench_scaling(Family f, std::span<const std::size_t> ns,
                                    const EngineSelection& engines,
                                    const naive::Limits& limits = {});

/// Deterministic serialization of bench rows (timing column excluded by the
/// caller when byte-stable output is needed).
std::string write_bench_rows(std::span<const BenchRow> rows);

/// True iff s is a^k b^k c^k for some k >= 1; the string oracle used to
/// admit the AnBnCn grammar into the corpus.
bool is_anbncn(std::span<const Byte> s);

}  // namespace peg::harness
