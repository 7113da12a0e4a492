// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peg/derivative.hpp"

namespace peg {

/// FNV-1a 64-bit hash, used to fingerprint grammar sources in reports.
std::uint64_t fnv1a64(std::string_view s);

/// One engine run, as serialized into a metrics document.
struct RunRecord {
    std::string engine;                    // naive | packrat | derivative
    std::uint64_t grammar_hash = 0;        // fnv1a64 of the grammar source
    std::size_t input_length = 0;
    std::string verdict;                   // match | fail | exhausted
    std::optional<std::size_t> consumed;   // naive and packrat only
    // naive
    std::uint64_t invocations = 0;
    std::size_t max_recursion_depth = 0;
    // packrat
    std::uint64_t memo_entries = 0, hits = 0, misses = 0;
    // derivative
    std::vector<derivs::StepMetrics> steps;

    bool operator==(const RunRecord&) const = default;
};

/// Line-delimited metrics document with a versioned header. Step lines use
/// the field names position, symbol, nodes_before, nodes_after,
/// unique_subexpressions, max_generation, live_generations,
/// compactions_fired and elapsed (nanoseconds); the end-of-input symbol is
/// written as `$`.
std::string write_metrics(const RunRecord& run);

/// Parses a document produced by write_metrics. Throws std::runtime_error
/// on malformed input or an unsupported version.
RunRecord read_metrics(std::string_view doc);

}  // namespace peg
