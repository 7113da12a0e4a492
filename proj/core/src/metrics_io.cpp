// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/metrics_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace peg {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

constexpr std::string_view kHeader = "pegwb-metrics 1";

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string symbol_str(int sym) {
    if (sym == derivs::kEndOfInput) return "$";
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02x", sym);
    return buf;
}

int parse_symbol(std::string_view s) {
    if (s == "$") return derivs::kEndOfInput;
    if (s.size() != 4 || s.substr(0, 2) != "0x") {
        throw std::runtime_error("metrics: bad symbol field");
    }
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("metrics: bad symbol field");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view s, int base = 10) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("metrics: bad numeric field '" + std::string(s) + "'");
    }
    return v;
}

// splits "key=value" at the first '='
std::pair<std::string_view, std::string_view> split_kv(std::string_view tok) {
    std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos) {
        throw std::runtime_error("metrics: expected key=value, got '" +
                                 std::string(tok) + "'");
    }
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

std::string write_metrics(const RunRecord& run) {
    std::ostringstream os;
    os << kHeader << "\n";
    os << "engine " << run.engine << "\n";
    os << "grammar fnv64:" << hex64(run.grammar_hash) << "\n";
    os << "input_length " << run.input_length << "\n";
    os << "verdict " << run.verdict << "\n";
    if (run.consumed) os << "consumed " << *run.consumed << "\n";
    if (run.engine == "naive") {
        os << "invocations " << run.invocations << "\n";
        os << "max_recursion_depth " << run.max_recursion_depth << "\n";
    } else if (run.engine == "packrat") {
        os << "memo_entries " << run.memo_entries << "\n";
        os << "hits " << run.hits << "\n";
        os << "misses " << run.misses << "\n";
    }
    for (const auto& s : run.steps) {
        os << "step position=" << s.position << " symbol=" << symbol_str(s.symbol)
           << " nodes_before=" << s.nodes_before
           << " nodes_after=" << s.nodes_after
           << " unique_subexpressions=" << s.unique_subexpressions
           << " max_generation=" << s.max_generation
           << " live_generations=" << s.live_generations
           << " compactions_fired=" << s.compactions_fired
           << " elapsed=" << s.elapsed_ns << "\n";
    }
    os << "end\n";
    return os.str();
}

RunRecord read_metrics(std::string_view doc) {
    RunRecord run;
    std::size_t pos = 0;
    bool saw_header = false, saw_end = false;
    while (pos <= doc.size()) {
        std::size_t nl = doc.find('\n', pos);
        std::string_view line = nl == std::string_view::npos
                                    ? doc.substr(pos)
                                    : doc.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? doc.size() + 1 : nl + 1;
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kHeader) {
                throw std::runtime_error("metrics: unsupported document header");
            }
            saw_header = true;
            continue;
        }
        if (line == "end") {
            saw_end = true;
            break;
        }
        auto toks = tokens(line);
        if (toks.empty()) continue;
        std::string_view tag = toks[0];
        if (tag == "step") {
            derivs::StepMetrics sm;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i]);
                if (k == "position") sm.position = parse_u64(v);
                else if (k == "symbol") sm.symbol = parse_symbol(v);
                else if (k == "nodes_before") sm.nodes_before = parse_u64(v);
                else if (k == "nodes_after") sm.nodes_after = parse_u64(v);
                else if (k == "unique_subexpressions") sm.unique_subexpressions = parse_u64(v);
                else if (k == "max_generation") sm.max_generation = static_cast<derivs::Gen>(parse_u64(v));
                else if (k == "live_generations") sm.live_generations = parse_u64(v);
                else if (k == "compactions_fired") sm.compactions_fired = parse_u64(v);
                else if (k == "elapsed") sm.elapsed_ns = parse_u64(v);
                else throw std::runtime_error("metrics: unknown step field '" + std::string(k) + "'");
            }
            run.steps.push_back(sm);
            continue;
        }
        if (toks.size() != 2) {
            throw std::runtime_error("metrics: malformed line '" + std::string(line) + "'");
        }
        std::string_view v = toks[1];
        if (tag == "engine") run.engine = std::string(v);
        else if (tag == "grammar") {
            if (v.substr(0, 6) != "fnv64:") throw std::runtime_error("metrics: bad grammar field");
            run.grammar_hash = parse_u64(v.substr(6), 16);
        } else if (tag == "input_length") run.input_length = parse_u64(v);
        else if (tag == "verdict") run.verdict = std::string(v);
        else if (tag == "consumed") run.consumed = parse_u64(v);
        else if (tag == "invocations") run.invocations = parse_u64(v);
        else if (tag == "max_recursion_depth") run.max_recursion_depth = parse_u64(v);
        else if (tag == "memo_entries") run.memo_entries = parse_u64(v);
        else if (tag == "hits") run.hits = parse_u64(v);
        else if (tag == "misses") run.misses = parse_u64(v);
        else throw std::runtime_error("metrics: unknown line tag '" + std::string(tag) + "'");
    }
    if (!saw_header || !saw_end) {
        throw std::runtime_error("metrics: truncated document");
    }
    return run;
}

}  // namespace peg
