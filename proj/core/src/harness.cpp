// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/harness.hpp"

#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

#include "peg/desugar.hpp"
#include "peg/grammar_parser.hpp"
#include "peg/metrics_io.hpp"
#include "peg/packrat.hpp"
#include "peg/well_formed.hpp"

namespace peg::harness {

namespace {

// Thin wrapper over the engine output so that generated artifacts do not
// depend on standard-library distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
    bool chance(std::size_t percent) { return pick(100) < percent; }

private:
    std::mt19937_64 eng_;
};

class GrammarGen {
public:
    GrammarGen(const GrammarGenConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {}

    std::string generate() {
        rule_names_.clear();
        std::size_t rules = 2 + rng_.pick(cfg_.max_rules > 2 ? cfg_.max_rules - 1 : 1);
        if (rules > cfg_.max_rules) rules = cfg_.max_rules;
        rule_names_.push_back("S");
        for (std::size_t i = 1; i < rules; ++i) {
            rule_names_.push_back(std::string(1, static_cast<char>('A' + i - 1)));
        }
        std::string out;
        for (const std::string& name : rule_names_) {
            out += name + " <- " + gen_alt(cfg_.max_depth) + "\n";
        }
        return out;
    }

private:
    const GrammarGenConfig& cfg_;
    Rng& rng_;
    std::vector<std::string> rule_names_;

    std::string literal() {
        return "'" + std::string(1, static_cast<char>(
                         cfg_.alphabet[rng_.pick(cfg_.alphabet.size())])) + "'";
    }

    std::string gen_alt(std::size_t depth) {
        std::size_t fanout = 1 + rng_.pick(cfg_.max_alt_fanout);
        std::string out;
        for (std::size_t i = 0; i < fanout; ++i) {
            if (i) out += " / ";
            out += gen_seq(depth);
        }
        return out;
    }

    std::string gen_seq(std::size_t depth) {
        std::size_t parts = 1 + rng_.pick(3);
        std::string out;
        for (std::size_t i = 0; i < parts; ++i) {
            if (i) out += " ";
            // bias the head toward consuming forms; keeps most drafts
            // well-formed so the retry loop converges quickly
            out += gen_prefix(depth, /*head=*/i == 0);
        }
        return out;
    }

    std::string gen_prefix(std::size_t depth, bool head) {
        if (depth > 0 && !head && rng_.chance(12)) {
            return "!" + gen_primary(depth - 1, false);
        }
        if (depth > 0 && cfg_.sugar_enabled && !head && rng_.chance(8)) {
            return "&" + gen_primary(depth - 1, false);
        }
        std::string p = gen_primary(depth, head);
        if (depth > 0 && cfg_.sugar_enabled && !head && rng_.chance(20)) {
            const char* suffix[] = {"*", "+", "?"};
            return p + suffix[rng_.pick(3)];
        }
        return p;
    }

    std::string gen_primary(std::size_t depth, bool head) {
        std::size_t r = rng_.pick(100);
        if (head) {
            // mostly terminals at the front of a sequence
            if (r < 55 || depth == 0) return literal();
            if (r < 70) return rule_names_[rng_.pick(rule_names_.size())];
            if (r < 75) return ".";
            return "(" + gen_alt(depth - 1) + ")";
        }
        if (depth == 0) {
            if (r < 70) return literal();
            if (r < 85) return rule_names_[rng_.pick(rule_names_.size())];
            if (r < 90) return "''";
            return ".";
        }
        if (r < 40) return literal();
        if (r < 60) return rule_names_[rng_.pick(rule_names_.size())];
        if (r < 66) return "''";
        if (r < 70) return ".";
        if (r < 78 && cfg_.sugar_enabled && cfg_.alphabet.size() >= 2) {
            // a class over a random alphabet slice
            std::size_t lo = rng_.pick(cfg_.alphabet.size() - 1);
            std::size_t hi = lo + 1 + rng_.pick(cfg_.alphabet.size() - lo - 1);
            std::string out = "[";
            for (std::size_t i = lo; i <= hi && i < cfg_.alphabet.size(); ++i) {
                out += static_cast<char>(cfg_.alphabet[i]);
            }
            return out + "]";
        }
        return "(" + gen_alt(depth - 1) + ")";
    }
};

}  // namespace

std::string gen_grammar_source(const GrammarGenConfig& cfg) {
    Rng rng(cfg.seed);
    for (std::size_t attempt = 0; attempt < cfg.retry_budget; ++attempt) {
        GrammarGen gen(cfg, rng);
        std::string text = gen.generate();
        Grammar g;
        try {
            g = parse_grammar(text);
        } catch (const GrammarError&) {
            continue;  // defensive; generated text should always parse
        }
        Grammar d = desugar(g);
        if (check_well_formed(d).well_formed) return text;
    }
    throw std::runtime_error("gen_grammar: retry budget exhausted for seed " +
                             std::to_string(cfg.seed));
}

Grammar gen_grammar(const GrammarGenConfig& cfg) {
    return parse_grammar(gen_grammar_source(cfg));
}

std::vector<std::vector<Byte>> gen_inputs(std::span<const Byte> alphabet,
                                          std::size_t max_len) {
    if (max_len > 10) {
        throw std::invalid_argument("gen_inputs: exhaustive mode capped at length 10");
    }
    std::vector<std::vector<Byte>> out;
    out.emplace_back();  // the empty string, exactly once
    std::size_t first_of_prev = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t end = out.size();
        for (std::size_t i = first_of_prev; i < end; ++i) {
            for (Byte b : alphabet) {
                std::vector<Byte> s = out[i];
                s.push_back(b);
                out.push_back(std::move(s));
            }
        }
        first_of_prev = end;
    }
    return out;
}

std::vector<std::vector<Byte>> gen_random_inputs(std::span<const Byte> alphabet,
                                                 std::uint64_t seed,
                                                 std::size_t count,
                                                 std::size_t min_len,
                                                 std::size_t max_len) {
    Rng rng(seed);
    std::vector<std::vector<Byte>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t len = min_len + rng.pick(max_len - min_len + 1);
        std::vector<Byte> s(len);
        for (auto& b : s) b = alphabet[rng.pick(alphabet.size())];
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

const char* naive_verdict_str(naive::RunStatus s) {
    switch (s) {
        case naive::RunStatus::Match: return "match";
        case naive::RunStatus::Fail: return "fail";
        default: return "exhausted";
    }
}

}  // namespace

DiffReport differential_run(const Grammar& g, const std::string& source_text,
                            std::span<const std::vector<Byte>> inputs,
                            const DiffOptions& opts) {
    DiffReport rep;
    rep.grammar = source_text;
    derivs::Engine engine(g);
    std::size_t rule_size_sum = 0;
    if (opts.structural_checks) rule_size_sum = engine.rule_body_size_sum();
    std::size_t nrules = g.rule_count();

    for (const auto& input : inputs) {
        ++rep.inputs_attempted;

        naive::Result nv = naive::recognize_naive(g, input, opts.naive_limits);
        packrat::Result pk = packrat::recognize_packrat(g, input);
        derivs::ParseResult dv = engine.parse(input, opts.structural_checks);

        if (opts.structural_checks) {
            derivs::Gen prev_gen = 0;
            for (const auto& sm : dv.metrics) {
                ++rep.structural.steps_checked;
                if (sm.nodes_after > sm.nodes_before &&
                    sm.nodes_after - sm.nodes_before > rule_size_sum) {
                    ++rep.structural.node_growth_violations;
                }
                if (sm.max_generation > prev_gen + 1) {
                    ++rep.structural.gen_growth_violations;
                }
                prev_gen = sm.max_generation;
                rep.structural.max_live_generations =
                    std::max(rep.structural.max_live_generations, sm.live_generations);
            }
            if (pk.stats.memo_entries > nrules * (input.size() + 1) ||
                pk.stats.misses > nrules * (input.size() + 1)) {
                ++rep.structural.packrat_bound_violations;
            }
        }

        if (nv.status == naive::RunStatus::Exhausted) {
            rep.budget_exhaustions.push_back(input);
            continue;  // excluded from comparison, but logged
        }
        ++rep.cells_compared;

        bool n_match = nv.status == naive::RunStatus::Match;
        bool ok = n_match == pk.matched && pk.matched == dv.matched &&
                  (!n_match || nv.consumed == pk.consumed);
        if (!ok) {
            Disagreement d;
            d.input = input;
            d.naive_verdict = naive_verdict_str(nv.status);
            d.packrat_verdict = pk.matched ? "match" : "fail";
            d.derivative_verdict = dv.matched ? "match" : "fail";
            d.naive_consumed = nv.consumed;
            d.packrat_consumed = pk.consumed;
            rep.disagreements.push_back(std::move(d));
        }
    }
    return rep;
}

namespace {

std::string hex_bytes(std::span<const Byte> s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(s.size() * 2);
    for (Byte b : s) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

}  // namespace

std::string write_diff_report(const DiffReport& r) {
    std::ostringstream os;
    os << "pegwb-diff 1\n";
    os << "grammar fnv64:";
    {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(r.grammar)));
        os << buf;
    }
    os << "\n";
    os << "inputs attempted=" << r.inputs_attempted
       << " compared=" << r.cells_compared
       << " exhausted=" << r.budget_exhaustions.size() << "\n";
    for (const auto& d : r.disagreements) {
        os << "disagree input=" << hex_bytes(d.input) << " naive=" << d.naive_verdict
           << " packrat=" << d.packrat_verdict
           << " derivative=" << d.derivative_verdict
           << " naive_consumed=" << d.naive_consumed
           << " packrat_consumed=" << d.packrat_consumed << "\n";
    }
    for (const auto& input : r.budget_exhaustions) {
        os << "exhausted input=" << hex_bytes(input) << "\n";
    }
    os << "verdict " << (r.passed() ? "pass" : "fail") << "\n";
    os << "end\n";
    return os.str();
}

std::string family_grammar_source(Family f) {
    switch (f) {
        case Family::ExpGrammar:
            return "S <- A !.\n"
                   "A <- 'a' A 'b' / 'a' A 'c' / ''\n";
        case Family::AnBnCn:
            return "S <- &(A !'b') 'a'* B !.\n"
                   "A <- 'a' A? 'b'\n"
                   "B <- 'b' B? 'c'\n";
        case Family::Statements:
            return "S <- 'if' E S ('else' S)? / 'while' E S / 'begin' S+ 'end' "
                   "/ 'set' L E\n"
                   "E <- 'e'\n"
                   "L <- 'l'\n";
    }
    throw std::invalid_argument("unknown family");
}

std::vector<Byte> family_input(Family f, std::size_t n) {
    std::vector<Byte> s;
    switch (f) {
        case Family::ExpGrammar:
            s.assign(n, 'a');
            s.insert(s.end(), n, 'c');
            return s;
        case Family::AnBnCn:
            s.assign(n, 'a');
            s.insert(s.end(), n, 'b');
            s.insert(s.end(), n, 'c');
            return s;
        case Family::Statements: {
            // begin setle setle ... end, sized to roughly n bytes
            std::size_t reps = n > 13 ? (n - 8) / 5 : 1;
            std::string text = "begin";
            for (std::size_t i = 0; i < reps; ++i) text += "setle";
            text += "end";
            return std::vector<Byte>(text.begin(), text.end());
        }
    }
    throw std::invalid_argument("unknown family");
}

std::vector<BenchRow> bench_scaling(Family f, std::span<const std::size_t> ns,
                                    const EngineSelection& engines,
                                    const naive::Limits& limits) {
    std::string family_name = f == Family::ExpGrammar  ? "exp-grammar"
                              : f == Family::AnBnCn    ? "anbncn"
                                                       : "statements";
    Grammar g = desugar(parse_grammar(family_grammar_source(f)));
    derivs::Engine engine(g);
    std::vector<BenchRow> rows;

    for (std::size_t n : ns) {
        std::vector<Byte> input = family_input(f, n);
        auto base_row = [&](const char* name) {
            BenchRow r;
            r.family = family_name;
            r.engine = name;
            r.n = n;
            r.input_len = input.size();
            return r;
        };
        using clock = std::chrono::steady_clock;

        if (engines.naive) {
            BenchRow r = base_row("naive");
            auto t0 = clock::now();
            naive::Result res = naive::recognize_naive(g, input, limits);
            r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            clock::now() - t0)
                            .count();
            r.verdict = naive_verdict_str(res.status);
            r.naive_invocations = res.stats.nonterminal_invocations;
            rows.push_back(std::move(r));
        }
        if (engines.packrat) {
            BenchRow r = base_row("packrat");
            auto t0 = clock::now();
            packrat::Result res = packrat::recognize_packrat(g, input);
            r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            clock::now() - t0)
                            .count();
            r.verdict = res.matched ? "match" : "fail";
            r.packrat_memo_entries = res.stats.memo_entries;
            r.packrat_misses = res.stats.misses;
            rows.push_back(std::move(r));
        }
        if (engines.derivative) {
            BenchRow r = base_row("derivative");
            auto t0 = clock::now();
            derivs::ParseResult res = engine.parse(input, true);
            r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                            clock::now() - t0)
                            .count();
            r.verdict = res.matched ? "match" : "fail";
            r.steps = res.steps;
            for (const auto& sm : res.metrics) {
                r.peak_nodes = std::max(r.peak_nodes, sm.nodes_after);
                r.max_generation = std::max(r.max_generation, sm.max_generation);
                r.live_gen_max = std::max(r.live_gen_max, sm.live_generations);
            }
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::string write_bench_rows(std::span<const BenchRow> rows) {
    std::ostringstream os;
    os << "pegwb-bench 1\n";
    for (const auto& r : rows) {
        os << "row family=" << r.family << " engine=" << r.engine << " n=" << r.n
           << " input_len=" << r.input_len << " verdict=" << r.verdict
           << " wall_ns=" << r.wall_ns;
        if (r.engine == "naive") {
            os << " invocations=" << r.naive_invocations;
        } else if (r.engine == "packrat") {
            os << " memo_entries=" << r.packrat_memo_entries
               << " misses=" << r.packrat_misses;
        } else {
            os << " steps=" << r.steps << " peak_nodes=" << r.peak_nodes
               << " max_generation=" << r.max_generation
               << " live_gen_max=" << r.live_gen_max;
        }
        os << "\n";
    }
    os << "end\n";
    return os.str();
}

bool is_anbncn(std::span<const Byte> s) {
    std::size_t i = 0;
    std::size_t a = 0, b = 0, c = 0;
    while (i < s.size() && s[i] == 'a') { ++a; ++i; }
    while (i < s.size() && s[i] == 'b') { ++b; ++i; }
    while (i < s.size() && s[i] == 'c') { ++c; ++i; }
    return i == s.size() && a >= 1 && a == b && b == c;
}

}  // namespace peg::harness
