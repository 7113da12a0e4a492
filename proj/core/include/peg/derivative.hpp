// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "peg/gen.hpp"
#include "peg/grammar.hpp"

namespace peg::derivs {

/// Out-of-band end-of-input symbol: bytes are 0..255, the final derivative
/// step consumes this pseudo-symbol instead.
constexpr int kEndOfInput = 256;

using NodeId = std::uint32_t;

enum class DKind : std::uint8_t {
    Char,     // single byte literal
    AnyByte,  // any byte, never end-of-input
    Empty,    // matches consuming nothing
    Look,     // successful lookahead match at a generation
    Fail,     // generic failure
    Inf,      // left-recursive loop failure
    Nonterm,  // symbolic rule reference, expanded on derivation
    Not,      // negative lookahead
    Map,      // child expression composed into a parent generation space
    Alt,      // ordered choice with per-branch generation maps
    Seq,      // sequence with follower bookkeeping
};

/// Bookkeeping for one pending lookahead generation of a sequence: the
/// follower expression started where that lookahead began, its generation
/// map into the sequence's space, and the generation of its last empty
/// match (0 for none).
struct Follower {
    Gen gen = 0;
    NodeId expr = 0;
    GenMap map;
    Gen last_match = 0;

    bool operator==(const Follower& o) const {
        return gen == o.gen && expr == o.expr && map == o.map &&
               last_match == o.last_match;
    }
};

struct DNode {
    DKind kind = DKind::Fail;
    Byte sym = 0;       // Char
    Gen look = 0;       // Look
    Symbol name = 0;    // Nonterm
    NodeId a = 0;       // Not/Map child; Alt first; Seq predecessor
    NodeId b = 0;       // Alt second; Seq generation-zero follower
    GenMap ma;          // Map; Alt first-branch map
    GenMap mb;          // Alt second-branch map
    std::vector<Follower> fs;  // Seq followers, ascending by generation
    NodeId empty_f = 0;        // Seq nullability backtrack
    GenMap me;                 // Seq nullability backtrack map
    Gen m = 0;                 // maximum generation of the node's space

    bool operator==(const DNode& o) const {
        return kind == o.kind && sym == o.sym && look == o.look &&
               name == o.name && a == o.a && b == o.b && ma == o.ma &&
               mb == o.mb && fs == o.fs && empty_f == o.empty_f &&
               me == o.me && m == o.m;
    }
};

/// Instrumentation for one derivative step. Node counts are unique nodes
/// reachable from the root expression before and after the step.
struct StepMetrics {
    std::size_t position = 0;
    int symbol = 0;  // byte value or kEndOfInput
    std::size_t nodes_before = 0;
    std::size_t nodes_after = 0;
    std::size_t unique_subexpressions = 0;
    Gen max_generation = 0;
    std::size_t live_generations = 0;
    std::uint64_t compactions_fired = 0;
    std::uint64_t elapsed_ns = 0;

    bool operator==(const StepMetrics&) const = default;
};

struct ParseResult {
    bool matched = false;
    std::size_t steps = 0;
    std::vector<StepMetrics> metrics;
};

/// Recognition by repeated memoized derivatives of an annotated expression
/// DAG. One Engine is bound to one desugared grammar and is not thread-safe;
/// the grammar itself is immutable and may be shared. Well-formedness is not
/// required: left recursion terminates through the loop-failure node.
class Engine {
public:
    explicit Engine(const Grammar& g);

    /// Runs at most input.size()+1 derivative steps. The unparsed suffix is
    /// not reported.
    ParseResult parse(std::span<const Byte> input, bool collect_metrics = false);

    // --- node construction (persistent store, compaction applied) ---
    NodeId char_node(Byte b);
    NodeId any_node();
    NodeId empty_node();
    NodeId fail_node();
    NodeId inf_node();
    NodeId look_node(Gen g);  // generation 0 is the empty node
    NodeId nonterm_node(std::string_view rule_name);
    NodeId make_not(NodeId child);
    NodeId make_map(NodeId child, GenMap map, Gen m);
    NodeId make_alt(NodeId first, NodeId second, GenMap first_map,
                    GenMap second_map, Gen m);
    NodeId make_seq(NodeId pred, NodeId follow, std::vector<Follower> fs,
                    NodeId empty_f, GenMap empty_map, Gen m);

    // --- uncompacted constructors plus the standalone rewrite entry point;
    //     children are assumed already compacted ---
    NodeId raw_look(Gen g);
    NodeId raw_not(NodeId child);
    NodeId raw_map(NodeId child, GenMap map, Gen m);
    NodeId raw_alt(NodeId first, NodeId second, GenMap first_map,
                   GenMap second_map, Gen m);
    NodeId raw_seq(NodeId pred, NodeId follow, std::vector<Follower> fs,
                   NodeId empty_f, GenMap empty_map, Gen m);
    NodeId compact(NodeId id);

    /// Static elaboration of the grammar's start expression.
    NodeId inject();

    /// Generations currently being parsed by the node / the subset that has
    /// already matched. Recursive rule references fall back to the
    /// assumption values {0} / {} while their own sets are being computed.
    GenSet back(NodeId id);
    GenSet match_set(NodeId id);

    /// New-generation map for a node against the given basis generation.
    GenMap ngs(NodeId id, Gen basis);

    /// One memoized derivative pass over the DAG rooted at `root`, which
    /// must be the most recent root (or static). Returns the new root.
    NodeId step(NodeId root, int symbol);

    const DNode& node(NodeId id) const;
    void visit_reachable(NodeId root,
                         const std::function<void(NodeId, const DNode&)>& fn) const;
    std::size_t reachable_count(NodeId root) const;
    Gen max_generation(NodeId root) const;

    /// Sum over all rules of the unique-node count of the rule body's
    /// static form (rule references count as atoms).
    std::size_t rule_body_size_sum();

    std::uint64_t compactions_in_last_step() const { return compactions_; }
    std::uint64_t derive_calls_in_last_step() const { return derive_calls_; }

private:
    static constexpr int kStatic = 0;

    struct Store {
        std::vector<DNode> nodes;
        std::unordered_multimap<std::size_t, std::uint32_t> index;
        void clear() {
            nodes.clear();
            index.clear();
        }
    };

    static int tag_of(NodeId id) { return static_cast<int>(id >> 30); }
    static std::uint32_t index_of(NodeId id) { return id & 0x3fffffffu; }
    static NodeId id_of(int tag, std::uint32_t index) {
        return (static_cast<NodeId>(tag) << 30) | index;
    }

    NodeId intern_node(DNode&& n);
    NodeId lookup_in(int tag, const DNode& n, std::size_t h) const;

    NodeId elaborate(ExprId id);
    NodeId rule_dnode(std::size_t rule);
    NodeId elaborate_seq(NodeId alpha, NodeId beta);

    NodeId derive(NodeId id, int symbol);
    NodeId derive_seq(const DNode& n, int symbol);

    GenSet back_uncached(NodeId id);
    GenSet match_uncached(NodeId id);

    GenMap up_and_prune(const GenMap& p, const GenSet& back_old,
                        const GenSet& back_new, Gen m, bool& grew);

    const Grammar& g_;
    Store stores_[3];
    int target_ = kStatic;  // store receiving new nodes
    int live_ = 1;          // step store holding the current root

    std::unordered_map<ExprId, NodeId> elab_memo_;
    std::vector<NodeId> body_nodes_;  // per rule; kNoBody = not yet built

    std::unordered_map<NodeId, NodeId> deriv_memo_;
    std::unordered_map<NodeId, GenSet> back_cache_;
    std::unordered_map<NodeId, GenSet> match_cache_;
    std::unordered_set<Symbol> back_busy_;
    std::unordered_set<Symbol> match_busy_;

    std::uint64_t compactions_ = 0;
    std::uint64_t derive_calls_ = 0;

    static constexpr NodeId kNoBody = 0xffffffffu;
};

}  // namespace peg::derivs
