// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/derivative.hpp"

#include <chrono>
#include <stdexcept>

#include "peg/desugar.hpp"

namespace peg::derivs {

namespace {

inline void hash_mix(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

std::size_t hash_node(const DNode& n) {
    std::size_t h = static_cast<std::size_t>(n.kind);
    hash_mix(h, n.sym);
    hash_mix(h, n.look);
    hash_mix(h, n.name);
    hash_mix(h, n.a);
    hash_mix(h, n.b);
    hash_mix(h, n.ma.hash());
    hash_mix(h, n.mb.hash());
    hash_mix(h, n.empty_f);
    hash_mix(h, n.me.hash());
    hash_mix(h, n.m);
    hash_mix(h, n.fs.size());
    for (const Follower& f : n.fs) {
        hash_mix(h, f.gen);
        hash_mix(h, f.expr);
        hash_mix(h, f.map.hash());
        hash_mix(h, f.last_match);
    }
    return h;
}

bool is_atom(DKind k) {
    switch (k) {
        case DKind::Char:
        case DKind::AnyByte:
        case DKind::Empty:
        case DKind::Look:
        case DKind::Fail:
        case DKind::Inf:
        case DKind::Nonterm:
            return true;
        default:
            return false;
    }
}

}  // namespace

Engine::Engine(const Grammar& g) : g_(g) {
    if (!is_desugared(g)) {
        throw std::invalid_argument("derivative engine requires a desugared grammar");
    }
    body_nodes_.assign(g.rule_count(), kNoBody);
    fail_node();
    inf_node();
    empty_node();
}

// --- store ------------------------------------------------------------

const DNode& Engine::node(NodeId id) const {
    return stores_[tag_of(id)].nodes[index_of(id)];
}

NodeId Engine::lookup_in(int tag, const DNode& n, std::size_t h) const {
    const Store& s = stores_[tag];
    auto [lo, hi] = s.index.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        if (s.nodes[it->second] == n) return id_of(tag, it->second);
    }
    return kNoBody;
}

NodeId Engine::intern_node(DNode&& n) {
    std::size_t h = hash_node(n);
    int t = is_atom(n.kind) ? kStatic : target_;
    if (NodeId hit = lookup_in(kStatic, n, h); hit != kNoBody) return hit;
    if (t != kStatic) {
        if (NodeId hit = lookup_in(t, n, h); hit != kNoBody) return hit;
    }
    Store& s = stores_[t];
    auto idx = static_cast<std::uint32_t>(s.nodes.size());
    s.nodes.push_back(std::move(n));
    s.index.emplace(h, idx);
    return id_of(t, idx);
}

// --- constructors -------------------------------------------------------

NodeId Engine::char_node(Byte b) {
    DNode n;
    n.kind = DKind::Char;
    n.sym = b;
    return intern_node(std::move(n));
}

NodeId Engine::any_node() {
    DNode n;
    n.kind = DKind::AnyByte;
    return intern_node(std::move(n));
}

NodeId Engine::empty_node() {
    DNode n;
    n.kind = DKind::Empty;
    return intern_node(std::move(n));
}

NodeId Engine::fail_node() {
    DNode n;
    n.kind = DKind::Fail;
    return intern_node(std::move(n));
}

NodeId Engine::inf_node() {
    DNode n;
    n.kind = DKind::Inf;
    return intern_node(std::move(n));
}

NodeId Engine::look_node(Gen g) {
    if (g == 0) {
        ++compactions_;  // a generation-0 lookahead is the empty expression
        return empty_node();
    }
    DNode n;
    n.kind = DKind::Look;
    n.look = g;
    return intern_node(std::move(n));
}

NodeId Engine::nonterm_node(std::string_view rule_name) {
    auto it = g_.name_index.find(std::string(rule_name));
    if (it == g_.name_index.end() || !g_.has_rule(it->second)) {
        throw std::invalid_argument("unknown rule '" + std::string(rule_name) + "'");
    }
    DNode n;
    n.kind = DKind::Nonterm;
    n.name = it->second;
    return intern_node(std::move(n));
}

NodeId Engine::make_not(NodeId child) {
    if (!match_set(child).empty()) {
        ++compactions_;
        return fail_node();
    }
    DKind k = node(child).kind;
    if (k == DKind::Fail) {
        ++compactions_;
        return look_node(1);
    }
    if (k == DKind::Inf) {
        ++compactions_;
        return inf_node();
    }
    DNode n;
    n.kind = DKind::Not;
    n.a = child;
    return intern_node(std::move(n));
}

NodeId Engine::make_map(NodeId child, GenMap map, Gen m) {
    DKind k = node(child).kind;
    if (k == DKind::Empty) {
        ++compactions_;
        return look_node(map.at(0));
    }
    if (k == DKind::Look) {
        ++compactions_;
        return look_node(map.at(node(child).look));
    }
    if (k == DKind::Fail) {
        ++compactions_;
        return fail_node();
    }
    if (k == DKind::Inf) {
        ++compactions_;
        return inf_node();
    }
    if (map.is_dense_identity(m)) {
        ++compactions_;
        return child;
    }
    DNode n;
    n.kind = DKind::Map;
    n.a = child;
    n.ma = std::move(map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::make_alt(NodeId first, NodeId second, GenMap first_map,
                        GenMap second_map, Gen m) {
    if (node(first).kind == DKind::Fail) {
        ++compactions_;
        return make_map(second, std::move(second_map), m);
    }
    if (node(second).kind == DKind::Fail || !match_set(first).empty()) {
        ++compactions_;
        return make_map(first, std::move(first_map), m);
    }
    if (node(first).kind == DKind::Inf) {
        ++compactions_;
        return inf_node();
    }
    DNode n;
    n.kind = DKind::Alt;
    n.a = first;
    n.b = second;
    n.ma = std::move(first_map);
    n.mb = std::move(second_map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::make_seq(NodeId pred, NodeId follow, std::vector<Follower> fs,
                        NodeId empty_f, GenMap empty_map, Gen m) {
    DKind k = node(pred).kind;
    if (k == DKind::Empty) {
        ++compactions_;
        GenSet fb = back(follow);
        return make_map(follow, ngs_map(fb, static_cast<std::int64_t>(m) - 1), m);
    }
    if (k == DKind::Look) {
        ++compactions_;
        Gen i = node(pred).look;
        const Follower* hit = nullptr;
        for (const Follower& f : fs) {
            if (f.gen == i) {
                hit = &f;
                break;
            }
        }
        if (!hit) {
            throw std::logic_error(
                "sequence resolved to lookahead generation " + std::to_string(i) +
                " with no follower");
        }
        if (hit->last_match == 0) return make_map(hit->expr, hit->map, m);
        GenMap lmap{{0, 0}, {1, hit->last_match}};
        return make_alt(hit->expr, look_node(1), hit->map, std::move(lmap), m);
    }
    if (k == DKind::Fail) {
        ++compactions_;
        return make_map(empty_f, std::move(empty_map), m);
    }
    if (k == DKind::Inf) {
        ++compactions_;
        return inf_node();
    }
    DNode n;
    n.kind = DKind::Seq;
    n.a = pred;
    n.b = follow;
    n.fs = std::move(fs);
    n.empty_f = empty_f;
    n.me = std::move(empty_map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::raw_look(Gen g) {
    DNode n;
    n.kind = DKind::Look;
    n.look = g;
    return intern_node(std::move(n));
}

NodeId Engine::raw_not(NodeId child) {
    DNode n;
    n.kind = DKind::Not;
    n.a = child;
    return intern_node(std::move(n));
}

NodeId Engine::raw_map(NodeId child, GenMap map, Gen m) {
    DNode n;
    n.kind = DKind::Map;
    n.a = child;
    n.ma = std::move(map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::raw_alt(NodeId first, NodeId second, GenMap first_map,
                       GenMap second_map, Gen m) {
    DNode n;
    n.kind = DKind::Alt;
    n.a = first;
    n.b = second;
    n.ma = std::move(first_map);
    n.mb = std::move(second_map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::raw_seq(NodeId pred, NodeId follow, std::vector<Follower> fs,
                       NodeId empty_f, GenMap empty_map, Gen m) {
    DNode n;
    n.kind = DKind::Seq;
    n.a = pred;
    n.b = follow;
    n.fs = std::move(fs);
    n.empty_f = empty_f;
    n.me = std::move(empty_map);
    n.m = m;
    return intern_node(std::move(n));
}

NodeId Engine::compact(NodeId id) {
    DNode n = node(id);
    switch (n.kind) {
        case DKind::Look:
            return look_node(n.look);
        case DKind::Not:
            return make_not(n.a);
        case DKind::Map:
            return make_map(n.a, std::move(n.ma), n.m);
        case DKind::Alt:
            return make_alt(n.a, n.b, std::move(n.ma), std::move(n.mb), n.m);
        case DKind::Seq:
            return make_seq(n.a, n.b, std::move(n.fs), n.empty_f, std::move(n.me),
                            n.m);
        default:
            return id;
    }
}

// --- static elaboration -------------------------------------------------

NodeId Engine::inject() { return elaborate(g_.start); }

NodeId Engine::rule_dnode(std::size_t rule) {
    if (body_nodes_[rule] != kNoBody) return body_nodes_[rule];
    NodeId r = elaborate(g_.rule_bodies[rule]);
    if (body_nodes_[rule] == kNoBody) body_nodes_[rule] = r;
    return body_nodes_[rule];
}

NodeId Engine::elaborate(ExprId id) {
    auto hit = elab_memo_.find(id);
    if (hit != elab_memo_.end()) return hit->second;

    int saved_target = target_;
    target_ = kStatic;  // grammar forms persist across steps
    const Expr& e = g_.store[id];
    NodeId r = 0;
    switch (e.kind) {
        case ExprKind::CharLit:
            r = char_node(e.sym);
            break;
        case ExprKind::Empty:
            r = empty_node();
            break;
        case ExprKind::AnyChar:
            r = any_node();
            break;
        case ExprKind::Nonterminal: {
            DNode n;
            n.kind = DKind::Nonterm;
            n.name = e.name;
            r = intern_node(std::move(n));
            break;
        }
        case ExprKind::Not:
            r = make_not(elaborate(e.a));
            break;
        case ExprKind::Alt: {
            NodeId a = elaborate(e.a);
            NodeId b = elaborate(e.b);
            GenSet ba = back(a);
            GenSet bb = back(b);
            Gen m = std::max(ba.max(), bb.max());
            GenSet da = ba;
            da.insert(0);
            GenSet db = bb;
            db.insert(0);
            r = make_alt(a, b, GenMap::identity_over(da),
                         GenMap::identity_over(db), m);
            break;
        }
        case ExprKind::Seq:
            r = elaborate_seq(elaborate(e.a), elaborate(e.b));
            break;
        default:
            target_ = saved_target;
            throw std::logic_error("derivative engine requires a desugared grammar");
    }
    target_ = saved_target;
    auto [it, inserted] = elab_memo_.emplace(id, r);
    return it->second;
}

NodeId Engine::elaborate_seq(NodeId alpha, NodeId beta) {
    GenSet ab = back(alpha);
    GenSet am = match_set(alpha);
    GenSet bb = back(beta);
    Gen m = 0;
    std::vector<Follower> fs;
    for (Gen i : ab) {
        if (i < 1) continue;
        GenMap bi = ngs_map(bb, 0);
        Gen l = match_set(beta).contains(0) ? 1 : 0;
        m = std::max({m, bi.max_value(), l});
        fs.push_back({i, beta, std::move(bi), l});
    }
    NodeId ef;
    GenMap me;
    if (am.contains(0)) {
        ef = beta;
        me = ngs_map(bb, 0);
        m = std::max(m, me.max_value());
    } else {
        ef = fail_node();
        me = GenMap{{0, 0}};
    }
    return make_seq(alpha, beta, std::move(fs), ef, std::move(me), m);
}

// --- back / match -------------------------------------------------------

GenSet Engine::back(NodeId id) {
    auto it = back_cache_.find(id);
    if (it != back_cache_.end()) return it->second;
    const DNode& n0 = node(id);
    if (n0.kind == DKind::Nonterm) {
        Symbol s = n0.name;
        if (back_busy_.count(s)) return GenSet{0};  // assumption value
        back_busy_.insert(s);
        GenSet r = back(rule_dnode(g_.rule_of_sym[s]));
        back_busy_.erase(s);
        back_cache_.emplace(id, r);
        return r;
    }
    GenSet r = back_uncached(id);
    back_cache_.emplace(id, std::move(r));
    return back_cache_[id];
}

GenSet Engine::back_uncached(NodeId id) {
    DNode n = node(id);  // the stores may grow while children are queried
    switch (n.kind) {
        case DKind::Char:
        case DKind::AnyByte:
        case DKind::Empty:
        case DKind::Fail:
        case DKind::Inf:
            return GenSet{0};
        case DKind::Look:
            return GenSet{n.look};
        case DKind::Not:
            return GenSet{1};
        case DKind::Map:
            return compose(n.ma, back(n.a));
        case DKind::Alt: {
            GenSet r = compose(n.ma, back(n.a));
            r |= compose(n.mb, back(n.b));
            return r;
        }
        case DKind::Seq: {
            GenSet r;
            if (back(n.a).contains(0)) r.insert(0);
            for (const Follower& f : n.fs) {
                r |= compose(f.map, back(f.expr));
                if (f.last_match > 0) r.insert(f.last_match);
            }
            r |= compose(n.me, back(n.empty_f));
            return r;
        }
        default:
            throw std::logic_error("back: unreachable");
    }
}

GenSet Engine::match_set(NodeId id) {
    auto it = match_cache_.find(id);
    if (it != match_cache_.end()) return it->second;
    const DNode& n0 = node(id);
    if (n0.kind == DKind::Nonterm) {
        Symbol s = n0.name;
        if (match_busy_.count(s)) return GenSet{};  // assumption value
        match_busy_.insert(s);
        GenSet r = match_set(rule_dnode(g_.rule_of_sym[s]));
        match_busy_.erase(s);
        match_cache_.emplace(id, r);
        return r;
    }
    GenSet r = match_uncached(id);
    match_cache_.emplace(id, std::move(r));
    return match_cache_[id];
}

GenSet Engine::match_uncached(NodeId id) {
    DNode n = node(id);
    switch (n.kind) {
        case DKind::Char:
        case DKind::AnyByte:
        case DKind::Fail:
        case DKind::Inf:
        case DKind::Not:
            return GenSet{};
        case DKind::Empty:
            return GenSet{0};
        case DKind::Look:
            return GenSet{n.look};
        case DKind::Map:
            return compose(n.ma, match_set(n.a));
        case DKind::Alt: {
            GenSet r = compose(n.ma, match_set(n.a));
            r |= compose(n.mb, match_set(n.b));
            return r;
        }
        case DKind::Seq: {
            GenSet r;
            GenSet am = match_set(n.a);
            for (const Follower& f : n.fs) {
                if (!am.contains(f.gen)) continue;
                r |= compose(f.map, match_set(f.expr));
                if (f.last_match > 0) r.insert(f.last_match);
            }
            r |= compose(n.me, match_set(n.empty_f));
            return r;
        }
        default:
            throw std::logic_error("match: unreachable");
    }
}

GenMap Engine::ngs(NodeId id, Gen basis) { return ngs_map(back(id), basis); }

GenMap Engine::up_and_prune(const GenMap& p, const GenSet& back_old,
                            const GenSet& back_new, Gen m, bool& grew) {
    GenMap r = p;
    if (back_new.max() > back_old.max()) {
        r = up(p, back_old.max(), back_new.max(), m);
        grew = true;
    }
    GenSet keep = back_new;
    keep.insert(0);  // generation 0 can reappear through failure collapse
    r.prune(keep);
    return r;
}

// --- derivative -----------------------------------------------------------

NodeId Engine::derive(NodeId id, int symbol) {
    auto hit = deriv_memo_.find(id);
    if (hit != deriv_memo_.end()) return hit->second;
    ++derive_calls_;
    DNode n = node(id);  // stores grow during recursion
    NodeId res = 0;
    switch (n.kind) {
        case DKind::Char:
            res = symbol == n.sym ? empty_node() : fail_node();
            break;
        case DKind::AnyByte:
            res = symbol == kEndOfInput ? fail_node() : empty_node();
            break;
        case DKind::Empty:
            res = symbol == kEndOfInput ? empty_node() : fail_node();
            break;
        case DKind::Look:
        case DKind::Fail:
        case DKind::Inf:
            res = id;
            break;
        case DKind::Nonterm: {
            // assume a loop until the body's derivative completes
            deriv_memo_[id] = inf_node();
            NodeId body = rule_dnode(g_.rule_of_sym[n.name]);
            res = derive(body, symbol);
            deriv_memo_[id] = res;
            return res;
        }
        case DKind::Not:
            res = make_not(derive(n.a, symbol));
            break;
        case DKind::Map: {
            NodeId da = derive(n.a, symbol);
            bool grew = false;
            GenMap m2 = up_and_prune(n.ma, back(n.a), back(da), n.m, grew);
            res = make_map(da, std::move(m2), n.m + (grew ? 1 : 0));
            break;
        }
        case DKind::Alt: {
            NodeId da = derive(n.a, symbol);
            NodeId db = derive(n.b, symbol);
            bool grew = false;
            GenMap a2 = up_and_prune(n.ma, back(n.a), back(da), n.m, grew);
            GenMap b2 = up_and_prune(n.mb, back(n.b), back(db), n.m, grew);
            res = make_alt(da, db, std::move(a2), std::move(b2),
                           n.m + (grew ? 1 : 0));
            break;
        }
        case DKind::Seq:
            res = derive_seq(n, symbol);
            break;
    }
    deriv_memo_[id] = res;
    return res;
}

NodeId Engine::derive_seq(const DNode& n, int symbol) {
    const Gen m = n.m;
    bool grew = false;

    NodeId da = derive(n.a, symbol);
    GenSet back_a = back(n.a);
    GenSet back_da = back(da);
    bool alpha_grew = back_da.max() > back_a.max();
    Gen g_new = alpha_grew ? back_da.max() : 0;

    // The end-of-input pseudo-symbol is the one case where the follower must
    // advance together with the predecessor.
    DKind dak = node(da).kind;
    Gen dal = node(da).look;
    bool advance =
        symbol == kEndOfInput &&
        (dak == DKind::Empty ||
         (alpha_grew && dak == DKind::Look && dal == g_new));
    NodeId bdag = advance ? derive(n.b, symbol) : n.b;

    std::vector<Follower> fs2;
    fs2.reserve(n.fs.size() + 1);
    for (const Follower& f : n.fs) {
        if (!back_da.contains(f.gen)) continue;  // generation can no longer win
        NodeId dbi = derive(f.expr, symbol);
        bool fgrew = false;
        GenMap map2 = up_and_prune(f.map, back(f.expr), back(dbi), m, fgrew);
        grew |= fgrew;
        Gen l2 = f.last_match;
        if (match_set(dbi).contains(0)) {
            l2 = m + 1;
            grew = true;
        }
        fs2.push_back({f.gen, dbi, std::move(map2), l2});
    }
    if (alpha_grew) {
        bool ngrew = false;
        GenMap nmap = ngs_map(back(bdag), m, &ngrew);
        grew |= ngrew;
        Gen ln = 0;
        if (match_set(bdag).contains(0)) {
            ln = m + 1;
            grew = true;
        }
        fs2.push_back({g_new, bdag, std::move(nmap), ln});
    }

    NodeId ef2;
    GenMap me2;
    if (match_set(da).contains(0)) {
        // the predecessor matches here: restart the nullability backtrack
        ef2 = bdag;
        bool egrew = false;
        me2 = ngs_map(back(bdag), m, &egrew);
        grew |= egrew;
    } else {
        ef2 = derive(n.empty_f, symbol);
        bool egrew = false;
        me2 = up_and_prune(n.me, back(n.empty_f), back(ef2), m, egrew);
        grew |= egrew;
    }

    return make_seq(da, bdag, std::move(fs2), ef2, std::move(me2),
                    m + (grew ? 1 : 0));
}

// --- stepping -------------------------------------------------------------

NodeId Engine::step(NodeId root, int symbol) {
    int write = live_ == 1 ? 2 : 1;
    if (tag_of(root) == write) {
        throw std::logic_error("step applied to a reclaimed root");
    }
    stores_[write].clear();
    deriv_memo_.clear();
    back_cache_.clear();
    match_cache_.clear();
    compactions_ = 0;
    derive_calls_ = 0;
    target_ = write;
    NodeId r = derive(root, symbol);
    target_ = kStatic;
    live_ = write;
    return r;
}

ParseResult Engine::parse(std::span<const Byte> input, bool collect_metrics) {
    stores_[1].clear();
    stores_[2].clear();
    live_ = 1;
    deriv_memo_.clear();
    back_cache_.clear();
    match_cache_.clear();

    NodeId root = inject();
    ParseResult res;
    std::size_t pos = 0;
    for (;;) {
        if (!match_set(root).empty()) {
            res.matched = true;
            break;
        }
        DKind k = node(root).kind;
        if (k == DKind::Fail || k == DKind::Inf) break;
        if (pos > input.size()) break;  // sentinel consumed, nothing matched

        int c = pos < input.size() ? static_cast<int>(input[pos]) : kEndOfInput;
        StepMetrics sm;
        std::chrono::steady_clock::time_point t0;
        if (collect_metrics) {
            sm.position = pos;
            sm.symbol = c;
            sm.nodes_before = reachable_count(root);
            t0 = std::chrono::steady_clock::now();
        }
        root = step(root, c);
        ++res.steps;
        if (collect_metrics) {
            sm.elapsed_ns = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count());
            sm.nodes_after = reachable_count(root);
            sm.unique_subexpressions = sm.nodes_after;
            sm.max_generation = max_generation(root);
            sm.live_generations = back(root).size();
            sm.compactions_fired = compactions_;
            res.metrics.push_back(std::move(sm));
        }
        ++pos;
    }
    return res;
}

// --- traversal ------------------------------------------------------------

void Engine::visit_reachable(
    NodeId root, const std::function<void(NodeId, const DNode&)>& fn) const {
    std::unordered_set<NodeId> seen;
    std::vector<NodeId> work{root};
    while (!work.empty()) {
        NodeId id = work.back();
        work.pop_back();
        if (!seen.insert(id).second) continue;
        const DNode& n = node(id);
        fn(id, n);
        switch (n.kind) {
            case DKind::Not:
            case DKind::Map:
                work.push_back(n.a);
                break;
            case DKind::Alt:
                work.push_back(n.a);
                work.push_back(n.b);
                break;
            case DKind::Seq:
                work.push_back(n.a);
                work.push_back(n.b);
                work.push_back(n.empty_f);
                for (const Follower& f : n.fs) work.push_back(f.expr);
                break;
            default:
                break;
        }
    }
}

std::size_t Engine::reachable_count(NodeId root) const {
    std::size_t count = 0;
    visit_reachable(root, [&](NodeId, const DNode&) { ++count; });
    return count;
}

Gen Engine::max_generation(NodeId root) const {
    Gen b = 0;
    visit_reachable(root, [&](NodeId, const DNode& n) {
        switch (n.kind) {
            case DKind::Look:
                b = std::max(b, n.look);
                break;
            case DKind::Map:
            case DKind::Alt:
            case DKind::Seq:
                b = std::max(b, n.m);
                break;
            default:
                break;
        }
    });
    return b;
}

std::size_t Engine::rule_body_size_sum() {
    std::size_t sum = 0;
    for (std::size_t r = 0; r < g_.rule_count(); ++r) {
        sum += reachable_count(rule_dnode(r));
    }
    return sum;
}

}  // namespace peg::derivs
