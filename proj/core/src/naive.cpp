// Copyright 2026 the pegwb authors
// SPDX-License-Identifier: Apache-2.0

#include "peg/naive.hpp"

#include <stdexcept>
#include <vector>

namespace peg::naive {

namespace {

struct Frame {
    ExprId e;
    std::size_t entry;
    std::uint8_t state;  // 0 enter, 1 after first child, 2 after second
};

}  // namespace

Outcome match_naive(const Grammar& g, ExprId start, std::span<const Byte> input,
                    std::size_t pos, const Limits& limits, Stats& stats) {
    std::vector<Frame> stack;
    stack.push_back({start, pos, 0});
    Outcome r{};

    auto exhaust = [&](std::size_t entry) {
        stats.step_limit_hit = true;
        stack.clear();
        r = {RunStatus::Exhausted, entry};
    };

    while (!stack.empty()) {
        Frame& f = stack.back();
        if (r.status == RunStatus::Exhausted) {
            stack.pop_back();
            continue;
        }
        const Expr& x = g.store[f.e];
        switch (x.kind) {
            case ExprKind::CharLit:
                r = (f.entry < input.size() && input[f.entry] == x.sym)
                        ? Outcome{RunStatus::Match, f.entry + 1}
                        : Outcome{RunStatus::Fail, f.entry};
                stack.pop_back();
                break;

            case ExprKind::AnyChar:
                r = f.entry < input.size()
                        ? Outcome{RunStatus::Match, f.entry + 1}
                        : Outcome{RunStatus::Fail, f.entry};
                stack.pop_back();
                break;

            case ExprKind::Empty:
                r = {RunStatus::Match, f.entry};
                stack.pop_back();
                break;

            case ExprKind::Nonterminal:
                if (f.state == 0) {
                    if (++stats.nonterminal_invocations > limits.max_invocations) {
                        exhaust(f.entry);
                        break;
                    }
                    f.state = 1;
                    stack.push_back({g.body_of(x.name), f.entry, 0});
                } else {
                    stack.pop_back();  // result passes through
                }
                break;

            case ExprKind::Not:
                if (f.state == 0) {
                    f.state = 1;
                    stack.push_back({x.a, f.entry, 0});
                } else {
                    r = r.status == RunStatus::Match
                            ? Outcome{RunStatus::Fail, f.entry}
                            : Outcome{RunStatus::Match, f.entry};
                    stack.pop_back();
                }
                break;

            case ExprKind::Seq:
                if (f.state == 0) {
                    f.state = 1;
                    stack.push_back({x.a, f.entry, 0});
                } else if (f.state == 1) {
                    if (r.status == RunStatus::Match) {
                        f.state = 2;
                        stack.push_back({x.b, r.next, 0});
                    } else {
                        r = {RunStatus::Fail, f.entry};
                        stack.pop_back();
                    }
                } else {
                    if (r.status != RunStatus::Match) r = {RunStatus::Fail, f.entry};
                    stack.pop_back();
                }
                break;

            case ExprKind::Alt:
                if (f.state == 0) {
                    f.state = 1;
                    stack.push_back({x.a, f.entry, 0});
                } else if (f.state == 1) {
                    if (r.status == RunStatus::Match) {
                        stack.pop_back();
                    } else {
                        f.state = 2;
                        stack.push_back({x.b, f.entry, 0});
                    }
                } else {
                    stack.pop_back();  // second alternative's result stands
                }
                break;

            default:
                throw std::logic_error("match_naive requires a desugared grammar");
        }
        if (stack.size() > stats.max_recursion_depth) {
            stats.max_recursion_depth = stack.size();
        }
        if (stack.size() > limits.max_depth) {
            exhaust(pos);
        }
    }
    return r;
}

Result recognize_naive(const Grammar& g, std::span<const Byte> input,
                       const Limits& limits) {
    Result res;
    Outcome o = match_naive(g, g.start, input, 0, limits, res.stats);
    res.status = o.status;
    res.consumed = o.status == RunStatus::Match ? o.next : 0;
    return res;
}

}  // namespace peg::naive
