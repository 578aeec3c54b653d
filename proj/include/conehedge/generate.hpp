#pragma once

// Deterministic random instance generator.  Markets come out as full-depth
// trees with per-node bid-ask intervals, one or more transition kernels, a
// terminal claim and optional static instruments.
//
// The na2 knob controls the no-arbitrage verdict of the output:
//   * yes: sample, test, and if needed repair by widening the first reachable
//     child's intervals until every parent box is covered by a child box.
//   * no:  repair first, then push every child box of one pseudo-randomly
//     chosen node strictly past its parent's box, so the checker fails there
//     and nowhere earlier.
//   * any: emit the raw sample untouched.
//
// Static instrument premia are chosen above the no-robustness threshold
// (both signed super-hedge prices of the payoff), so generated statics pass
// the robustness screen whenever the bare market is arbitrage-free.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conehedge/arbitrage.hpp"
#include "conehedge/claim.hpp"
#include "conehedge/superhedge.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

enum class Na2Mode { Yes, No, Any };

struct GenOptions {
    uint64_t seed = 0;
    size_t T = 2;
    size_t d = 2;
    size_t branching = 2;
    size_t kernels = 1;
    size_t statics = 0;
    Na2Mode na2 = Na2Mode::Yes;
};

struct GeneratedInstance {
    ScenarioTree tree;
    Claim claim;
    std::optional<size_t> planted_violation;
    std::string note;
};

// splitmix64; <random> distributions are not pinned down by the standard, and
// emitted files must be byte-identical for a given seed everywhere.
struct SplitMix64 {
    uint64_t s;
    explicit SplitMix64(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    size_t below(size_t n) { return static_cast<size_t>(next() % n); }
    long pick(long lo, long hi) { return lo + static_cast<long>(below(static_cast<size_t>(hi - lo + 1))); }
};

namespace gen_detail {

struct Shape {
    std::vector<size_t> parent;
    std::vector<std::vector<size_t>> kids;
    std::vector<Vec> mid, lo, hi;  // risky coordinates only
    std::vector<Mat> kernels;
};

inline Shape sample_shape(SplitMix64& rng, const GenOptions& opt) {
    Shape sh;
    size_t m = opt.d - 1;
    auto add_node = [&](size_t parent, const Vec& base_mid) {
        static const std::pair<int, int> drift[] = {{2, 3}, {3, 4}, {1, 1}, {5, 4}, {3, 2}};
        static const std::pair<int, int> spreads[] = {{5, 4}, {4, 3}, {3, 2}, {2, 1}};
        size_t id = sh.parent.size();
        sh.parent.push_back(parent);
        sh.kids.emplace_back();
        Vec mid(m), lo(m), hi(m);
        for (size_t i = 0; i < m; ++i) {
            Rational f = 1;
            if (parent != SIZE_MAX) {
                auto [n, dn] = drift[rng.below(5)];
                f = Rational(n, dn);
            }
            mid[i] = base_mid[i] * f;
            auto [cn, cd] = spreads[rng.below(4)];
            Rational c(cn, cd);
            lo[i] = mid[i] / c;
            hi[i] = mid[i] * c;
        }
        sh.mid.push_back(std::move(mid));
        sh.lo.push_back(std::move(lo));
        sh.hi.push_back(std::move(hi));
        sh.kernels.emplace_back();
        if (parent != SIZE_MAX) sh.kids[parent].push_back(id);
        return id;
    };

    Vec root_mid(m);
    for (size_t i = 0; i < m; ++i)
        root_mid[i] = Rational(rng.pick(1, 8), rng.pick(1, 8));
    std::vector<size_t> frontier{add_node(SIZE_MAX, root_mid)};
    for (size_t t = 0; t < opt.T; ++t) {
        std::vector<size_t> next;
        for (size_t id : frontier) {
            size_t fan = 1 + rng.below(opt.branching);
            for (size_t c = 0; c < fan; ++c) next.push_back(add_node(id, sh.mid[id]));
            size_t nk = 1 + rng.below(opt.kernels);
            bool keep_uniform = fan == 1 || rng.below(3) != 0;
            for (size_t k = 0; k < nk; ++k) {
                Vec w(fan, Rational(0));
                if (k == 0 && keep_uniform) {
                    for (auto& x : w) x = Rational(1, static_cast<long>(fan));
                } else {
                    long total = 0;
                    for (auto& x : w) {
                        long raw = rng.pick(0, 3);
                        x = raw;
                        total += raw;
                    }
                    if (total == 0) {
                        w[rng.below(fan)] = 1;
                        total = 1;
                    }
                    for (auto& x : w) x = x / total;
                }
                if (std::find(sh.kernels[id].begin(), sh.kernels[id].end(), w) ==
                    sh.kernels[id].end())
                    sh.kernels[id].push_back(std::move(w));
            }
        }
        frontier = std::move(next);
    }
    return sh;
}

inline ScenarioTree realize(const Shape& sh) {
    TreeBuilder b;
    for (size_t id = 0; id < sh.parent.size(); ++id) {
        Vec mid(sh.mid[id]);
        auto spec = BidAskSpec::with_intervals(std::move(mid), sh.lo[id], sh.hi[id]);
        if (id == 0)
            b.add_root(build_cone(spec));
        else
            b.add_child(sh.parent[id], build_cone(spec));
    }
    for (size_t id = 0; id < sh.parent.size(); ++id)
        if (!sh.kids[id].empty()) b.set_kernels(id, sh.kernels[id]);
    return b.finish();
}

// Widen the first reachable child of every internal node until its box covers
// the parent's box.  Parent vertices then sit inside that child's slice, which
// is the local no-arbitrage condition verbatim.
inline std::vector<size_t> cover_repair(Shape& sh, const SupportMask& reach) {
    std::vector<size_t> touched;
    for (size_t id = 0; id < sh.parent.size(); ++id) {
        if (!reach[id] || sh.kids[id].empty()) continue;
        size_t cover = SIZE_MAX;
        for (size_t c : sh.kids[id])
            if (reach[c] && cover == SIZE_MAX) cover = c;
        bool widened = false;
        for (size_t i = 0; i < sh.mid[id].size(); ++i) {
            if (sh.lo[cover][i] > sh.lo[id][i]) {
                sh.lo[cover][i] = sh.lo[id][i];
                widened = true;
            }
            if (sh.hi[cover][i] < sh.hi[id][i]) {
                sh.hi[cover][i] = sh.hi[id][i];
                widened = true;
            }
        }
        if (widened) touched.push_back(cover);
    }
    return touched;
}

inline Vec terminal_payoff(SplitMix64& rng, size_t d, long bound) {
    Vec xi(d);
    for (auto& x : xi) x = rng.pick(-bound, bound);
    return xi;
}

}  // namespace gen_detail

inline GeneratedInstance generate(const GenOptions& opt) {
    if (opt.T < 1 || opt.T > 4) throw SpecParseError("generator horizon must be in [1, 4]");
    if (opt.d < 2 || opt.d > 4) throw SpecParseError("generator asset count must be in [2, 4]");
    if (opt.branching < 1 || opt.branching > 4)
        throw SpecParseError("generator branching must be in [1, 4]");
    if (opt.kernels < 1 || opt.kernels > 4)
        throw SpecParseError("generator kernel count must be in [1, 4]");
    if (opt.statics > 2) throw SpecParseError("generator supports at most two static instruments");

    SplitMix64 rng(opt.seed);
    auto sh = gen_detail::sample_shape(rng, opt);
    GeneratedInstance out;
    out.tree = gen_detail::realize(sh);

    if (opt.na2 == Na2Mode::Yes) {
        if (!check_na2(out.tree).holds) {
            auto touched = gen_detail::cover_repair(sh, polar_mask(out.tree));
            out.tree = gen_detail::realize(sh);
            out.note = "na2 repair widened intervals at " + std::to_string(touched.size()) +
                       " node(s)";
            if (!check_na2(out.tree).holds)
                throw LpError("interval widening failed to restore no-arbitrage");
        }
    } else if (opt.na2 == Na2Mode::No) {
        SupportMask reach = polar_mask(out.tree);
        gen_detail::cover_repair(sh, reach);
        std::vector<size_t> internal;
        for (size_t id = 0; id < sh.parent.size(); ++id)
            if (reach[id] && !sh.kids[id].empty()) internal.push_back(id);
        size_t target = internal[rng.below(internal.size())];
        Rational far = 0;
        for (size_t c : sh.kids[target]) far = rational_max(far, sh.hi[target][0] / sh.lo[c][0]);
        Rational factor = 2 * far;
        for (size_t c : sh.kids[target]) {
            sh.mid[c][0] = sh.mid[c][0] * factor;
            sh.lo[c][0] = sh.lo[c][0] * factor;
            sh.hi[c][0] = sh.hi[c][0] * factor;
        }
        out.tree = gen_detail::realize(sh);
        out.planted_violation = target;
        out.note = "planted arbitrage at node " + out.tree.node(target).label +
                   ": children repriced past the parent interval on asset 1";
        auto rep = check_na2(out.tree);
        if (rep.holds || rep.failing_node != target)
            throw LpError("planted violation not where intended");
    }

    out.claim.xi.assign(out.tree.nodes.size(), Vec{});
    for (const auto& n : out.tree.nodes)
        if (out.tree.is_terminal(n.id))
            out.claim.xi[n.id] = gen_detail::terminal_payoff(rng, opt.d, 3);

    for (size_t k = 0; k < opt.statics; ++k) {
        StaticInstrument ins;
        ins.zeta.assign(out.tree.nodes.size(), Vec{});
        bool nonzero = false;
        for (const auto& n : out.tree.nodes) {
            if (!out.tree.is_terminal(n.id)) continue;
            ins.zeta[n.id] = gen_detail::terminal_payoff(rng, opt.d, 2);
            for (const auto& x : ins.zeta[n.id]) nonzero = nonzero || x != 0;
        }
        if (!nonzero) ins.zeta[out.tree.by_time[out.tree.T][0]][opt.d - 1] = 1;
        ins.cost = 1;
        Claim probe;
        probe.xi.assign(out.tree.nodes.size(), Vec{});
        Rational floor = 0;
        bool priced = true;
        for (int sign : {1, -1}) {
            for (const auto& n : out.tree.nodes) {
                if (!out.tree.is_terminal(n.id)) continue;
                probe.xi[n.id] = ins.zeta[n.id];
                for (auto& x : probe.xi[n.id]) x = sign * x;
            }
            auto res = price_primal(out.tree, probe);
            if (res.arbitrage) {
                priced = false;
                break;
            }
            floor = rational_max(floor, -res.price);
        }
        if (priced) ins.cost = floor + 1;
        out.claim.statics.push_back(std::move(ins));
    }
    if (opt.statics > 0 && opt.na2 == Na2Mode::Yes) {
        // Premia above both signed hedge prices of their own payoff can still
        // fail jointly (one instrument cheapens hedging the other's probe).
        // Every probe value grows when all premia grow, so bump until robust.
        Rational bump = 1;
        for (int round = 0; !robustness_check(out.tree, out.claim); ++round) {
            if (round >= 16) throw LpError("robust premia not reached by bumping");
            for (auto& ins : out.claim.statics) ins.cost = ins.cost + bump;
            bump = bump * 2;
        }
    }
    validate_claim(out.tree, out.claim);
    return out;
}

}  // namespace conehedge
