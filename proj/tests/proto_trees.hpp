#pragma once

// Shared random instance generator for tests.  Nested instances keep the
// first child's box equal to the parent box, so the vertex-hull inclusion
// holds at every node; broken instances scale one node's whole child
// generation far upward, violating it exactly there.

#include <random>
#include <vector>

#include "conehedge/claim.hpp"
#include "conehedge/tree.hpp"

namespace proto {

using conehedge::BidAskSpec;
using conehedge::Mat;
using conehedge::Rational;
using conehedge::ScenarioTree;
using conehedge::TreeBuilder;
using conehedge::Vec;

struct Proto {
    std::vector<Vec> mid;  // risky mids per node
    std::vector<size_t> parent;
    std::vector<std::vector<size_t>> kids;
    size_t broken_at = SIZE_MAX;
};

inline Proto make_proto(std::mt19937& rng, size_t d, bool breakit, size_t max_T = 3,
                        size_t max_fan = 3) {
    std::uniform_int_distribution<size_t> horizon(1, max_T);
    std::uniform_int_distribution<size_t> fan(1, max_fan);
    std::uniform_int_distribution<int> factor(0, 2);
    const Rational fs[3] = {Rational(3, 4), Rational(1), Rational(3, 2)};

    Proto pr;
    size_t T = horizon(rng);
    pr.mid.push_back(Vec(d - 1, Rational(1)));
    pr.parent.push_back(SIZE_MAX);
    pr.kids.emplace_back();
    std::vector<size_t> level{0};
    for (size_t t = 0; t < T; ++t) {
        std::vector<size_t> next;
        for (size_t p : level) {
            size_t nc = fan(rng);
            for (size_t k = 0; k < nc; ++k) {
                Vec m = pr.mid[p];
                if (k > 0)
                    for (auto& x : m) x *= fs[factor(rng)];
                size_t id = pr.mid.size();
                pr.mid.push_back(std::move(m));
                pr.parent.push_back(p);
                pr.kids.emplace_back();
                pr.kids[p].push_back(id);
                next.push_back(id);
            }
        }
        level = next;
    }
    if (breakit) {
        std::vector<size_t> inner;
        for (size_t n = 0; n < pr.mid.size(); ++n)
            if (!pr.kids[n].empty()) inner.push_back(n);
        size_t bad = inner[std::uniform_int_distribution<size_t>(0, inner.size() - 1)(rng)];
        pr.broken_at = bad;
        Rational jump(32);
        std::vector<size_t> stack = pr.kids[bad];
        while (!stack.empty()) {
            size_t n = stack.back();
            stack.pop_back();
            for (auto& x : pr.mid[n]) x *= jump;
            for (size_t c : pr.kids[n]) stack.push_back(c);
        }
    }
    return pr;
}

inline ScenarioTree proto_tree(const Proto& pr, const Rational& c, bool two_kernels = false) {
    TreeBuilder b;
    b.add_root(build_cone(BidAskSpec::uniform(pr.mid[0], c)));
    for (size_t n = 1; n < pr.mid.size(); ++n)
        b.add_child(pr.parent[n], build_cone(BidAskSpec::uniform(pr.mid[n], c)));
    for (size_t n = 0; n < pr.mid.size(); ++n) {
        if (pr.kids[n].empty()) continue;
        size_t nc = pr.kids[n].size();
        Mat kernels{Vec(nc, Rational(1, static_cast<int>(nc)))};
        if (two_kernels && nc > 1) {
            Vec k2(nc, Rational(0));
            k2[0] = 1;
            kernels.push_back(std::move(k2));
        }
        b.set_kernels(n, kernels);
    }
    return b.finish();
}

inline ScenarioTree with_mixture_kernels(const Proto& pr, const Rational& c) {
    TreeBuilder b;
    b.add_root(build_cone(BidAskSpec::uniform(pr.mid[0], c)));
    for (size_t n = 1; n < pr.mid.size(); ++n)
        b.add_child(pr.parent[n], build_cone(BidAskSpec::uniform(pr.mid[n], c)));
    for (size_t n = 0; n < pr.mid.size(); ++n) {
        if (pr.kids[n].empty()) continue;
        size_t nc = pr.kids[n].size();
        Vec k1(nc, Rational(1, static_cast<int>(nc)));
        Vec k2(nc, Rational(0));
        k2[0] = 1;
        Vec mix(nc);
        for (size_t i = 0; i < nc; ++i) mix[i] = (k1[i] + k2[i]) / 2;
        b.set_kernels(n, {k1, k2, mix});
    }
    return b.finish();
}

// integer-lattice payoffs keep LP coefficients small
inline conehedge::Claim random_claim(std::mt19937& rng, const ScenarioTree& tree) {
    std::uniform_int_distribution<int> coef(-3, 3);
    conehedge::Claim claim;
    claim.xi.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes) {
        if (!tree.is_terminal(n.id)) continue;
        Vec x(tree.d);
        for (size_t i = 0; i < tree.d; ++i) x[i] = coef(rng);
        claim.xi[n.id] = std::move(x);
    }
    return claim;
}

}  // namespace proto
