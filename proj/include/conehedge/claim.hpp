#pragma once

// Contingent claims on a scenario tree: a terminal payoff transfer xi per
// node, plus optional statically traded instruments, each a terminal payoff
// zeta with a symmetric time-0 premium (buy at +cost, sell at -cost).

#include <vector>

#include "conehedge/errors.hpp"
#include "conehedge/tree.hpp"
#include "conehedge/vec.hpp"

namespace conehedge {

struct StaticInstrument {
    std::vector<Vec> zeta;  // indexed by node id; only terminal entries matter
    Rational cost = 0;
};

struct Claim {
    std::vector<Vec> xi;  // indexed by node id; only terminal entries matter
    std::vector<StaticInstrument> statics;
};

inline void validate_claim(const ScenarioTree& tree, const Claim& claim) {
    if (claim.xi.size() != tree.nodes.size())
        throw DimensionMismatch("claim payoff table does not match tree size");
    for (const auto& n : tree.nodes) {
        if (!tree.is_terminal(n.id)) continue;
        if (claim.xi[n.id].size() != tree.d)
            throw DimensionMismatch("claim payoff of wrong dimension at node " + n.label);
    }
    for (const auto& inst : claim.statics) {
        if (inst.zeta.size() != tree.nodes.size())
            throw DimensionMismatch("static instrument table does not match tree size");
        if (inst.cost < 0) throw SpecParseError("static instrument premium must be nonnegative");
        bool nonzero = false;
        for (const auto& n : tree.nodes) {
            if (!tree.is_terminal(n.id)) continue;
            if (inst.zeta[n.id].size() != tree.d)
                throw DimensionMismatch("static payoff of wrong dimension at node " + n.label);
            nonzero = nonzero || !vec_is_zero(inst.zeta[n.id]);
        }
        if (!nonzero) throw SpecParseError("static instrument with identically zero payoff");
    }
}

// xi plus r units of terminal cash at every terminal node.
inline Claim shift_cash(const ScenarioTree& tree, const Claim& claim, const Rational& r) {
    Claim out = claim;
    for (const auto& n : tree.nodes) {
        if (!tree.is_terminal(n.id)) continue;
        out.xi[n.id][tree.d - 1] += r;
    }
    return out;
}

}  // namespace conehedge
