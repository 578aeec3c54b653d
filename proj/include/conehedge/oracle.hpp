#pragma once

// Brute-force verifiers, deliberately independent of the LP engine.  The
// one-period price oracle reduces the two-asset problem to maximizing a
// concave piecewise-linear function built from an exact upper convex hull;
// the NA oracle reduces to interval inclusion.

#include <algorithm>
#include <optional>
#include <vector>

#include "conehedge/claim.hpp"
#include "conehedge/errors.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

namespace oracle_detail {

struct HullPoint {
    Rational x, y;
};

// Upper hull, left to right.  Collinear middle points are dropped.
inline std::vector<HullPoint> upper_hull(std::vector<HullPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
        return a.x < b.x || (a.x == b.x && a.y > b.y);
    });
    std::vector<HullPoint> keep;
    for (const auto& p : pts)  // one point per abscissa: the highest
        if (keep.empty() || keep.back().x != p.x) keep.push_back(p);
    std::vector<HullPoint> h;
    for (const auto& p : keep) {
        while (h.size() >= 2) {
            const HullPoint& a = h[h.size() - 2];
            const HullPoint& b = h[h.size() - 1];
            Rational cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            if (cross >= 0)
                h.pop_back();
            else
                break;
        }
        h.push_back(p);
    }
    return h;
}

inline Rational hull_value(const std::vector<HullPoint>& h, const Rational& x) {
    for (size_t i = 0; i + 1 < h.size(); ++i) {
        if (h[i].x <= x && x <= h[i + 1].x) {
            Rational t = (x - h[i].x) / (h[i + 1].x - h[i].x);
            return h[i].y + t * (h[i + 1].y - h[i].y);
        }
    }
    return h.front().y;  // single-point hull; callers clamp x into range first
}

}  // namespace oracle_detail

// Exact one-period price under proportional costs for two assets: the best
// expected payoff over all consistent price systems (Z_0, Z_1, Q) supported
// on reachable children, with Z ranging over the closed slices.  Returns
// nullopt when no consistent price system exists.
inline std::optional<Rational> brute_price_one_period(const ScenarioTree& tree,
                                                      const Claim& claim) {
    if (tree.T != 1 || tree.d != 2)
        throw UnsupportedShape("one-period oracle needs T = 1 and two assets");
    if (!claim.statics.empty())
        throw UnsupportedShape("one-period oracle prices claims without static instruments");
    validate_claim(tree, claim);
    const TreeNode& root = tree.node(tree.root());
    SupportMask reach = polar_mask(tree);

    std::vector<oracle_detail::HullPoint> pts;
    for (size_t cid : root.children) {
        if (!reach[cid]) continue;
        const SolvencyCone& K = tree.node(cid).cone;
        const Vec& xi = claim.xi[cid];
        for (const Rational& x : {K.lo[0], K.hi[0]})
            pts.push_back({x, xi[0] * x + xi[1]});
    }
    if (pts.empty()) return std::nullopt;
    auto hull = oracle_detail::upper_hull(std::move(pts));

    Rational A = rational_max(root.cone.lo[0], hull.front().x);
    Rational B = rational_min(root.cone.hi[0], hull.back().x);
    if (A > B) return std::nullopt;
    Rational best = oracle_detail::hull_value(hull, A);
    best = rational_max(best, oracle_detail::hull_value(hull, B));
    for (const auto& p : hull)
        if (A <= p.x && p.x <= B) best = rational_max(best, p.y);
    return best;
}

// NA2 for two assets: at every reachable interior node the parent slice
// interval must sit inside the hull of the reachable children's intervals.
inline bool brute_na2(const ScenarioTree& tree) {
    if (tree.d != 2) throw UnsupportedShape("interval oracle needs two assets");
    SupportMask reach = polar_mask(tree);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id] || tree.is_terminal(n.id)) continue;
        std::optional<Rational> lo, hi;
        for (size_t cid : n.children) {
            if (!reach[cid]) continue;
            const SolvencyCone& K = tree.node(cid).cone;
            lo = lo ? rational_min(*lo, K.lo[0]) : K.lo[0];
            hi = hi ? rational_max(*hi, K.hi[0]) : K.hi[0];
        }
        if (!lo) return false;
        if (n.cone.lo[0] < *lo || n.cone.hi[0] > *hi) return false;
    }
    return true;
}

}  // namespace conehedge
