#pragma once

// Randomized enlargement of a scenario tree.  Each base node gets a finite
// grid of multipliers theta in [1/c, c]^{d-1}; the fictitious price at
// (node, theta) is X = projection of S*theta onto the dual slice.  Grids are
// vertex-complete by construction: every slice vertex arises as some X, so
// quantifying over the grid decides the same cone inequalities as the
// continuum.

#include <utility>
#include <vector>

#include "conehedge/cone.hpp"
#include "conehedge/errors.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

struct ThetaPoint {
    Vec theta;  // size d-1
    Vec X;      // size d, last coordinate 1
    bool interior = false;  // S*theta lands in int K^*
};

struct EnlargedTree {
    ScenarioTree tree;
    Rational c = 1;  // global spread factor defining Lambda = [1/c, c]^{d-1}
    size_t resolution = 3;
    std::vector<std::vector<ThetaPoint>> points;  // per base node id
    SupportMask reach;

    const std::vector<ThetaPoint>& at(size_t node) const { return points[node]; }
};

inline Rational implied_spread(const ScenarioTree& tree) {
    Rational c = 1;
    for (const auto& n : tree.nodes) {
        if (!n.cone.is_box) throw UnsupportedShape("theta grids need box-shaped dual slices");
        for (size_t i = 0; i + 1 < tree.d; ++i) {
            c = rational_max(c, n.cone.mid[i] / n.cone.lo[i]);
            c = rational_max(c, n.cone.hi[i] / n.cone.mid[i]);
        }
    }
    return c;
}

namespace enlarged_detail {

inline Vec axis_grid(const Rational& c, const Rational& lo_over_s, const Rational& hi_over_s,
                     size_t resolution) {
    Vec pts{Rational(1) / c, Rational(1), c, lo_over_s, hi_over_s};
    if (resolution > 3) {
        Rational span = c - Rational(1) / c;
        Rational step = span / Rational(static_cast<int>(resolution) - 2);
        for (size_t j = 1; j + 2 < resolution; ++j)
            pts.push_back(Rational(1) / c + Rational(static_cast<int>(j)) * step);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace enlarged_detail

inline EnlargedTree build_enlarged(const ScenarioTree& tree, size_t resolution = 3,
                                   bool require_interior = true) {
    if (resolution < 2) throw SpecParseError("theta resolution must be at least 2");
    EnlargedTree en;
    en.tree = tree;
    en.c = implied_spread(tree);
    en.resolution = resolution;
    en.reach = polar_mask(tree);
    en.points.resize(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        const SolvencyCone& K = n.cone;
        std::vector<Vec> axes;
        for (size_t i = 0; i + 1 < tree.d; ++i)
            axes.push_back(enlarged_detail::axis_grid(en.c, K.lo[i] / K.mid[i],
                                                      K.hi[i] / K.mid[i], resolution));
        std::vector<size_t> idx(axes.size(), 0);
        while (true) {
            ThetaPoint tp;
            Vec y(tree.d);
            tp.theta.resize(axes.size());
            for (size_t i = 0; i < axes.size(); ++i) {
                tp.theta[i] = axes[i][idx[i]];
                y[i] = K.mid[i] * tp.theta[i];
            }
            y[tree.d - 1] = 1;
            tp.X = project_to_slice(K, y);
            tp.interior = in_dual_interior(K, y);
            en.points[n.id].push_back(std::move(tp));
            size_t ax = 0;
            while (ax < axes.size() && ++idx[ax] == axes[ax].size()) {
                idx[ax] = 0;
                ++ax;
            }
            if (ax == axes.size()) break;
        }
        if (require_interior && en.reach[n.id]) {
            bool any = false;
            for (const auto& tp : en.points[n.id]) any = any || tp.interior;
            if (!any)
                throw EmptyInteriorGrid("node " + n.label +
                                        " admits no interior randomization");
        }
    }
    return en;
}

// Both sides of the cone-transfer equivalence: zeta in -K at every reachable
// base node versus <zeta, X> <= 0 at every reachable enlarged node.  With
// vertex-complete grids these are the same predicate; the grid is checked
// first and GridMissingVertices thrown if tampered with.
inline std::pair<bool, bool> check_cone_transfer(const EnlargedTree& en,
                                                const std::vector<Vec>& zeta) {
    const ScenarioTree& tree = en.tree;
    if (zeta.size() != tree.nodes.size())
        throw DimensionMismatch("check_cone_transfer: zeta size");
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        for (const auto& v : n.cone.V) {
            bool hit = false;
            for (const auto& tp : en.points[n.id]) hit = hit || tp.X == v;
            if (!hit)
                throw GridMissingVertices("slice vertex unreachable at node " + n.label);
        }
    }
    bool lhs = true, rhs = true;
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        if (!in_minus_cone(n.cone, zeta[n.id])) lhs = false;
        for (const auto& tp : en.points[n.id])
            if (dot(zeta[n.id], tp.X) > 0) rhs = false;
    }
    return {lhs, rhs};
}

}  // namespace conehedge
