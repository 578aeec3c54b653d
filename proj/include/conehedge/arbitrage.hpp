#pragma once

// No-arbitrage machinery.  Two notions are decided and cross-checked:
//
//  * check_na2: at every reachable interior node, each vertex of the node's
//    dual slice must be a convex combination of the reachable children's
//    slice vertices.  A Farkas vector of a failing LP converts directly into
//    a transfer zeta that is solvent tomorrow quasi-surely but not today.
//
//  * check_na_frictionless: in the randomized market, every grid value of
//    the fictitious price must be a mixture of next-period grid values.  All
//    LPs quantify over the full (closed) grids; with vertex-complete grids
//    the two verdicts coincide instance by instance, which is what the
//    cross-check asserts.
//
// find_scps searches for a consistent price system (Q, Z) charging every
// reachable node, then upgrades it to a strictly interior one when a
// margin-shrunk re-solve succeeds.

#include <optional>
#include <vector>

#include "conehedge/enlarged.hpp"
#include "conehedge/lp.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

struct Na2Report {
    bool holds = true;
    std::optional<size_t> failing_node;
    std::optional<Vec> witness;  // in every child cone q.s., outside the node's cone
};

inline Na2Report check_na2(const ScenarioTree& tree) {
    SupportMask reach = polar_mask(tree);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id] || tree.is_terminal(n.id)) continue;
        std::vector<const SolvencyCone*> child_cones;
        std::vector<const Vec*> columns;
        for (size_t cid : n.children) {
            if (!reach[cid]) continue;
            child_cones.push_back(&tree.node(cid).cone);
            for (const auto& u : tree.node(cid).cone.V) columns.push_back(&u);
        }
        for (const auto& v : n.cone.V) {
            LpProblem p;
            for (size_t k = 0; k < columns.size(); ++k) p.new_var(Rational(0));
            for (size_t i = 0; i < tree.d; ++i) {
                Vec row;
                for (const Vec* u : columns) row.push_back((*u)[i]);
                p.add_row(std::move(row), Rel::EQ, v[i]);
            }
            auto res = lp_solve(p);
            if (res.status == LpStatus::Optimal) continue;
            Na2Report rep;
            rep.holds = false;
            rep.failing_node = n.id;
            Vec zeta(tree.d);
            for (size_t i = 0; i < tree.d; ++i) zeta[i] = -res.y[i];
            for (const SolvencyCone* K : child_cones)
                if (!in_cone(*K, zeta)) throw LpError("na2 witness fails child membership");
            if (in_cone(n.cone, zeta)) throw LpError("na2 witness not separating");
            rep.witness = std::move(zeta);
            return rep;
        }
    }
    return {};
}

struct PriceSystem {
    std::vector<Rational> mass;  // Q-mass per node id
    std::vector<Vec> Z;          // price per node id (empty when uncharged)
    std::vector<int> interior;   // 1 strict, 0 boundary, -1 uncharged
    bool strict_everywhere = false;
};

inline void verify_price_system(const ScenarioTree& tree, const PriceSystem& ps) {
    SupportMask reach = polar_mask(tree);
    if (ps.mass[tree.root()] != 1) throw LpError("price system: root mass");
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) {
            if (ps.mass[n.id] != 0) throw LpError("price system charges a polar node");
            continue;
        }
        if (ps.mass[n.id] == 0) throw LpError("price system misses a reachable node");
        if (!in_slice(n.cone, ps.Z[n.id])) throw LpError("price system leaves the slice");
        if (tree.is_terminal(n.id)) continue;
        Rational child_mass = 0;
        Vec flow(tree.d, Rational(0));
        for (size_t cid : n.children) {
            if (!reach[cid]) continue;
            child_mass += ps.mass[cid];
            for (size_t i = 0; i < tree.d; ++i)
                flow[i] += ps.mass[cid] * ps.Z[cid][i];
        }
        if (child_mass != ps.mass[n.id]) throw LpError("price system mass leak");
        for (size_t i = 0; i < tree.d; ++i)
            if (flow[i] != ps.mass[n.id] * ps.Z[n.id][i])
                throw LpError("price system martingale violation");
    }
}

namespace arb_detail {

// One family of decision variables per reachable node: nonnegative weights
// on its slice vertices.  Returns the max-min terminal mass LP outcome.
struct ScpsLp {
    std::vector<size_t> var_base;  // per node id, SIZE_MAX if polar
    std::vector<Mat> verts;        // vertex list used per node
    size_t tau = SIZE_MAX;
    LpProblem p;
};

inline ScpsLp build_scps_lp(const ScenarioTree& tree, const SupportMask& reach,
                            const std::vector<Mat>& verts) {
    ScpsLp out;
    out.verts = verts;
    out.var_base.assign(tree.nodes.size(), SIZE_MAX);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        out.var_base[n.id] = out.p.num_vars();
        for (size_t k = 0; k < verts[n.id].size(); ++k) out.p.new_var(Rational(0));
    }
    out.tau = out.p.new_var(Rational(1));
    out.p.maximize = true;

    {
        Vec row(out.p.num_vars(), Rational(0));
        for (size_t k = 0; k < verts[tree.root()].size(); ++k)
            row[out.var_base[tree.root()] + k] = 1;
        out.p.add_row(std::move(row), Rel::EQ, Rational(1));
    }
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        if (tree.is_terminal(n.id)) {
            Vec row(out.p.num_vars(), Rational(0));
            for (size_t k = 0; k < verts[n.id].size(); ++k) row[out.var_base[n.id] + k] = 1;
            row[out.tau] = -1;
            out.p.add_row(std::move(row), Rel::GE, Rational(0));
            continue;
        }
        for (size_t i = 0; i < tree.d; ++i) {
            Vec row(out.p.num_vars(), Rational(0));
            for (size_t k = 0; k < verts[n.id].size(); ++k)
                row[out.var_base[n.id] + k] = verts[n.id][k][i];
            for (size_t cid : n.children) {
                if (!reach[cid]) continue;
                for (size_t k = 0; k < verts[cid].size(); ++k)
                    row[out.var_base[cid] + k] = -verts[cid][k][i];
            }
            out.p.add_row(std::move(row), Rel::EQ, Rational(0));
        }
    }
    return out;
}

inline std::optional<PriceSystem> extract_system(const ScenarioTree& tree,
                                                 const SupportMask& reach, const ScpsLp& lp,
                                                 const LpResult& res) {
    if (res.status != LpStatus::Optimal || res.objective <= 0) return std::nullopt;
    PriceSystem ps;
    ps.mass.assign(tree.nodes.size(), Rational(0));
    ps.Z.assign(tree.nodes.size(), Vec{});
    ps.interior.assign(tree.nodes.size(), -1);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        Vec Y(tree.d, Rational(0));
        for (size_t k = 0; k < lp.verts[n.id].size(); ++k) {
            const Rational& w = res.x[lp.var_base[n.id] + k];
            for (size_t i = 0; i < tree.d; ++i) Y[i] += w * lp.verts[n.id][k][i];
        }
        ps.mass[n.id] = Y[tree.d - 1];
        if (ps.mass[n.id] == 0) return std::nullopt;  // tau > 0 must preclude this
        Vec Z(tree.d);
        for (size_t i = 0; i < tree.d; ++i) Z[i] = Y[i] / ps.mass[n.id];
        ps.Z[n.id] = std::move(Z);
    }
    return ps;
}

}  // namespace arb_detail

inline std::optional<PriceSystem> find_scps(const ScenarioTree& tree) {
    SupportMask reach = polar_mask(tree);
    std::vector<Mat> closed;
    for (const auto& n : tree.nodes) closed.push_back(n.cone.V);

    auto lp = arb_detail::build_scps_lp(tree, reach, closed);
    auto res = lp_solve(lp.p);
    auto ps = arb_detail::extract_system(tree, reach, lp, res);
    if (!ps) return std::nullopt;

    // strict upgrade: shrink every box by a uniform margin and re-solve
    std::optional<Rational> min_width;
    bool any_degenerate = false;
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        for (size_t i = 0; i + 1 < tree.d; ++i) {
            Rational w = n.cone.hi[i] - n.cone.lo[i];
            if (w == 0)
                any_degenerate = true;
            else
                min_width = min_width ? rational_min(*min_width, w) : w;
        }
    }
    if (!any_degenerate && min_width) {
        Rational eps = *min_width / 1000;
        std::vector<Mat> shrunk(tree.nodes.size());
        for (const auto& n : tree.nodes) {
            if (!reach[n.id]) continue;
            Vec lo = n.cone.lo, hi = n.cone.hi;
            for (size_t i = 0; i + 1 < tree.d; ++i) {
                lo[i] += eps;
                hi[i] -= eps;
            }
            for (size_t mask = 0; mask < (size_t(1) << (tree.d - 1)); ++mask) {
                Vec v(tree.d);
                for (size_t i = 0; i + 1 < tree.d; ++i)
                    v[i] = (mask >> i & 1) ? hi[i] : lo[i];
                v[tree.d - 1] = 1;
                shrunk[n.id].push_back(std::move(v));
            }
        }
        auto slp = arb_detail::build_scps_lp(tree, reach, shrunk);
        auto sres = lp_solve(slp.p);
        auto sps = arb_detail::extract_system(tree, reach, slp, sres);
        if (sps) {
            sps->strict_everywhere = true;
            for (const auto& n : tree.nodes)
                if (reach[n.id]) sps->interior[n.id] = 1;
            verify_price_system(tree, *sps);
            for (const auto& n : tree.nodes)
                if (reach[n.id] && !in_slice_interior(n.cone, sps->Z[n.id]))
                    throw LpError("strict price system not interior");
            return sps;
        }
    }

    ps->strict_everywhere = true;
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        ps->interior[n.id] = in_slice_interior(n.cone, ps->Z[n.id]) ? 1 : 0;
        if (ps->interior[n.id] == 0) ps->strict_everywhere = false;
    }
    verify_price_system(tree, *ps);
    return ps;
}

struct EnlargedNaReport {
    bool holds = false;
    // certificate when holds: per node, per grid index, the measure's mass
    // and the transition weights to (child index, child grid index)
    std::vector<std::vector<Rational>> mass;
    std::vector<std::vector<std::vector<std::vector<Rational>>>> kernel;
    // witness when it fails: a one-step position with a sure gain
    size_t failing_node = SIZE_MAX;
    size_t failing_theta = SIZE_MAX;
    Vec strategy;
};

inline void verify_enlarged_certificate(const EnlargedTree& en, const EnlargedNaReport& rep) {
    const ScenarioTree& tree = en.tree;
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        for (size_t j = 0; j < en.at(n.id).size(); ++j) {
            if (rep.mass[n.id][j] <= 0) throw LpError("certificate misses an enlarged node");
            if (tree.is_terminal(n.id)) continue;
            const auto& ker = rep.kernel[n.id][j];
            Rational total = 0;
            Vec mean(tree.d, Rational(0));
            for (size_t c = 0; c < n.children.size(); ++c) {
                size_t cid = n.children[c];
                if (!en.reach[cid]) {
                    for (const auto& w : ker[c])
                        if (w != 0) throw LpError("certificate charges a polar branch");
                    continue;
                }
                for (size_t jc = 0; jc < en.at(cid).size(); ++jc) {
                    const Rational& w = ker[c][jc];
                    if (w < 0) throw LpError("certificate kernel negative");
                    total += w;
                    for (size_t i = 0; i < tree.d; ++i)
                        mean[i] += w * en.at(cid)[jc].X[i];
                }
            }
            if (total != 1) throw LpError("certificate kernel mass");
            if (mean != en.at(n.id)[j].X) throw LpError("certificate not a martingale");
        }
    }
    // marginal consistency
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id] || tree.is_terminal(n.id)) continue;
        for (size_t c = 0; c < n.children.size(); ++c) {
            size_t cid = n.children[c];
            if (!en.reach[cid]) continue;
            for (size_t jc = 0; jc < en.at(cid).size(); ++jc) {
                Rational m = 0;
                for (size_t j = 0; j < en.at(n.id).size(); ++j)
                    m += rep.mass[n.id][j] * rep.kernel[n.id][j][c][jc];
                if (m != rep.mass[cid][jc]) throw LpError("certificate marginal mismatch");
            }
        }
    }
}

// Verdict: every grid value of the fictitious price must be a mixture of the
// reachable children's grid values.  When it holds and a certificate is
// requested, a martingale measure charging every reachable grid point is
// assembled from small LPs: the feasibility kernels themselves, plus one
// max-mass kernel per child grid point anchored at theta = 1 (whose price sits
// in the interior of the node's box, so every child grid point is reachable
// from it with positive weight).  Averaging kernels keeps the mean fixed.
inline EnlargedNaReport check_na_frictionless(const EnlargedTree& en,
                                              bool want_certificate = true) {
    const ScenarioTree& tree = en.tree;
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        bool any_interior = false;
        for (const auto& tp : en.at(n.id)) any_interior = any_interior || tp.interior;
        if (!any_interior)
            throw EmptyInteriorGrid("node " + n.label + " admits no interior randomization");
    }

    std::vector<std::vector<Vec>> feas(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id] || tree.is_terminal(n.id)) continue;
        std::vector<const Vec*> columns;
        for (size_t cid : n.children) {
            if (!en.reach[cid]) continue;
            for (const auto& tp : en.at(cid)) columns.push_back(&tp.X);
        }
        for (size_t j = 0; j < en.at(n.id).size(); ++j) {
            LpProblem p;
            for (size_t k = 0; k < columns.size(); ++k) p.new_var(Rational(0));
            for (size_t i = 0; i < tree.d; ++i) {
                Vec row;
                for (const Vec* X : columns) row.push_back((*X)[i]);
                p.add_row(std::move(row), Rel::EQ, en.at(n.id)[j].X[i]);
            }
            auto res = lp_solve(p);
            if (res.status == LpStatus::Optimal) {
                feas[n.id].push_back(std::move(res.x));
                continue;
            }
            EnlargedNaReport rep;
            rep.holds = false;
            rep.failing_node = n.id;
            rep.failing_theta = j;
            rep.strategy.assign(tree.d, Rational(0));
            for (size_t i = 0; i < tree.d; ++i) rep.strategy[i] = -res.y[i];
            const Vec& X0 = en.at(n.id)[j].X;
            for (size_t cid : n.children) {
                if (!en.reach[cid]) continue;
                for (const auto& tp : en.at(cid))
                    if (dot(rep.strategy, tp.X) - dot(rep.strategy, X0) <= 0)
                        throw LpError("arbitrage strategy lacks a sure gain");
            }
            return rep;
        }
    }

    EnlargedNaReport rep;
    rep.holds = true;
    if (!want_certificate) return rep;

    rep.mass.assign(tree.nodes.size(), {});
    rep.kernel.assign(tree.nodes.size(), {});
    {
        size_t g = en.at(tree.root()).size();
        rep.mass[tree.root()].assign(g, Rational(1, static_cast<int>(g)));
    }
    for (size_t t = 0; t < tree.T; ++t) {
        for (size_t id : tree.by_time[t]) {
            if (!en.reach[id]) continue;
            const TreeNode& n = tree.node(id);
            size_t grid = en.at(id).size();
            size_t fanout = 0;
            for (size_t cid : n.children)
                if (en.reach[cid]) fanout += en.at(cid).size();

            size_t anchor = SIZE_MAX;
            for (size_t j = 0; j < grid; ++j) {
                bool ones = true;
                for (const auto& th : en.at(id)[j].theta) ones = ones && th == 1;
                if (ones) anchor = j;
            }
            if (anchor == SIZE_MAX) throw LpError("grid lost its unrandomized point");

            Vec blended = feas[id][anchor];
            for (size_t tgt = 0; tgt < fanout; ++tgt) {
                LpProblem p;
                for (size_t k = 0; k < fanout; ++k) p.new_var(Rational(0));
                p.maximize = true;
                p.c[tgt] = 1;
                for (size_t i = 0; i < tree.d; ++i) {
                    Vec row(fanout, Rational(0));
                    size_t k = 0;
                    for (size_t cid : n.children) {
                        if (!en.reach[cid]) continue;
                        for (const auto& tp : en.at(cid)) row[k++] = tp.X[i];
                    }
                    p.add_row(std::move(row), Rel::EQ, en.at(id)[anchor].X[i]);
                }
                auto res = lp_solve(p);
                if (res.status != LpStatus::Optimal || res.objective <= 0)
                    throw LpError("full-support certificate unattainable despite feasibility");
                for (size_t k = 0; k < fanout; ++k) blended[k] += res.x[k];
            }
            for (auto& w : blended) w /= Rational(static_cast<int>(fanout) + 1);

            rep.kernel[id].resize(grid);
            for (size_t j = 0; j < grid; ++j) {
                const Vec& flat = j == anchor ? blended : feas[id][j];
                auto& ker = rep.kernel[id][j];
                ker.assign(n.children.size(), {});
                size_t k = 0;
                for (size_t c = 0; c < n.children.size(); ++c) {
                    size_t cid = n.children[c];
                    if (!en.reach[cid]) continue;
                    ker[c].assign(en.at(cid).size(), Rational(0));
                    for (size_t jc = 0; jc < en.at(cid).size(); ++jc) ker[c][jc] = flat[k++];
                }
            }
            for (size_t c = 0; c < n.children.size(); ++c) {
                size_t cid = n.children[c];
                if (!en.reach[cid]) continue;
                if (rep.mass[cid].empty()) rep.mass[cid].assign(en.at(cid).size(), Rational(0));
                for (size_t j = 0; j < grid; ++j)
                    for (size_t jc = 0; jc < en.at(cid).size(); ++jc)
                        rep.mass[cid][jc] += rep.mass[id][j] * rep.kernel[id][j][c][jc];
            }
        }
    }
    verify_enlarged_certificate(en, rep);
    return rep;
}

inline bool cross_check_equivalence(const ScenarioTree& tree, const EnlargedTree& en) {
    return check_na2(tree).holds == check_na_frictionless(en, false).holds;
}

}  // namespace conehedge
