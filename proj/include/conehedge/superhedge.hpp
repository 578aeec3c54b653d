#pragma once

// Robust super-replication prices by four routes that must agree exactly:
//
//  * price_primal: cone program over (initial cash, static positions,
//    per-node transfers), admissibility and terminal solvency written
//    against slice vertices.
//  * price_dual: flow program over unnormalized vertex weights; it is the
//    LP dual of the primal, so equality is exact on every instance.
//  * price_enlarged: frictionless program over the randomized grid with
//    base-adapted holdings.  Constraints are affine in the grid prices with
//    theta-free coefficients, so a per-node worst-case variable m collapses
//    the exponential path constraints to one row per grid point.
//  * backward_induction: one-period dual LPs rolled backward, a hedge pulled
//    out forward by one-period primal LPs anchored at the worst grid point.
//
// All hedge output funnels through HedgeCertificate and is re-verified
// against the cone predicates before being returned.

#include <cstdint>
#include <optional>
#include <vector>

#include "conehedge/arbitrage.hpp"
#include "conehedge/claim.hpp"
#include "conehedge/enlarged.hpp"
#include "conehedge/lp.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

struct HedgeCertificate {
    Rational price = 0;
    Vec ell;                        // per static instrument
    std::vector<Vec> eta;           // per node id; empty when unreachable
    std::vector<Vec> residuals;     // per terminal node id
    std::vector<bool> residual_ok;  // same indexing
    bool valid = false;
};

// Recomputes residuals from (price, ell, eta) and checks admissibility plus
// terminal solvency.  Never trusts the stored residuals.
inline bool verify_hedge(const ScenarioTree& tree, const Claim& claim, HedgeCertificate& cert) {
    SupportMask reach = polar_mask(tree);
    cert.residuals.assign(tree.nodes.size(), Vec{});
    cert.residual_ok.assign(tree.nodes.size(), false);
    if (cert.ell.size() != claim.statics.size()) throw DimensionMismatch("hedge: ell size");
    bool ok = true;
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        if (cert.eta[n.id].size() != tree.d) throw DimensionMismatch("hedge: eta size");
        if (!in_minus_cone(n.cone, cert.eta[n.id])) ok = false;
        if (!tree.is_terminal(n.id)) continue;
        Vec r(tree.d, Rational(0));
        r[tree.d - 1] = cert.price;
        for (size_t i = 0; i < claim.statics.size(); ++i) {
            const Vec& z = claim.statics[i].zeta[n.id];
            for (size_t k = 0; k < tree.d; ++k) r[k] += cert.ell[i] * z[k];
            r[tree.d - 1] -= rational_abs(cert.ell[i]) * claim.statics[i].cost;
        }
        for (size_t a : tree.path_from_root(n.id))
            for (size_t k = 0; k < tree.d; ++k) r[k] += cert.eta[a][k];
        for (size_t k = 0; k < tree.d; ++k) r[k] -= claim.xi[n.id][k];
        cert.residual_ok[n.id] = in_cone(n.cone, r);
        if (!cert.residual_ok[n.id]) ok = false;
        cert.residuals[n.id] = std::move(r);
    }
    cert.valid = ok;
    return ok;
}

struct PrimalOutcome {
    bool arbitrage = false;  // primal unbounded: the market itself hands out cash
    Rational price = 0;
    HedgeCertificate cert;
};

inline PrimalOutcome price_primal(const ScenarioTree& tree, const Claim& claim) {
    validate_claim(tree, claim);
    SupportMask reach = polar_mask(tree);
    size_t e = claim.statics.size();

    // substituting y = y0 - u with y0 a known feasible cash level leaves an
    // all-slack starting basis, so phase one never pivots
    Rational y0 = 0;
    for (const auto& n : tree.nodes) {
        if (!reach[n.id] || !tree.is_terminal(n.id)) continue;
        for (const auto& v : n.cone.V) y0 = rational_max(y0, dot(claim.xi[n.id], v));
    }

    LpProblem p;
    size_t var_u = p.new_var(Rational(1), true);  // min y = y0 - u: maximize u
    p.maximize = true;
    std::vector<size_t> var_lp(e), var_lm(e);
    for (size_t i = 0; i < e; ++i) {
        var_lp[i] = p.new_var(Rational(0));
        var_lm[i] = p.new_var(Rational(0));
    }
    std::vector<size_t> var_eta(tree.nodes.size(), SIZE_MAX);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        var_eta[n.id] = p.num_vars();
        for (size_t k = 0; k < tree.d; ++k) p.new_var(Rational(0), true);
    }
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        for (const auto& v : n.cone.V) {
            Vec row(p.num_vars(), Rational(0));
            for (size_t k = 0; k < tree.d; ++k) row[var_eta[n.id] + k] = v[k];
            p.add_row(std::move(row), Rel::LE, Rational(0));
        }
        if (!tree.is_terminal(n.id)) continue;
        auto path = tree.path_from_root(n.id);
        for (const auto& v : n.cone.V) {
            Vec row(p.num_vars(), Rational(0));
            row[var_u] = -1;
            for (size_t i = 0; i < e; ++i) {
                Rational zv = dot(claim.statics[i].zeta[n.id], v);
                row[var_lp[i]] = zv - claim.statics[i].cost;
                row[var_lm[i]] = -zv - claim.statics[i].cost;
            }
            for (size_t a : path)
                for (size_t k = 0; k < tree.d; ++k) row[var_eta[a] + k] = v[k];
            p.add_row(std::move(row), Rel::GE, dot(claim.xi[n.id], v) - y0);
        }
    }

    auto res = lp_solve(p);
    PrimalOutcome out;
    if (res.status == LpStatus::Unbounded) {
        out.arbitrage = true;
        return out;
    }
    if (res.status != LpStatus::Optimal)
        throw LpError("super-replication program infeasible; cash should always hedge");
    out.price = y0 - res.x[var_u];
    out.cert.price = out.price;
    out.cert.ell.assign(e, Rational(0));
    for (size_t i = 0; i < e; ++i) out.cert.ell[i] = res.x[var_lp[i]] - res.x[var_lm[i]];
    out.cert.eta.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        Vec h(tree.d);
        for (size_t k = 0; k < tree.d; ++k) h[k] = res.x[var_eta[n.id] + k];
        out.cert.eta[n.id] = std::move(h);
    }
    if (!verify_hedge(tree, claim, out.cert)) throw LpError("optimal hedge failed verification");
    return out;
}

struct DualOutcome {
    bool no_price_system = false;  // dual infeasible: no consistent valuation
    Rational price = 0;
};

inline DualOutcome price_dual(const ScenarioTree& tree, const Claim& claim) {
    validate_claim(tree, claim);
    SupportMask reach = polar_mask(tree);
    size_t e = claim.statics.size();

    LpProblem p;
    p.maximize = true;
    std::vector<size_t> var_base(tree.nodes.size(), SIZE_MAX);
    for (const auto& n : tree.nodes) {
        if (!reach[n.id]) continue;
        var_base[n.id] = p.num_vars();
        bool terminal = tree.is_terminal(n.id);
        for (const auto& v : n.cone.V)
            p.new_var(terminal ? dot(claim.xi[n.id], v) : Rational(0));
    }
    {
        Vec row(p.num_vars(), Rational(0));
        const auto& root = tree.nodes[tree.root()];
        for (size_t k = 0; k < root.cone.V.size(); ++k) row[var_base[root.id] + k] = 1;
        p.add_row(std::move(row), Rel::EQ, Rational(1));
    }
    for (const auto& n : tree.nodes) {
        if (!reach[n.id] || tree.is_terminal(n.id)) continue;
        for (size_t i = 0; i < tree.d; ++i) {
            Vec row(p.num_vars(), Rational(0));
            for (size_t k = 0; k < n.cone.V.size(); ++k) row[var_base[n.id] + k] = n.cone.V[k][i];
            for (size_t cid : n.children) {
                if (!reach[cid]) continue;
                const auto& V = tree.node(cid).cone.V;
                for (size_t k = 0; k < V.size(); ++k) row[var_base[cid] + k] = -V[k][i];
            }
            p.add_row(std::move(row), Rel::EQ, Rational(0));
        }
    }
    for (size_t i = 0; i < e; ++i) {
        Vec row(p.num_vars(), Rational(0));
        for (const auto& n : tree.nodes) {
            if (!reach[n.id] || !tree.is_terminal(n.id)) continue;
            for (size_t k = 0; k < n.cone.V.size(); ++k)
                row[var_base[n.id] + k] = dot(claim.statics[i].zeta[n.id], n.cone.V[k]);
        }
        Vec row2 = row;
        p.add_row(std::move(row), Rel::LE, claim.statics[i].cost);
        p.add_row(std::move(row2), Rel::GE, -claim.statics[i].cost);
    }

    auto res = lp_solve(p);
    DualOutcome out;
    if (res.status == LpStatus::Infeasible) {
        out.no_price_system = true;
        return out;
    }
    if (res.status != LpStatus::Optimal)
        throw LpError("valuation program unbounded; mass normalization lost");
    out.price = res.objective;
    return out;
}

struct EnlargedOutcome {
    bool arbitrage = false;
    Rational price = 0;
    Vec ell;
    std::vector<Vec> H;  // holding chosen at each non-terminal node, last coord 0
};

inline EnlargedOutcome price_enlarged(const EnlargedTree& en, const Claim& claim) {
    const ScenarioTree& tree = en.tree;
    validate_claim(tree, claim);
    size_t e = claim.statics.size();

    LpProblem p;
    size_t var_y = p.new_var(Rational(1), true);
    std::vector<size_t> var_lp(e), var_lm(e);
    for (size_t i = 0; i < e; ++i) {
        var_lp[i] = p.new_var(Rational(0));
        var_lm[i] = p.new_var(Rational(0));
    }
    std::vector<size_t> var_H(tree.nodes.size(), SIZE_MAX);
    std::vector<size_t> var_m(tree.nodes.size(), SIZE_MAX);
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        if (!tree.is_terminal(n.id)) {
            var_H[n.id] = p.num_vars();
            for (size_t i = 0; i + 1 < tree.d; ++i) p.new_var(Rational(0), true);
        }
        var_m[n.id] = p.new_var(Rational(0), true);
    }

    // m_n <= a(n) . X(n, theta) for every grid theta, where a(n) collects the
    // holding change at n (and the claim at terminal nodes)
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) continue;
        bool terminal = tree.is_terminal(n.id);
        for (const auto& tp : en.at(n.id)) {
            Vec row(p.num_vars(), Rational(0));
            row[var_m[n.id]] = 1;
            if (n.parent != SIZE_MAX)
                for (size_t i = 0; i + 1 < tree.d; ++i)
                    row[var_H[n.parent] + i] -= tp.X[i];
            if (!terminal) {
                for (size_t i = 0; i + 1 < tree.d; ++i) row[var_H[n.id] + i] += tp.X[i];
            } else {
                for (size_t i = 0; i < e; ++i) {
                    Rational zx = dot(claim.statics[i].zeta[n.id], tp.X);
                    row[var_lp[i]] -= zx;
                    row[var_lm[i]] += zx;
                }
            }
            p.add_row(std::move(row), Rel::LE,
                      terminal ? -dot(claim.xi[n.id], tp.X) : Rational(0));
        }
    }
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id] || !tree.is_terminal(n.id)) continue;
        Vec row(p.num_vars(), Rational(0));
        row[var_y] = 1;
        for (size_t i = 0; i < e; ++i) {
            row[var_lp[i]] -= claim.statics[i].cost;
            row[var_lm[i]] -= claim.statics[i].cost;
        }
        for (size_t a : tree.path_from_root(n.id)) row[var_m[a]] = 1;
        p.add_row(std::move(row), Rel::GE, Rational(0));
    }

    auto res = lp_solve(p);
    EnlargedOutcome out;
    if (res.status == LpStatus::Unbounded) {
        out.arbitrage = true;
        return out;
    }
    if (res.status != LpStatus::Optimal)
        throw LpError("randomized super-replication program infeasible");
    out.price = res.x[var_y];
    out.ell.assign(e, Rational(0));
    for (size_t i = 0; i < e; ++i) out.ell[i] = res.x[var_lp[i]] - res.x[var_lm[i]];
    out.H.assign(tree.nodes.size(), Vec{});
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id] || tree.is_terminal(n.id)) continue;
        Vec h(tree.d, Rational(0));
        for (size_t i = 0; i + 1 < tree.d; ++i) h[i] = res.x[var_H[n.id] + i];
        out.H[n.id] = std::move(h);
    }
    return out;
}

// Base-market transfers realizing an enlarged hedge: the holding change in
// each risky asset, funded by the worst grid price, plus zero at the horizon.
inline std::vector<Vec> eta_from_H(const EnlargedTree& en, const std::vector<Vec>& H) {
    const ScenarioTree& tree = en.tree;
    std::vector<Vec> eta(tree.nodes.size());
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id]) {
            eta[n.id] = Vec{};
            continue;
        }
        eta[n.id] = Vec(tree.d, Rational(0));
        if (tree.is_terminal(n.id)) continue;
        for (size_t i = 0; i + 1 < tree.d; ++i) {
            eta[n.id][i] = H[n.id][i];
            if (n.parent != SIZE_MAX) eta[n.id][i] -= H[n.parent][i];
        }
        bool first = true;
        Rational worst = 0;
        for (const auto& tp : en.at(n.id)) {
            Rational cash = 0;
            for (size_t i = 0; i + 1 < tree.d; ++i) cash -= eta[n.id][i] * tp.X[i];
            if (first || cash < worst) worst = cash;
            first = false;
        }
        eta[n.id][tree.d - 1] = worst;
    }
    return eta;
}

struct SupportPoint {
    Vec x;  // risky coordinates, size d-1
    Rational val;
};

struct ValueFunction {
    std::vector<std::vector<Rational>> g;            // per node id, per grid index
    std::vector<std::vector<SupportPoint>> support;  // graph points whose hull is the value
    bool finite = true;                              // defensive; bounded payoffs keep g finite
};

struct DpOutcome {
    ValueFunction value;
    Rational price = 0;
    std::vector<Vec> H;
    HedgeCertificate cert;
};

// g'_t(n, h) = max over the slice of g - h . X, the worst start for holding h.
// The value function is concave and piecewise linear on the slice box and the
// support points cover all its vertices, so the max over them is the box max.
inline Rational g_prime(const EnlargedTree& en, const ValueFunction& vf, size_t node,
                        const Vec& h) {
    (void)en;
    const auto& pts = vf.support[node];
    Rational best = 0;
    bool first = true;
    for (const auto& sp : pts) {
        Rational v = sp.val - h[h.size() - 1];
        for (size_t i = 0; i + 1 < h.size(); ++i) v -= h[i] * sp.x[i];
        if (first || v > best) best = v;
        first = false;
    }
    return best;
}

namespace dp_detail {

struct HullEval {
    Rational val;
    Vec a;       // slope of an affine majorant over the risky coordinates
    Rational b;  // a . x + b >= value for every point fed in, equality at Z
};

// Value at Z of the concave hull of the (x, val) points in U: pick mixture
// weights pinning the mean at Z. The duals of the mean and mass rows form an
// affine majorant of the whole sample set that is tight at Z.
inline HullEval eval_hull(const std::vector<SupportPoint>& U, const Vec& Z,
                          const std::string& label) {
    LpProblem p;
    p.maximize = true;
    for (const auto& sp : U) p.new_var(sp.val);
    size_t m = Z.size();
    for (size_t i = 0; i < m; ++i) {
        Vec row;
        for (const auto& sp : U) row.push_back(sp.x[i]);
        p.add_row(std::move(row), Rel::EQ, Z[i]);
    }
    p.add_row(Vec(U.size(), Rational(1)), Rel::EQ, Rational(1));
    auto res = lp_solve(p);
    if (res.status == LpStatus::Infeasible)
        throw NAViolated("one-period program admits no pricing weights at node " + label);
    if (res.status != LpStatus::Optimal)
        throw LpError("one-period value unbounded with mass pinned");
    HullEval ev;
    ev.val = res.objective;
    ev.a.assign(m, Rational(0));
    for (size_t i = 0; i < m; ++i) ev.a[i] = res.y[i];
    ev.b = res.y[m];
    return ev;
}

// Collect the graph points of the hull value along the segment [P, Q]. A piece
// is affine exactly when the majorant from one end is tight at the other;
// otherwise the two majorants cross strictly inside and the split point is a
// fresh sample. Each probe pins down a new linear piece, so this terminates.
inline void sweep_segment(const std::vector<SupportPoint>& U, const Vec& P, const Vec& Q,
                          const std::string& label, std::vector<SupportPoint>& out) {
    HullEval eP = eval_hull(U, P, label);
    out.push_back({P, eP.val});
    if (P == Q) return;
    HullEval eQ = eval_hull(U, Q, label);
    out.push_back({Q, eQ.val});
    struct Piece {
        Vec Z0, Z1;
        HullEval e0, e1;
        size_t depth;
    };
    std::vector<Piece> stack{{P, Q, eP, eQ, 0}};
    while (!stack.empty()) {
        Piece f = std::move(stack.back());
        stack.pop_back();
        Vec dir(f.Z1.size());
        for (size_t i = 0; i < dir.size(); ++i) dir[i] = f.Z1[i] - f.Z0[i];
        Rational s0 = dot(f.e0.a, dir), s1 = dot(f.e1.a, dir);
        if (f.e0.val + s0 == f.e1.val || f.e1.val - s1 == f.e0.val) continue;
        if (s0 == s1) throw LpError("parallel distinct majorants on a value segment");
        Rational tstar = (f.e1.val - s1 - f.e0.val) / (s0 - s1);
        if (!(tstar > 0 && tstar < 1)) throw LpError("majorant crossing escaped its segment");
        Vec M(f.Z0.size());
        for (size_t i = 0; i < M.size(); ++i) M[i] = f.Z0[i] + tstar * dir[i];
        HullEval eM = eval_hull(U, M, label);
        out.push_back({M, eM.val});
        if (f.depth > 64 + U.size())
            throw LpError("value segment subdivision failed to terminate");
        stack.push_back({f.Z0, M, f.e0, eM, f.depth + 1});
        stack.push_back({M, f.Z1, eM, f.e1, f.depth + 1});
    }
}

// Support of the node value on its slice box: every vertex of the concave
// piecewise linear graph. For one risky asset a single sweep suffices; for two,
// the graph vertices sit either on the rectangle boundary (four edge sweeps) or
// at hull vertices of the child samples strictly inside (re-evaluated in U).
inline std::vector<SupportPoint> node_support(const SolvencyCone& K, const std::string& label,
                                              const std::vector<SupportPoint>& U) {
    size_t m = K.d - 1;
    std::vector<SupportPoint> raw;
    if (m == 1) {
        sweep_segment(U, Vec{K.lo[0]}, Vec{K.hi[0]}, label, raw);
    } else {
        Vec c00{K.lo[0], K.lo[1]}, c10{K.hi[0], K.lo[1]};
        Vec c01{K.lo[0], K.hi[1]}, c11{K.hi[0], K.hi[1]};
        sweep_segment(U, c00, c10, label, raw);
        sweep_segment(U, c01, c11, label, raw);
        sweep_segment(U, c00, c01, label, raw);
        sweep_segment(U, c10, c11, label, raw);
        for (const auto& sp : U) {
            bool inside = true;
            for (size_t i = 0; i < m; ++i)
                inside = inside && K.lo[i] < sp.x[i] && sp.x[i] < K.hi[i];
            if (inside) raw.push_back({sp.x, eval_hull(U, sp.x, label).val});
        }
    }
    std::vector<SupportPoint> out;
    for (auto& sp : raw) {
        bool seen = false;
        for (const auto& q : out) seen = seen || q.x == sp.x;
        if (!seen) out.push_back(std::move(sp));
    }
    return out;
}

}  // namespace dp_detail

inline DpOutcome backward_induction(const EnlargedTree& en, const Claim& claim) {
    const ScenarioTree& tree = en.tree;
    validate_claim(tree, claim);
    if (!claim.statics.empty())
        throw UnsupportedShape("backward induction prices bare claims only");
    if (tree.d > 3)
        throw UnsupportedShape(
            "backward induction carries exact value functions for at most two risky assets");

    DpOutcome out;
    out.value.g.assign(tree.nodes.size(), {});
    out.value.support.assign(tree.nodes.size(), {});
    for (const auto& n : tree.nodes) {
        if (!en.reach[n.id] || !tree.is_terminal(n.id)) continue;
        for (const auto& tp : en.at(n.id))
            out.value.g[n.id].push_back(dot(claim.xi[n.id], tp.X));
        for (const auto& v : n.cone.V) {
            SupportPoint sp;
            sp.x.assign(v.begin(), v.end() - 1);
            sp.val = dot(claim.xi[n.id], v);
            out.value.support[n.id].push_back(std::move(sp));
        }
    }
    for (size_t t = tree.T; t-- > 0;) {
        for (size_t id : tree.by_time[t]) {
            if (!en.reach[id] || tree.is_terminal(id)) continue;
            const TreeNode& n = tree.node(id);
            std::vector<SupportPoint> U;
            for (size_t cid : n.children) {
                if (!en.reach[cid]) continue;
                const auto& S = out.value.support[cid];
                U.insert(U.end(), S.begin(), S.end());
            }
            out.value.support[id] = dp_detail::node_support(n.cone, n.label, U);
            for (const auto& tp : en.at(id)) {
                Vec z(tp.X.begin(), tp.X.end() - 1);
                out.value.g[id].push_back(dp_detail::eval_hull(U, z, n.label).val);
            }
        }
    }
    out.price = g_prime(en, out.value, tree.root(), Vec(tree.d, Rational(0)));

    // Forward hedge extraction. At each node take the support argmax of the
    // tilted value (the box worst case for the incoming holding) and pick a
    // supergradient there lying in the box normal cone, so that worst-case
    // funding of the trade is exactly what the value recursion already paid.
    // Minimizing the L1 norm of the slope keeps the choice deterministic and
    // leaves flat values unhedged.
    out.H.assign(tree.nodes.size(), Vec{});
    std::vector<Vec> incoming(tree.nodes.size(), Vec{});
    incoming[tree.root()] = Vec(tree.d, Rational(0));
    for (size_t t = 0; t < tree.T; ++t) {
        for (size_t id : tree.by_time[t]) {
            if (!en.reach[id] || tree.is_terminal(id)) continue;
            const TreeNode& n = tree.node(id);
            const Vec& h_in = incoming[id];
            const auto& S = out.value.support[id];
            size_t m = tree.d - 1;
            size_t star = 0;
            {
                Rational best;
                bool first = true;
                for (size_t k = 0; k < S.size(); ++k) {
                    Rational v = S[k].val;
                    for (size_t i = 0; i < m; ++i) v -= h_in[i] * S[k].x[i];
                    if (first || v > best) {
                        best = v;
                        star = k;
                    }
                    first = false;
                }
            }
            const Vec& Xs = S[star].x;
            std::vector<SupportPoint> U;
            for (size_t cid : n.children) {
                if (!en.reach[cid]) continue;
                const auto& Sc = out.value.support[cid];
                U.insert(U.end(), Sc.begin(), Sc.end());
            }
            LpProblem p;
            std::vector<size_t> var_ap(m, SIZE_MAX), var_am(m, SIZE_MAX);
            for (size_t i = 0; i < m; ++i) {
                bool at_lo = Xs[i] == n.cone.lo[i], at_hi = Xs[i] == n.cone.hi[i];
                if (at_hi) var_ap[i] = p.new_var(Rational(1));
                if (at_lo) var_am[i] = p.new_var(Rational(1));
            }
            size_t var_b = p.new_var(Rational(0), true);
            auto slope_row = [&](const Vec& x, Vec& row) {
                for (size_t i = 0; i < m; ++i) {
                    if (var_ap[i] != SIZE_MAX) row[var_ap[i]] += x[i];
                    if (var_am[i] != SIZE_MAX) row[var_am[i]] -= x[i];
                }
                row[var_b] += 1;
            };
            for (const auto& sp : U) {
                Vec row(p.num_vars(), Rational(0));
                slope_row(sp.x, row);
                Rational rhs = sp.val;
                for (size_t i = 0; i < m; ++i) rhs -= h_in[i] * sp.x[i];
                p.add_row(std::move(row), Rel::GE, rhs);
            }
            {
                Vec row(p.num_vars(), Rational(0));
                slope_row(Xs, row);
                Rational rhs = S[star].val;
                for (size_t i = 0; i < m; ++i) rhs -= h_in[i] * Xs[i];
                p.add_row(std::move(row), Rel::EQ, rhs);
            }
            auto res = lp_solve(p);
            if (res.status != LpStatus::Optimal)
                throw LpError("hedge slope selection failed at node " + n.label);
            Vec h(tree.d, Rational(0));
            for (size_t i = 0; i < m; ++i) {
                h[i] = h_in[i];
                if (var_ap[i] != SIZE_MAX) h[i] += res.x[var_ap[i]];
                if (var_am[i] != SIZE_MAX) h[i] -= res.x[var_am[i]];
            }
            out.H[id] = h;
            for (size_t cid : n.children)
                if (en.reach[cid]) incoming[cid] = h;
        }
    }

    out.cert.price = out.price;
    out.cert.ell = {};
    out.cert.eta = eta_from_H(en, out.H);
    if (!verify_hedge(tree, claim, out.cert))
        throw LpError("backward induction hedge failed verification");
    return out;
}

// True iff no nonzero static position is super-replicable for free: for each
// instrument and sign, holding one unit forced, the cheapest super-hedge of
// zero still costs strictly positive cash.
inline bool robustness_check(const ScenarioTree& tree, const Claim& claim) {
    validate_claim(tree, claim);
    SupportMask reach = polar_mask(tree);
    size_t e = claim.statics.size();
    for (size_t pin = 0; pin < e; ++pin) {
        for (int sign = -1; sign <= 1; sign += 2) {
            LpProblem p;
            size_t var_y = p.new_var(Rational(1), true);
            std::vector<size_t> var_lp(e, SIZE_MAX), var_lm(e, SIZE_MAX);
            for (size_t i = 0; i < e; ++i) {
                if (i == pin) continue;
                var_lp[i] = p.new_var(Rational(0));
                var_lm[i] = p.new_var(Rational(0));
            }
            std::vector<size_t> var_eta(tree.nodes.size(), SIZE_MAX);
            for (const auto& n : tree.nodes) {
                if (!reach[n.id]) continue;
                var_eta[n.id] = p.num_vars();
                for (size_t k = 0; k < tree.d; ++k) p.new_var(Rational(0), true);
            }
            for (const auto& n : tree.nodes) {
                if (!reach[n.id]) continue;
                for (const auto& v : n.cone.V) {
                    Vec row(p.num_vars(), Rational(0));
                    for (size_t k = 0; k < tree.d; ++k) row[var_eta[n.id] + k] = v[k];
                    p.add_row(std::move(row), Rel::LE, Rational(0));
                }
                if (!tree.is_terminal(n.id)) continue;
                auto path = tree.path_from_root(n.id);
                for (const auto& v : n.cone.V) {
                    Vec row(p.num_vars(), Rational(0));
                    row[var_y] = 1;
                    Rational rhs = 0;
                    for (size_t i = 0; i < e; ++i) {
                        Rational zv = dot(claim.statics[i].zeta[n.id], v);
                        if (i == pin) {
                            rhs -= sign * zv - claim.statics[i].cost;
                            continue;
                        }
                        row[var_lp[i]] = zv - claim.statics[i].cost;
                        row[var_lm[i]] = -zv - claim.statics[i].cost;
                    }
                    for (size_t a : path)
                        for (size_t k = 0; k < tree.d; ++k) row[var_eta[a] + k] = v[k];
                    p.add_row(std::move(row), Rel::GE, rhs);
                }
            }
            auto res = lp_solve(p);
            if (res.status == LpStatus::Unbounded) return false;
            if (res.status != LpStatus::Optimal)
                throw LpError("robustness probe infeasible; cash should always hedge");
            if (res.objective <= 0) return false;
        }
    }
    return true;
}

}  // namespace conehedge
