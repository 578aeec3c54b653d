#pragma once

// Solvency cones from bid-ask data.  A cone K is never stored primally: we
// keep the vertex list V of the normalized dual slice K^{*,0} (last
// coordinate 1), so x in K iff <x,v> >= 0 at every vertex, and x in -K iff
// <x,v> <= 0.  Facet inequalities for K^* are derived from V and drive the
// strict-interiority tests.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "conehedge/errors.hpp"
#include "conehedge/rational.hpp"
#include "conehedge/vec.hpp"

namespace conehedge {

struct BidAskSpec {
    Vec mid;  // full d-vector, last entry is the numeraire and equals 1
    Vec lo, hi;  // per risky asset i < d: bid lo_i, ask hi_i

    size_t d() const { return mid.size(); }

    static BidAskSpec uniform(Vec risky_mid, const Rational& c) {
        if (c <= 1) throw SpreadNotGreaterThanOne("spread factor " + format_rational(c));
        BidAskSpec s;
        for (const auto& m : risky_mid) {
            if (m <= 0) throw NonPositiveMid("mid price " + format_rational(m));
            s.lo.push_back(m / c);
            s.hi.push_back(m * c);
        }
        s.mid = std::move(risky_mid);
        s.mid.push_back(Rational(1));
        return s;
    }

    // Collapses every interval to the mid price. Cones built from this need
    // allow_degenerate; the enlargement then pins X at the mid with no freedom.
    static BidAskSpec frictionless(Vec risky_mid) {
        BidAskSpec s;
        for (const auto& m : risky_mid) {
            if (m <= 0) throw NonPositiveMid("mid price " + format_rational(m));
            s.lo.push_back(m);
            s.hi.push_back(m);
        }
        s.mid = std::move(risky_mid);
        s.mid.push_back(Rational(1));
        return s;
    }

    static BidAskSpec with_intervals(Vec risky_mid, Vec lo, Vec hi,
                                     const std::optional<Rational>& declared_c = {}) {
        if (lo.size() != risky_mid.size() || hi.size() != risky_mid.size())
            throw DimensionMismatch("interval count does not match asset count");
        if (declared_c && *declared_c <= 1)
            throw SpreadNotGreaterThanOne("spread factor " + format_rational(*declared_c));
        BidAskSpec s;
        s.lo = std::move(lo);
        s.hi = std::move(hi);
        for (size_t i = 0; i < risky_mid.size(); ++i) {
            const Rational& m = risky_mid[i];
            if (m <= 0) throw NonPositiveMid("mid price " + format_rational(m));
            if (s.lo[i] > m || m > s.hi[i])
                throw IntervalViolatesSpreadBounds("mid " + format_rational(m) +
                                                   " outside [" + format_rational(s.lo[i]) +
                                                   ", " + format_rational(s.hi[i]) + "]");
            if (declared_c && (s.lo[i] * *declared_c < m || s.hi[i] > m * *declared_c))
                throw IntervalViolatesSpreadBounds("interval exceeds declared spread factor");
        }
        s.mid = std::move(risky_mid);
        s.mid.push_back(Rational(1));
        return s;
    }
};

struct SolvencyCone {
    size_t d = 0;
    Vec mid;          // S (may be empty for cones built from raw vertex lists)
    bool is_box = false;
    Vec lo, hi;       // box bounds when is_box
    Mat V;            // slice vertices, each of size d with last coordinate 1
    Mat facets;       // rows a: y in K^* iff <a,y> >= 0 for every row
    bool degenerate = false;  // slice has affine dimension < d-1
};

namespace cone_detail {

inline void check_vertices(const Mat& V, size_t d) {
    for (const auto& v : V) {
        if (v.size() != d) throw DimensionMismatch("slice vertex of wrong dimension");
        if (v[d - 1] != 1)
            throw SliceCoordinateNotOne("vertex last coordinate " + format_rational(v[d - 1]));
        for (const auto& coord : v)
            if (coord <= 0) throw NonPositiveMid("dual slice vertex not strictly positive");
    }
}

inline size_t affine_dim(const Mat& V, size_t d) {
    if (V.size() <= 1) return 0;
    Mat diffs;
    for (size_t k = 1; k < V.size(); ++k) {
        Vec row(d - 1);
        for (size_t i = 0; i + 1 < d; ++i) row[i] = V[k][i] - V[0][i];
        diffs.push_back(std::move(row));
    }
    return (d - 1) - nullspace(diffs).size();
}

// Facets of conv(projected vertices) in R^{d-1}, lifted to cone inequalities
// <a,y> >= 0 on R^d.  A polytope facet u.z <= b lifts to a = (-u, b).
inline Mat lift_box_facets(const Vec& lo, const Vec& hi, bool any_degenerate) {
    const size_t d = lo.size() + 1;
    Mat F;
    for (size_t i = 0; i + 1 < d; ++i) {
        Vec up(d, Rational(0)), dn(d, Rational(0));
        up[i] = -1;
        up[d - 1] = hi[i];
        dn[i] = 1;
        dn[d - 1] = -lo[i];
        F.push_back(std::move(up));
        F.push_back(std::move(dn));
    }
    if (any_degenerate) {
        // For full-dimensional boxes y^d >= 0 is implied; for flat ones it
        // must be stated or the facet system describes a linear space.
        Vec last(d, Rational(0));
        last[d - 1] = 1;
        F.push_back(std::move(last));
    }
    return F;
}

inline Mat enumerate_facets(const Mat& V, size_t d) {
    const size_t k = d - 1;  // slice lives in R^{d-1}
    Mat P;
    for (const auto& v : V) P.push_back(Vec(v.begin(), v.end() - 1));
    Mat out;
    std::vector<Vec> seen;
    auto emit = [&](Vec u, Rational b) {
        // normalize so duplicate facets collapse
        Vec key = u;
        key.push_back(b);
        size_t lead = 0;
        while (lead < key.size() && key[lead] == 0) ++lead;
        Rational scale = key[lead];
        for (auto& x : key) x /= scale;
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) return;
        seen.push_back(key);
        Vec a(d);
        for (size_t i = 0; i < k; ++i) a[i] = -u[i];
        a[d - 1] = b;
        out.push_back(std::move(a));
    };
    // all k-subsets of P (a facet hyperplane of a full-dim polytope in R^k
    // passes through k affinely independent vertices)
    std::vector<size_t> comb(k);
    for (size_t i = 0; i < k; ++i) comb[i] = i;
    if (P.size() < k) throw IntervalViolatesSpreadBounds("slice not full-dimensional");
    while (true) {
        Mat rows;  // unknowns (u, b): u.f - b = 0
        for (size_t i = 0; i < k; ++i) {
            Vec row = P[comb[i]];
            row.push_back(Rational(-1));
            rows.push_back(std::move(row));
        }
        Mat ns = nullspace(rows);
        if (ns.size() == 1) {
            Vec u(ns[0].begin(), ns[0].begin() + k);
            Rational b = ns[0][k];
            bool all_le = true, all_ge = true, any_strict = false;
            for (const auto& q : P) {
                Rational s = dot(u, q) - b;
                if (s > 0) all_le = false;
                if (s < 0) all_ge = false;
                if (s != 0) any_strict = true;
            }
            if (any_strict) {
                if (all_le) emit(u, b);
                if (all_ge) emit(vec_scale(Rational(-1), u), Rational(-b));
            }
        }
        // next combination
        size_t i = k;
        while (true) {
            if (i == 0) return out;
            --i;
            if (comb[i] + (k - i) < P.size()) {
                ++comb[i];
                for (size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
        }
    }
}

}  // namespace cone_detail

inline SolvencyCone build_cone(const BidAskSpec& spec, bool allow_degenerate = false) {
    const size_t d = spec.d();
    if (d < 2) throw DimensionMismatch("need at least two assets");
    if (spec.mid[d - 1] != 1)
        throw SliceCoordinateNotOne("numeraire mid " + format_rational(spec.mid[d - 1]));
    if (spec.lo.size() != d - 1 || spec.hi.size() != d - 1)
        throw DimensionMismatch("interval count does not match asset count");
    bool any_degenerate = false;
    for (size_t i = 0; i + 1 < d; ++i) {
        if (spec.mid[i] <= 0) throw NonPositiveMid("mid price " + format_rational(spec.mid[i]));
        if (spec.lo[i] <= 0) throw NonPositiveMid("bid price " + format_rational(spec.lo[i]));
        if (spec.lo[i] > spec.mid[i] || spec.mid[i] > spec.hi[i])
            throw IntervalViolatesSpreadBounds("mid outside its bid-ask interval");
        if (spec.lo[i] == spec.hi[i]) any_degenerate = true;
    }
    if (any_degenerate && !allow_degenerate)
        throw IntervalViolatesSpreadBounds("slice not full-dimensional (bid equals ask)");

    SolvencyCone K;
    K.d = d;
    K.mid = spec.mid;
    K.is_box = true;
    K.lo = spec.lo;
    K.hi = spec.hi;
    K.degenerate = any_degenerate;
    for (size_t mask = 0; mask < (size_t(1) << (d - 1)); ++mask) {
        Vec v(d);
        for (size_t i = 0; i + 1 < d; ++i) v[i] = (mask >> i & 1) ? spec.hi[i] : spec.lo[i];
        v[d - 1] = 1;
        if (std::find(K.V.begin(), K.V.end(), v) == K.V.end()) K.V.push_back(std::move(v));
    }
    K.facets = cone_detail::lift_box_facets(spec.lo, spec.hi, any_degenerate);
    return K;
}

// General V-representation entry point.  The slice must be full-dimensional;
// file inputs always come through build_cone instead.
inline SolvencyCone build_cone_from_vertices(Mat V) {
    if (V.empty()) throw DimensionMismatch("empty vertex list");
    const size_t d = V[0].size();
    if (d < 2) throw DimensionMismatch("need at least two assets");
    cone_detail::check_vertices(V, d);
    if (cone_detail::affine_dim(V, d) != d - 1)
        throw IntervalViolatesSpreadBounds("slice not full-dimensional");
    SolvencyCone K;
    K.d = d;
    K.V = std::move(V);
    if (d == 2) {
        K.is_box = true;
        K.lo = {K.V[0][0]};
        K.hi = {K.V[0][0]};
        for (const auto& v : K.V) {
            K.lo[0] = rational_min(K.lo[0], v[0]);
            K.hi[0] = rational_max(K.hi[0], v[0]);
        }
        K.facets = cone_detail::lift_box_facets(K.lo, K.hi, false);
    } else {
        K.facets = cone_detail::enumerate_facets(K.V, d);
    }
    return K;
}

inline bool in_cone(const SolvencyCone& K, const Vec& x) {
    if (x.size() != K.d) throw DimensionMismatch("in_cone: vector dimension");
    for (const auto& v : K.V)
        if (dot(x, v) < 0) return false;
    return true;
}

inline bool in_minus_cone(const SolvencyCone& K, const Vec& x) {
    if (x.size() != K.d) throw DimensionMismatch("in_minus_cone: vector dimension");
    for (const auto& v : K.V)
        if (dot(x, v) > 0) return false;
    return true;
}

inline bool in_dual(const SolvencyCone& K, const Vec& y) {
    if (y.size() != K.d) throw DimensionMismatch("in_dual: vector dimension");
    for (const auto& a : K.facets)
        if (dot(a, y) < 0) return false;
    return true;
}

inline bool in_dual_interior(const SolvencyCone& K, const Vec& y) {
    if (y.size() != K.d) throw DimensionMismatch("in_dual_interior: vector dimension");
    for (const auto& a : K.facets)
        if (dot(a, y) <= 0) return false;
    return true;
}

inline bool in_slice(const SolvencyCone& K, const Vec& y) {
    return y.size() == K.d && y[K.d - 1] == 1 && in_dual(K, y);
}

inline bool in_slice_interior(const SolvencyCone& K, const Vec& y) {
    return y.size() == K.d && y[K.d - 1] == 1 && in_dual_interior(K, y);
}

inline Vec project_to_slice(const SolvencyCone& K, const Vec& y) {
    if (y.size() != K.d) throw DimensionMismatch("project_to_slice: vector dimension");
    if (y[K.d - 1] != 1)
        throw SliceCoordinateNotOne("point last coordinate " + format_rational(y[K.d - 1]));
    if (K.is_box) {
        Vec z(y);
        for (size_t i = 0; i + 1 < K.d; ++i)
            z[i] = rational_min(rational_max(z[i], K.lo[i]), K.hi[i]);
        return z;
    }
    // Exact projection onto conv(V') by scanning affine hulls of vertex
    // subsets: the minimizer lies in the relative interior of some face, and
    // the projection onto that face's affine hull both equals it and lies in
    // the polytope.
    const size_t k = K.d - 1;
    Vec target(y.begin(), y.end() - 1);
    Mat P;
    for (const auto& v : K.V) P.push_back(Vec(v.begin(), v.end() - 1));
    std::optional<Vec> best;
    Rational best_dist = 0;
    auto consider = [&](const Vec& z) {
        Vec lifted(z);
        lifted.push_back(Rational(1));
        if (!in_dual(K, lifted)) return;
        Rational dist = 0;
        for (size_t i = 0; i < k; ++i) dist += (z[i] - target[i]) * (z[i] - target[i]);
        if (!best || dist < best_dist) {
            best = z;
            best_dist = dist;
        }
    };
    const size_t n = P.size();
    for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
        std::vector<size_t> sel;
        for (size_t i = 0; i < n; ++i)
            if (mask >> i & 1) sel.push_back(i);
        if (sel.size() > K.d) continue;
        const Vec& f0 = P[sel[0]];
        Mat M;  // columns f_j - f0, as rows of M^T for the normal equations
        for (size_t j = 1; j < sel.size(); ++j) M.push_back(vec_sub(P[sel[j]], f0));
        if (M.empty()) {
            consider(f0);
            continue;
        }
        Mat G(M.size(), Vec(M.size()));
        Vec rhs(M.size());
        Vec w = vec_sub(target, f0);
        for (size_t a = 0; a < M.size(); ++a) {
            for (size_t b = 0; b < M.size(); ++b) G[a][b] = dot(M[a], M[b]);
            rhs[a] = dot(M[a], w);
        }
        auto mu = solve_linear(G, rhs);
        if (!mu) continue;
        Vec z = f0;
        for (size_t a = 0; a < M.size(); ++a) z = vec_add(z, vec_scale((*mu)[a], M[a]));
        consider(z);
    }
    if (!best) throw LpError("projection scan produced no candidate");
    Vec out = *best;
    out.push_back(Rational(1));
    return out;
}

}  // namespace conehedge
