#pragma once

// Exact-rational linear programming.  Dense two-phase simplex with Bland's
// rule, so every run terminates and every run of the same problem takes the
// same pivot path.  Each verdict ships with a certificate (optimal dual,
// Farkas vector, or improving ray) and the certificate is re-verified against
// the original problem before it is returned; a failed verification throws
// LpError rather than returning a wrong answer.

#include <cstddef>
#include <string>
#include <vector>

#include "conehedge/errors.hpp"
#include "conehedge/rational.hpp"
#include "conehedge/vec.hpp"

namespace conehedge {

enum class Rel { LE, GE, EQ };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpProblem {
    bool maximize = false;
    Vec c;
    std::vector<bool> free_var;
    Mat A;
    std::vector<Rel> rel;
    Vec b;

    size_t num_vars() const { return c.size(); }
    size_t num_rows() const { return A.size(); }

    size_t new_var(const Rational& cost, bool is_free = false) {
        c.push_back(cost);
        free_var.push_back(is_free);
        for (auto& row : A) row.push_back(Rational(0));
        return c.size() - 1;
    }

    void add_row(Vec coeffs, Rel r, Rational rhs) {
        if (coeffs.size() > c.size()) throw DimensionMismatch("add_row: too many coefficients");
        coeffs.resize(c.size(), Rational(0));
        A.push_back(std::move(coeffs));
        rel.push_back(r);
        b.push_back(std::move(rhs));
    }
};

struct LpResult {
    LpStatus status = LpStatus::Optimal;
    Rational objective = 0;
    Vec x;    // Optimal: solution.  Unbounded: a feasible point.
    Vec y;    // Optimal: dual values per row.  Infeasible: Farkas vector per row.
    Vec ray;  // Unbounded: improving feasible direction.
};

inline void lp_assert_primal_feasible(const LpProblem& p, const Vec& x, const char* who) {
    if (x.size() != p.num_vars()) throw LpError(std::string(who) + ": solution size mismatch");
    for (size_t j = 0; j < p.num_vars(); ++j)
        if (!p.free_var[j] && x[j] < 0) throw LpError(std::string(who) + ": negative variable");
    for (size_t i = 0; i < p.num_rows(); ++i) {
        Rational lhs = dot(p.A[i], x);
        bool ok = p.rel[i] == Rel::LE ? lhs <= p.b[i]
                : p.rel[i] == Rel::GE ? lhs >= p.b[i]
                                      : lhs == p.b[i];
        if (!ok) throw LpError(std::string(who) + ": row " + std::to_string(i) + " violated");
    }
}

// Checks dual feasibility and the strong-duality equality y.b == objective ==
// c.x.  Sign conventions: minimizing, LE rows take y <= 0 and GE rows y >= 0;
// maximizing flips both.  Nonnegative variables give inequality dual rows,
// free variables give equalities.
inline void lp_assert_optimal_pair(const LpProblem& p, const LpResult& res) {
    lp_assert_primal_feasible(p, res.x, "optimal");
    if (res.y.size() != p.num_rows()) throw LpError("optimal: dual size mismatch");
    for (size_t i = 0; i < p.num_rows(); ++i) {
        if (p.rel[i] == Rel::EQ) continue;
        bool wants_nonneg = (p.rel[i] == Rel::GE) != p.maximize;
        if (wants_nonneg ? res.y[i] < 0 : res.y[i] > 0)
            throw LpError("optimal: dual sign on row " + std::to_string(i));
    }
    for (size_t j = 0; j < p.num_vars(); ++j) {
        Rational s = 0;
        for (size_t i = 0; i < p.num_rows(); ++i) s += res.y[i] * p.A[i][j];
        if (p.free_var[j]) {
            if (s != p.c[j]) throw LpError("optimal: dual equality on var " + std::to_string(j));
        } else if (p.maximize ? s < p.c[j] : s > p.c[j]) {
            throw LpError("optimal: dual inequality on var " + std::to_string(j));
        }
    }
    if (dot(p.c, res.x) != res.objective) throw LpError("optimal: objective mismatch");
    if (dot(p.b, res.y) != res.objective) throw LpError("optimal: strong duality gap");
}

// Farkas conventions are objective-free: y >= 0 on GE rows, y <= 0 on LE
// rows, free on EQ rows; y^T A <= 0 on nonnegative variables, == 0 on free
// ones; y.b > 0.  Any feasible x would then give the contradiction
// 0 >= (y^T A) x >= y.b > 0.
inline void lp_assert_farkas(const LpProblem& p, const Vec& y) {
    if (y.size() != p.num_rows()) throw LpError("farkas: size mismatch");
    for (size_t i = 0; i < p.num_rows(); ++i) {
        if (p.rel[i] == Rel::GE && y[i] < 0) throw LpError("farkas: sign on GE row");
        if (p.rel[i] == Rel::LE && y[i] > 0) throw LpError("farkas: sign on LE row");
    }
    for (size_t j = 0; j < p.num_vars(); ++j) {
        Rational s = 0;
        for (size_t i = 0; i < p.num_rows(); ++i) s += y[i] * p.A[i][j];
        if (p.free_var[j] ? s != 0 : s > 0)
            throw LpError("farkas: column condition on var " + std::to_string(j));
    }
    if (dot(p.b, y) <= 0) throw LpError("farkas: y.b not positive");
}

inline void lp_assert_ray(const LpProblem& p, const Vec& x, const Vec& ray) {
    lp_assert_primal_feasible(p, x, "ray base point");
    if (ray.size() != p.num_vars()) throw LpError("ray: size mismatch");
    for (size_t j = 0; j < p.num_vars(); ++j)
        if (!p.free_var[j] && ray[j] < 0) throw LpError("ray: negative component");
    for (size_t i = 0; i < p.num_rows(); ++i) {
        Rational lhs = dot(p.A[i], ray);
        bool ok = p.rel[i] == Rel::LE ? lhs <= 0 : p.rel[i] == Rel::GE ? lhs >= 0 : lhs == 0;
        if (!ok) throw LpError("ray: recession row " + std::to_string(i));
    }
    Rational rate = dot(p.c, ray);
    if (p.maximize ? rate <= 0 : rate >= 0) throw LpError("ray: not improving");
}

namespace lp_detail {

enum class ColKind { Real, Slack, Surplus, Art };

struct Tableau {
    // rows: each of size ncols + 1, last entry is the rhs (kept >= 0).
    std::vector<Vec> rows;
    Vec cost;  // size ncols + 1, last entry is minus the objective value
    std::vector<size_t> basis;
    std::vector<ColKind> kind;
    size_t ncols = 0;

    Rational& rhs(size_t i) { return rows[i][ncols]; }

    void pivot(size_t pr, size_t pc) {
        Vec& prow = rows[pr];
        Rational piv = prow[pc];
        for (auto& v : prow) v /= piv;
        for (size_t k = 0; k < rows.size(); ++k) {
            if (k == pr || rows[k][pc] == 0) continue;
            Rational f = rows[k][pc];
            for (size_t j = 0; j <= ncols; ++j) rows[k][j] -= f * prow[j];
        }
        if (cost[pc] != 0) {
            Rational f = cost[pc];
            for (size_t j = 0; j <= ncols; ++j) cost[j] -= f * prow[j];
        }
        basis[pr] = pc;
    }

    void reset_cost(const Vec& c_int) {
        cost.assign(ncols + 1, Rational(0));
        for (size_t j = 0; j < ncols; ++j) cost[j] = c_int[j];
        for (size_t i = 0; i < rows.size(); ++i) {
            const Rational& cb = c_int[basis[i]];
            if (cb == 0) continue;
            for (size_t j = 0; j <= ncols; ++j) cost[j] -= cb * rows[i][j];
        }
    }

    // Bland's rule both ways.  Returns SIZE_MAX when optimal, otherwise the
    // entering column; on unboundedness sets *unbounded_col and returns it.
    bool step(bool allow_art, size_t* unbounded_col) {
        size_t enter = SIZE_MAX;
        for (size_t j = 0; j < ncols; ++j) {
            if (!allow_art && kind[j] == ColKind::Art) continue;
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        }
        if (enter == SIZE_MAX) return false;
        size_t leave = SIZE_MAX;
        Rational best;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (rows[i][enter] <= 0) continue;
            Rational ratio = rhs(i) / rows[i][enter];
            if (leave == SIZE_MAX || ratio < best ||
                (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == SIZE_MAX) {
            *unbounded_col = enter;
            return false;
        }
        pivot(leave, enter);
        return true;
    }
};

}  // namespace lp_detail

inline LpResult lp_solve(const LpProblem& p) {
    using lp_detail::ColKind;
    const size_t n = p.num_vars();
    const size_t m = p.num_rows();
    for (size_t i = 0; i < m; ++i)
        if (p.A[i].size() != n) throw DimensionMismatch("lp_solve: ragged constraint matrix");

    // Split free variables and record the column layout.
    std::vector<size_t> pos_col(n), neg_col(n, SIZE_MAX);
    std::vector<ColKind> kind;
    std::vector<size_t> col_user;  // Real columns: originating variable
    std::vector<int> col_sign;
    for (size_t j = 0; j < n; ++j) {
        pos_col[j] = kind.size();
        kind.push_back(ColKind::Real);
        col_user.push_back(j);
        col_sign.push_back(1);
        if (p.free_var[j]) {
            neg_col[j] = kind.size();
            kind.push_back(ColKind::Real);
            col_user.push_back(j);
            col_sign.push_back(-1);
        }
    }
    const size_t nreal = kind.size();

    // Normalize rows to nonnegative rhs, then attach slack / surplus /
    // artificial columns.  idcol[i] is the original identity column of row i,
    // used later to read dual values off the reduced-cost row.
    std::vector<int> rowsign(m, 1);
    std::vector<Rel> nrel(p.rel);
    for (size_t i = 0; i < m; ++i) {
        if (p.b[i] < 0) {
            rowsign[i] = -1;
            if (nrel[i] == Rel::LE)
                nrel[i] = Rel::GE;
            else if (nrel[i] == Rel::GE)
                nrel[i] = Rel::LE;
        }
    }
    std::vector<size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
    for (size_t i = 0; i < m; ++i) {
        if (nrel[i] == Rel::LE) {
            slack_col[i] = kind.size();
            kind.push_back(ColKind::Slack);
        } else if (nrel[i] == Rel::GE) {
            slack_col[i] = kind.size();
            kind.push_back(ColKind::Surplus);
        }
    }
    for (size_t i = 0; i < m; ++i) {
        if (nrel[i] != Rel::LE) {
            art_col[i] = kind.size();
            kind.push_back(ColKind::Art);
        }
    }
    const size_t ncols = kind.size();

    lp_detail::Tableau tab;
    tab.ncols = ncols;
    tab.kind = kind;
    tab.rows.assign(m, Vec(ncols + 1, Rational(0)));
    tab.basis.assign(m, SIZE_MAX);
    std::vector<size_t> idcol(m);
    for (size_t i = 0; i < m; ++i) {
        Vec& row = tab.rows[i];
        for (size_t j = 0; j < n; ++j) {
            if (p.A[i][j] == 0) continue;
            Rational v = Rational(rowsign[i]) * p.A[i][j];
            row[pos_col[j]] = v;
            if (neg_col[j] != SIZE_MAX) row[neg_col[j]] = -v;
        }
        row[ncols] = Rational(rowsign[i]) * p.b[i];
        if (nrel[i] == Rel::LE) {
            row[slack_col[i]] = 1;
            tab.basis[i] = slack_col[i];
            idcol[i] = slack_col[i];
        } else {
            if (nrel[i] == Rel::GE) row[slack_col[i]] = -1;
            row[art_col[i]] = 1;
            tab.basis[i] = art_col[i];
            idcol[i] = art_col[i];
        }
    }

    // Internal cost vector (minimization).
    Vec c_int(ncols, Rational(0));
    for (size_t col = 0; col < nreal; ++col) {
        Rational v = p.c[col_user[col]] * col_sign[col];
        c_int[col] = p.maximize ? Rational(-v) : v;
    }

    const size_t pivot_cap = 5'000'000;
    size_t pivots = 0;
    auto run = [&](bool allow_art) {
        size_t unb = SIZE_MAX;
        while (tab.step(allow_art, &unb)) {
            if (++pivots > pivot_cap) throw LpError("pivot limit exceeded");
        }
        return unb;
    };

    // Phase 1.
    Vec c_phase1(ncols, Rational(0));
    for (size_t j = 0; j < ncols; ++j)
        if (kind[j] == ColKind::Art) c_phase1[j] = 1;
    tab.reset_cost(c_phase1);
    run(true);
    Rational phase1_obj = -tab.cost[ncols];
    if (phase1_obj > 0) {
        LpResult res;
        res.status = LpStatus::Infeasible;
        res.y.assign(m, Rational(0));
        for (size_t i = 0; i < m; ++i) {
            Rational yi = idcol[i] == slack_col[i] ? Rational(-tab.cost[idcol[i]])
                                                   : Rational(1 - tab.cost[idcol[i]]);
            res.y[i] = Rational(rowsign[i]) * yi;
        }
        lp_assert_farkas(p, res.y);
        return res;
    }

    // Drive leftover artificials out of the basis; rows that cannot release
    // one are redundant and are removed (their dual value is zero).
    std::vector<size_t> live_row(m);
    for (size_t i = 0; i < m; ++i) live_row[i] = i;
    for (size_t i = 0; i < tab.rows.size();) {
        if (kind[tab.basis[i]] != ColKind::Art) {
            ++i;
            continue;
        }
        size_t pc = SIZE_MAX;
        for (size_t j = 0; j < ncols; ++j) {
            if (kind[j] != ColKind::Art && tab.rows[i][j] != 0) {
                pc = j;
                break;
            }
        }
        if (pc != SIZE_MAX) {
            tab.pivot(i, pc);
            ++i;
        } else {
            tab.rows.erase(tab.rows.begin() + i);
            tab.basis.erase(tab.basis.begin() + i);
            live_row.erase(live_row.begin() + i);
        }
    }

    // Phase 2.  Artificial columns stay in the tableau, barred from entering,
    // so that dual values remain readable from their reduced costs.
    tab.reset_cost(c_int);
    size_t unb = run(false);

    auto internal_x = [&]() {
        Vec xi(ncols, Rational(0));
        for (size_t i = 0; i < tab.rows.size(); ++i) xi[tab.basis[i]] = tab.rhs(i);
        return xi;
    };
    auto to_user = [&](const Vec& xi) {
        Vec x(n, Rational(0));
        for (size_t col = 0; col < nreal; ++col)
            x[col_user[col]] += Rational(col_sign[col]) * xi[col];
        return x;
    };

    if (unb != SIZE_MAX) {
        Vec di(ncols, Rational(0));
        di[unb] = 1;
        for (size_t i = 0; i < tab.rows.size(); ++i) di[tab.basis[i]] = -tab.rows[i][unb];
        LpResult res;
        res.status = LpStatus::Unbounded;
        res.x = to_user(internal_x());
        res.ray = to_user(di);
        lp_assert_ray(p, res.x, res.ray);
        return res;
    }

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x = to_user(internal_x());
    Rational obj_int = -tab.cost[ncols];
    res.objective = p.maximize ? Rational(-obj_int) : obj_int;
    res.y.assign(m, Rational(0));
    for (size_t i = 0; i < tab.rows.size(); ++i) {
        size_t orig = live_row[i];
        Rational yi = -tab.cost[idcol[orig]];
        if (p.maximize) yi = -yi;
        res.y[orig] = Rational(rowsign[orig]) * yi;
    }
    lp_assert_optimal_pair(p, res);
    return res;
}

}  // namespace conehedge
