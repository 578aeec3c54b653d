#pragma once

// Small exact linear algebra: vectors of rationals, dot products, and a
// fraction-free Gaussian solver used for facet normals and projections.

#include <optional>
#include <vector>

#include "conehedge/errors.hpp"
#include "conehedge/rational.hpp"

namespace conehedge {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

inline Rational dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("dot: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec_sub size mismatch");
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec_add size mismatch");
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec vec_scale(const Rational& c, const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline bool vec_is_zero(const Vec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

// Solves A x = b exactly.  Returns nullopt when the system is inconsistent.
// When the solution space has positive dimension an arbitrary member is
// returned (free variables pinned to zero).
inline std::optional<Vec> solve_linear(Mat A, Vec b) {
    const size_t rows = A.size();
    if (rows == 0) return Vec{};
    const size_t cols = A[0].size();
    for (const auto& row : A)
        if (row.size() != cols) throw DimensionMismatch("solve_linear ragged matrix");
    if (b.size() != rows) throw DimensionMismatch("solve_linear rhs size");

    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t pr = r;
        while (pr < rows && A[pr][c] == 0) ++pr;
        if (pr == rows) continue;
        std::swap(A[pr], A[r]);
        std::swap(b[pr], b[r]);
        Rational inv = A[r][c];
        for (size_t j = c; j < cols; ++j) A[r][j] /= inv;
        b[r] /= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    Vec x(cols, Rational(0));
    for (size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = b[i];
    return x;
}

// Nullspace basis of A (exact).  Used when deriving facet normals from
// vertex subsets.
inline Mat nullspace(Mat A) {
    const size_t rows = A.size();
    const size_t cols = rows == 0 ? 0 : A[0].size();
    std::vector<size_t> pivot_of_col(cols, SIZE_MAX);
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t pr = r;
        while (pr < rows && A[pr][c] == 0) ++pr;
        if (pr == rows) continue;
        std::swap(A[pr], A[r]);
        Rational inv = A[r][c];
        for (size_t j = c; j < cols; ++j) A[r][j] /= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
        }
        pivot_of_col[c] = r;
        ++r;
    }
    Mat basis;
    for (size_t c = 0; c < cols; ++c) {
        if (pivot_of_col[c] != SIZE_MAX) continue;
        Vec v(cols, Rational(0));
        v[c] = 1;
        for (size_t j = 0; j < cols; ++j)
            if (pivot_of_col[j] != SIZE_MAX) v[j] = -A[pivot_of_col[j]][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace conehedge
