#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "kdual/core/rational.hpp"

// Exact linear algebra over the rationals and the integers. Matrices are small
// (face dimensions, coefficient vectors), so dense row-major vectors suffice.
namespace kdual::linalg {

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Reduced row echelon form in place; returns pivot columns.
template <class Field>
std::vector<std::size_t> rref(Matrix<Field>& m) {
    std::vector<std::size_t> pivots;
    if (m.empty()) return pivots;
    const std::size_t rows = m.size();
    const std::size_t cols = m.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = r;
        while (sel < rows && m[sel][c] == Field(0)) ++sel;
        if (sel == rows) continue;
        std::swap(m[r], m[sel]);
        Field inv = Field(1) / m[r][c];
        for (auto& v : m[r]) v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == Field(0)) continue;
            Field f = m[i][c];
            for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class Field>
std::size_t rank(Matrix<Field> m) {
    return rref(m).size();
}

/// Basis of the right null space {v : m v = 0}.
template <class Field>
Matrix<Field> kernel(Matrix<Field> m, std::size_t cols) {
    Matrix<Field> basis;
    if (m.empty()) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::vector<Field> e(cols, Field(0));
            e[c] = Field(1);
            basis.push_back(std::move(e));
        }
        return basis;
    }
    auto pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Field> v(cols, Field(0));
        v[free] = Field(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves m x = b when a solution exists (least-index free variables set to zero).
template <class Field>
std::optional<std::vector<Field>> solve(const Matrix<Field>& m, const std::vector<Field>& b) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m.front().size() : 0;
    Matrix<Field> aug(rows, std::vector<Field>(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) aug[i][j] = m[i][j];
        aug[i][cols] = b[i];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    std::vector<Field> x(cols, Field(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols];
    return x;
}

template <class Field>
Field determinant(Matrix<Field> m) {
    const std::size_t n = m.size();
    Field det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t sel = c;
        while (sel < n && m[sel][c] == Field(0)) ++sel;
        if (sel == n) return Field(0);
        if (sel != c) {
            std::swap(m[sel], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == Field(0)) continue;
            Field f = m[i][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
        }
    }
    return det;
}

/// Basis of the integer kernel {z in Z^d : a z = 0} by unimodular column reduction.
inline Matrix<BigInt> integer_kernel(Matrix<BigInt> a, std::size_t d) {
    Matrix<BigInt> u(d, std::vector<BigInt>(d, 0));
    for (std::size_t i = 0; i < d; ++i) u[i][i] = 1;
    auto col_op = [&](std::size_t target, std::size_t source, const BigInt& factor) {
        for (auto& row : a) row[target] -= factor * row[source];
        for (auto& row : u) row[target] -= factor * row[source];
    };
    auto col_swap = [&](std::size_t x, std::size_t y) {
        if (x == y) return;
        for (auto& row : a) std::swap(row[x], row[y]);
        for (auto& row : u) std::swap(row[x], row[y]);
    };
    std::size_t start = 0;
    for (std::size_t r = 0; r < a.size() && start < d; ++r) {
        while (true) {
            std::size_t best = d;
            for (std::size_t c = start; c < d; ++c) {
                if (a[r][c] == 0) continue;
                if (best == d || abs(a[r][c]) < abs(a[r][best])) best = c;
            }
            if (best == d) break;
            col_swap(start, best);
            bool done = true;
            for (std::size_t c = start + 1; c < d; ++c) {
                if (a[r][c] == 0) continue;
                BigInt q = a[r][c] / a[r][start];
                col_op(c, start, q);
                if (a[r][c] != 0) done = false;
            }
            if (done) {
                ++start;
                break;
            }
        }
    }
    Matrix<BigInt> basis;
    for (std::size_t c = start; c < d; ++c) {
        std::vector<BigInt> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = u[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
inline std::vector<BigInt> primitive_integer(const std::vector<Rational>& v) {
    BigInt den = common_denominator(v);
    std::vector<BigInt> out;
    BigInt g = 0;
    for (const auto& x : v) {
        Rational scaled = x * Rational(den);
        out.push_back(boost::multiprecision::numerator(scaled));
        g = boost::multiprecision::gcd(g, out.back());
    }
    if (g == 0) return out;
    bool flip = false;
    for (const auto& x : out) {
        if (x != 0) {
            flip = x < 0;
            break;
        }
    }
    for (auto& x : out) x = (flip ? -x : x) / g;
    return out;
}

}  // namespace kdual::linalg
